#include "tubeparam/cli.hpp"

int main(int argc, char** argv)
{
    return tubeparam::run_cli(argc, argv);
}
