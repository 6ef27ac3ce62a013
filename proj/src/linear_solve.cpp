#include "tubeparam/linear_solve.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace tubeparam {

namespace {

int find_root(std::vector<int>& parent, int x)
{
    while (parent[x] != x) {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    return x;
}

bool values_agree(double a, double b)
{
    return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

constexpr double kResidualTolerance = 1e-10;

}  // namespace

void LinearConstraintSet::pin(int unknown, double value)
{
    auto [it, inserted] = pins_.emplace(unknown, value);
    if (!inserted && !values_agree(it->second, value)) {
        throw SolverError("contradictory pins on unknown " + std::to_string(unknown));
    }
}

void LinearConstraintSet::tie(int a, int b)
{
    if (a != b) {
        ties_.emplace_back(a, b);
    }
}

ConstrainedSystem::ConstrainedSystem(const SparseMatrix& A, const LinearConstraintSet& constraints)
    : A_(A), constraints_(constraints)
{
    const int n = static_cast<int>(A.rows());
    if (A.cols() != n) {
        throw SolverError("system matrix is not square");
    }
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    for (auto [a, b] : constraints.ties()) {
        if (a < 0 || a >= n || b < 0 || b >= n) {
            throw SolverError("tie references unknown outside the system");
        }
        const int ra = find_root(parent, a);
        const int rb = find_root(parent, b);
        if (ra != rb) {
            parent[std::max(ra, rb)] = std::min(ra, rb);
        }
    }

    klass_.resize(n);
    for (int i = 0; i < n; ++i) {
        klass_[i] = find_root(parent, i);
    }

    std::vector<char> pinned(n, 0);
    std::vector<double> pin_value(n, 0.0);
    for (auto [i, value] : constraints.pins()) {
        if (i < 0 || i >= n) {
            throw SolverError("pin references unknown outside the system");
        }
        const int c = klass_[i];
        if (pinned[c] && !values_agree(pin_value[c], value)) {
            throw SolverError("contradictory constraints: unknown " + std::to_string(i)
                              + " is tied to an unknown pinned to a different value");
        }
        pinned[c] = 1;
        pin_value[c] = value;
    }

    reduced_index_.assign(n, -1);
    for (int i = 0; i < n; ++i) {
        if (klass_[i] == i) {
            if (pinned[i]) {
                pinned_classes_.push_back(i);
            } else {
                reduced_index_[i] = num_free_++;
            }
        }
    }

    std::vector<Eigen::Triplet<double>> triplets;
    for (int i = 0; i < n; ++i) {
        const int r = reduced_index_[klass_[i]];
        if (r >= 0) {
            triplets.emplace_back(i, r, 1.0);
        }
    }
    P_.resize(n, num_free_);
    P_.setFromTriplets(triplets.begin(), triplets.end());

    if (num_free_ == 0) {
        return;
    }
    reduced_ = P_.transpose() * A_ * P_;
    factor_ = std::make_unique<Eigen::SimplicialLDLT<SparseMatrix>>(reduced_);
    if (factor_->info() != Eigen::Success) {
        throw SolverError("factorization of the reduced system failed");
    }
    const Eigen::VectorXd D = factor_->vectorD();
    const double scale = D.cwiseAbs().maxCoeff();
    if (!(D.minCoeff() > 1e-13 * scale)) {
        throw SolverError("reduced system is singular or not positive definite "
                          "(under-constrained?)");
    }
}

Eigen::VectorXd ConstrainedSystem::fixed_values(const LinearConstraintSet& values) const
{
    const int n = num_unknowns();
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    std::vector<char> seen(n, 0);
    for (auto [i, value] : values.pins()) {
        if (i < 0 || i >= n || reduced_index_[klass_[i]] >= 0) {
            throw SolverError("pin values do not match the factored constraint structure");
        }
        const int c = klass_[i];
        if (seen[c] && !values_agree(x[c], value)) {
            throw SolverError("contradictory pin values on tied unknowns");
        }
        seen[c] = 1;
        x[c] = value;
    }
    for (int c : pinned_classes_) {
        if (!seen[c]) {
            throw SolverError("pin values do not match the factored constraint structure");
        }
    }
    for (int i = 0; i < n; ++i) {
        if (reduced_index_[klass_[i]] < 0) {
            x[i] = x[klass_[i]];
        }
    }
    return x;
}

Eigen::VectorXd ConstrainedSystem::solve(const Eigen::VectorXd& rhs) const
{
    return solve(rhs, constraints_);
}

Eigen::VectorXd ConstrainedSystem::solve(const Eigen::VectorXd& rhs, const LinearConstraintSet& values) const
{
    if (rhs.size() != num_unknowns()) {
        throw SolverError("right-hand side has the wrong size");
    }
    Eigen::VectorXd x = fixed_values(values);
    if (num_free_ == 0) {
        return x;
    }
    const Eigen::VectorXd b = P_.transpose() * (rhs - A_ * x);
    const SparseMatrix& reduced = reduced_;
    Eigen::VectorXd y = factor_->solve(b);
    const double b_norm = std::max(b.norm(), (reduced * y).norm());
    double residual = (b - reduced * y).norm();
    for (int step = 0; step < 3 && residual > kResidualTolerance * b_norm; ++step) {
        y += factor_->solve(b - reduced * y);
        residual = (b - reduced * y).norm();
    }
    if (!std::isfinite(residual) || (b_norm > 0.0 && residual > kResidualTolerance * b_norm)) {
        throw SolverError("linear solve did not reach the residual tolerance");
    }
    x += P_ * y;
    return x;
}

Eigen::VectorXd solve_constrained(const SparseMatrix& A, const LinearConstraintSet& constraints,
                                  const Eigen::VectorXd& rhs)
{
    return ConstrainedSystem(A, constraints).solve(rhs);
}

}  // namespace tubeparam
