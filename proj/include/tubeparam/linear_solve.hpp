#pragma once

#include "tubeparam/mesh.hpp"

#include <Eigen/SparseCholesky>

#include <map>
#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

namespace tubeparam {

class SolverError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Pins and equality ties on the unknowns of a single scalar field.
class LinearConstraintSet
{
public:
    void pin(int unknown, double value);
    void tie(int a, int b);

    const std::map<int, double>& pins() const { return pins_; }
    const std::vector<std::pair<int, int>>& ties() const { return ties_; }
    bool empty() const { return pins_.empty() && ties_.empty(); }

private:
    std::map<int, double> pins_;
    std::vector<std::pair<int, int>> ties_;
};

/// A symmetric positive (semi)definite system with pinned and tied unknowns
/// eliminated and the reduced matrix factored once.
///
/// Tied unknowns are merged into one reduced unknown; pinned values are
/// substituted into the right-hand side. The factorization can be reused for
/// different right-hand sides and pin values as long as the set of pinned
/// unknowns and the ties do not change.
class ConstrainedSystem
{
public:
    ConstrainedSystem(const SparseMatrix& A, const LinearConstraintSet& constraints);

    /// Solve with the pin values the system was built with.
    Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
    /// Solve with new pin values for the same pinned unknowns.
    Eigen::VectorXd solve(const Eigen::VectorXd& rhs, const LinearConstraintSet& values) const;

    int num_unknowns() const { return static_cast<int>(klass_.size()); }
    int num_reduced() const { return num_free_; }

private:
    Eigen::VectorXd fixed_values(const LinearConstraintSet& values) const;

    SparseMatrix A_;
    SparseMatrix P_;  // full <- reduced
    SparseMatrix reduced_;
    std::vector<int> klass_;
    std::vector<int> reduced_index_;  // per class, -1 when pinned
    std::vector<int> pinned_classes_;
    LinearConstraintSet constraints_;
    int num_free_ = 0;
    std::unique_ptr<Eigen::SimplicialLDLT<SparseMatrix>> factor_;
};

/// Solves A x = rhs subject to the constraints; pins and ties hold exactly.
Eigen::VectorXd solve_constrained(const SparseMatrix& A, const LinearConstraintSet& constraints,
                                  const Eigen::VectorXd& rhs);

}  // namespace tubeparam
