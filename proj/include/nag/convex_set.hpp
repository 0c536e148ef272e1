// SPDX-License-Identifier: Apache-2.0
#ifndef NAG_CONVEX_SET_HPP
#define NAG_CONVEX_SET_HPP

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace nag {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct NonConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UnsupportedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Symmetric positive definite matrix with a cached Cholesky factorization.
/// Defines the inner product of the weighted Hilbert space used for
/// projections and optimal responses.
class SpdMatrix {
  public:
    explicit SpdMatrix(MatrixXd m);
    static SpdMatrix identity(int n);
    static SpdMatrix scaled_identity(int n, double s);

    int dim() const { return static_cast<int>(m_.rows()); }
    const MatrixXd& matrix() const { return m_; }
    VectorXd solve(const VectorXd& b) const { return llt_.solve(b); }
    MatrixXd solve_matrix(const MatrixXd& b) const { return llt_.solve(b); }
    double min_eigenvalue() const { return min_eig_; }
    double max_eigenvalue() const { return max_eig_; }
    bool is_diagonal(double tol = 1e-12) const;
    bool is_scalar(double tol = 1e-12) const;

    /// Weighted squared norm x'Qx.
    double quad(const VectorXd& x) const { return x.dot(m_ * x); }
    double norm(const VectorXd& x) const;

  private:
    MatrixXd m_;
    Eigen::LLT<MatrixXd> llt_;
    double min_eig_ = 0.0, max_eig_ = 0.0;
};

struct Box {
    VectorXd lo, hi;
};
struct Halfspace {
    VectorXd a;  // a'x <= b, a != 0
    double b = 0.0;
};
struct Ball {
    VectorXd center;
    double radius = 0.0;
};
struct AffineSubspace {
    MatrixXd A;  // full row rank, Ax = b
    VectorXd b;
};

using PrimitiveSet = std::variant<Box, Halfspace, Ball, AffineSubspace>;

int primitive_dim(const PrimitiveSet& p);
double primitive_violation(const PrimitiveSet& p, const VectorXd& x);
VectorXd project_primitive(const PrimitiveSet& p, const SpdMatrix& Q,
                           const VectorXd& y);

/// Intersection of primitive convex sets. Nonemptiness is certified at
/// construction; the witness point is kept for later use.
class ConvexSet {
  public:
    ConvexSet(std::vector<PrimitiveSet> primitives, bool bounded);
    static ConvexSet box(VectorXd lo, VectorXd hi);
    static ConvexSet singleton(VectorXd x);
    static ConvexSet unit_box(int n);  // [0,1]^n

    int dim() const { return dim_; }
    bool is_bounded() const { return bounded_; }
    const std::vector<PrimitiveSet>& primitives() const { return primitives_; }
    const VectorXd& feasible_point() const { return feasible_; }

    bool contains(const VectorXd& x, double tol) const;

    /// Projection in the Q-weighted norm. Single primitives use closed
    /// forms (box requires diagonal Q, ball requires scalar Q);
    /// intersections run Dykstra in the Q inner product.
    VectorXd project(const SpdMatrix& Q, const VectorXd& y,
                     double tol = 1e-10, int max_iter = 10000) const;

    /// Axis-aligned box enclosing the set, derived from its box and ball
    /// primitives. Requires the bounded flag.
    Box bounding_box() const;

  private:
    std::vector<PrimitiveSet> primitives_;
    bool bounded_ = false;
    int dim_ = 0;
    VectorXd feasible_;
};

}  // namespace nag

#endif
