// SPDX-License-Identifier: Apache-2.0
#include "nag/convex_set.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nag {

// ── SpdMatrix ───────────────────────────────────────────────────────

SpdMatrix::SpdMatrix(MatrixXd m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols()) {
        throw DimensionError("SpdMatrix: matrix must be square");
    }
    if ((m_ - m_.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
        throw std::invalid_argument("SpdMatrix: matrix not symmetric");
    }
    m_ = 0.5 * (m_ + m_.transpose());
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(m_, Eigen::EigenvaluesOnly);
    min_eig_ = es.eigenvalues().minCoeff();
    max_eig_ = es.eigenvalues().maxCoeff();
    if (min_eig_ <= 0.0) {
        throw std::invalid_argument("SpdMatrix: matrix not positive definite");
    }
    llt_.compute(m_);
}

SpdMatrix SpdMatrix::identity(int n) { return SpdMatrix(MatrixXd::Identity(n, n)); }

SpdMatrix SpdMatrix::scaled_identity(int n, double s) {
    return SpdMatrix(s * MatrixXd::Identity(n, n));
}

bool SpdMatrix::is_diagonal(double tol) const {
    MatrixXd off = m_;
    off.diagonal().setZero();
    return off.cwiseAbs().maxCoeff() <= tol;
}

bool SpdMatrix::is_scalar(double tol) const {
    return is_diagonal(tol) &&
           (m_.diagonal().array() - m_(0, 0)).abs().maxCoeff() <= tol;
}

double SpdMatrix::norm(const VectorXd& x) const {
    return std::sqrt(std::max(0.0, quad(x)));
}

// ── Primitive sets ──────────────────────────────────────────────────

int primitive_dim(const PrimitiveSet& p) {
    return std::visit(
        [](const auto& s) -> int {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Box>) return static_cast<int>(s.lo.size());
            if constexpr (std::is_same_v<T, Halfspace>) return static_cast<int>(s.a.size());
            if constexpr (std::is_same_v<T, Ball>) return static_cast<int>(s.center.size());
            if constexpr (std::is_same_v<T, AffineSubspace>) return static_cast<int>(s.A.cols());
        },
        p);
}

double primitive_violation(const PrimitiveSet& p, const VectorXd& x) {
    return std::visit(
        [&](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Box>) {
                double v = 0.0;
                for (int k = 0; k < x.size(); ++k) {
                    v = std::max({v, s.lo[k] - x[k], x[k] - s.hi[k]});
                }
                return v;
            }
            if constexpr (std::is_same_v<T, Halfspace>) {
                return s.a.dot(x) - s.b;
            }
            if constexpr (std::is_same_v<T, Ball>) {
                return (x - s.center).norm() - s.radius;
            }
            if constexpr (std::is_same_v<T, AffineSubspace>) {
                return (s.A * x - s.b).cwiseAbs().maxCoeff();
            }
        },
        p);
}

namespace {

// Box projection in a non-separable Q metric has no closed form; run
// projected gradient on ||x - y||_Q^2, step 1/lambda_max(Q).
VectorXd project_box_general_q(const Box& box, const SpdMatrix& Q,
                               const VectorXd& y) {
    VectorXd x = y.cwiseMax(box.lo).cwiseMin(box.hi);
    const double step = 1.0 / Q.max_eigenvalue();
    for (int it = 0; it < 100000; ++it) {
        VectorXd next = (x - step * (Q.matrix() * (x - y)))
                            .cwiseMax(box.lo)
                            .cwiseMin(box.hi);
        double delta = (next - x).cwiseAbs().maxCoeff();
        x = next;
        if (delta <= 1e-13) break;
    }
    return x;
}

}  // namespace

VectorXd project_primitive(const PrimitiveSet& p, const SpdMatrix& Q,
                           const VectorXd& y) {
    return std::visit(
        [&](const auto& s) -> VectorXd {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Box>) {
                if (Q.is_diagonal()) {
                    return y.cwiseMax(s.lo).cwiseMin(s.hi);
                }
                return project_box_general_q(s, Q, y);
            }
            if constexpr (std::is_same_v<T, Halfspace>) {
                double slack = s.a.dot(y) - s.b;
                if (slack <= 0.0) return y;
                VectorXd qinv_a = Q.solve(s.a);
                return y - (slack / s.a.dot(qinv_a)) * qinv_a;
            }
            if constexpr (std::is_same_v<T, Ball>) {
                if (!Q.is_scalar()) {
                    throw UnsupportedError(
                        "project: ball projection requires scalar Q");
                }
                VectorXd d = y - s.center;
                double r = d.norm();
                if (r <= s.radius) return y;
                if (r == 0.0) return y;
                return s.center + (s.radius / r) * d;
            }
            if constexpr (std::is_same_v<T, AffineSubspace>) {
                // argmin ||x - y||_Q s.t. Ax = b:
                //   x = y - Q^{-1}A' (A Q^{-1} A')^{-1} (Ay - b)
                MatrixXd qinv_at = Q.solve_matrix(MatrixXd(s.A.transpose()));
                VectorXd resid = s.A * y - s.b;
                VectorXd mult = (s.A * qinv_at).ldlt().solve(resid);
                return y - qinv_at * mult;
            }
        },
        p);
}

// ── ConvexSet ───────────────────────────────────────────────────────

ConvexSet::ConvexSet(std::vector<PrimitiveSet> primitives, bool bounded)
    : primitives_(std::move(primitives)), bounded_(bounded) {
    if (primitives_.empty()) {
        throw std::invalid_argument("ConvexSet: primitive list is empty");
    }
    dim_ = primitive_dim(primitives_.front());
    for (const auto& p : primitives_) {
        if (primitive_dim(p) != dim_) {
            throw DimensionError("ConvexSet: primitives have mixed dimensions");
        }
        std::visit(
            [](const auto& s) {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, Box>) {
                    if ((s.lo.array() > s.hi.array()).any()) {
                        throw std::invalid_argument("Box: lo > hi");
                    }
                }
                if constexpr (std::is_same_v<T, Halfspace>) {
                    if (s.a.norm() == 0.0) {
                        throw std::invalid_argument("Halfspace: a = 0");
                    }
                }
                if constexpr (std::is_same_v<T, AffineSubspace>) {
                    Eigen::ColPivHouseholderQR<MatrixXd> qr(s.A.transpose());
                    if (qr.rank() < s.A.rows()) {
                        throw std::invalid_argument(
                            "AffineSubspace: A not full row rank");
                    }
                }
            },
            p);
    }
    // Nonemptiness certificate: Dykstra from the origin must stabilize on
    // a point of the intersection.
    SpdMatrix id = SpdMatrix::identity(dim_);
    feasible_ = project(id, VectorXd::Zero(dim_), 1e-10, 10000);
    if (!contains(feasible_, 1e-6)) {
        throw NonConvergenceError(
            "ConvexSet: could not certify nonempty intersection");
    }
}

ConvexSet ConvexSet::box(VectorXd lo, VectorXd hi) {
    return ConvexSet({Box{std::move(lo), std::move(hi)}}, true);
}

ConvexSet ConvexSet::singleton(VectorXd x) {
    VectorXd lo = x;
    return ConvexSet({Box{std::move(lo), std::move(x)}}, true);
}

ConvexSet ConvexSet::unit_box(int n) {
    return box(VectorXd::Zero(n), VectorXd::Ones(n));
}

bool ConvexSet::contains(const VectorXd& x, double tol) const {
    if (x.size() != dim_) throw DimensionError("contains: dimension mismatch");
    if (tol <= 0.0) throw std::invalid_argument("contains: tol must be > 0");
    for (const auto& p : primitives_) {
        if (primitive_violation(p, x) > tol) return false;
    }
    return true;
}

VectorXd ConvexSet::project(const SpdMatrix& Q, const VectorXd& y, double tol,
                            int max_iter) const {
    if (y.size() != dim_) throw DimensionError("project: dimension mismatch");
    if (primitives_.size() == 1) {
        return project_primitive(primitives_.front(), Q, y);
    }
    // Dykstra's alternating projections in the Q inner product.
    const size_t m = primitives_.size();
    VectorXd x = y;
    std::vector<VectorXd> increments(m, VectorXd::Zero(dim_));
    for (int cycle = 0; cycle < max_iter; ++cycle) {
        double displacement = 0.0;
        for (size_t j = 0; j < m; ++j) {
            VectorXd prev = x;
            x = project_primitive(primitives_[j], Q, prev + increments[j]);
            increments[j] = prev + increments[j] - x;
            displacement = std::max(displacement, Q.norm(x - prev));
        }
        if (displacement <= tol) return x;
    }
    throw NonConvergenceError("project: Dykstra did not converge");
}

Box ConvexSet::bounding_box() const {
    if (!bounded_) {
        throw UnsupportedError("bounding_box: set not flagged bounded");
    }
    const double inf = std::numeric_limits<double>::infinity();
    VectorXd lo = VectorXd::Constant(dim_, -inf);
    VectorXd hi = VectorXd::Constant(dim_, inf);
    for (const auto& p : primitives_) {
        if (const Box* b = std::get_if<Box>(&p)) {
            lo = lo.cwiseMax(b->lo);
            hi = hi.cwiseMin(b->hi);
        } else if (const Ball* s = std::get_if<Ball>(&p)) {
            lo = lo.cwiseMax((s->center.array() - s->radius).matrix());
            hi = hi.cwiseMin((s->center.array() + s->radius).matrix());
        }
    }
    if (!lo.allFinite() || !hi.allFinite()) {
        throw UnsupportedError(
            "bounding_box: no box or ball primitive bounds the set");
    }
    return Box{lo, hi};
}

}  // namespace nag
