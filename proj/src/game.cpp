// SPDX-License-Identifier: Apache-2.0
#include "nag/game.hpp"

#include <cmath>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace nag {

GameSpec::GameSpec(int n, CostParams costs, std::vector<ConvexSet> sets,
                   Network net, int nu)
    : n_(n), nu_(nu), costs_(std::move(costs)), sets_(std::move(sets)),
      net_(std::move(net)) {
    big_n_ = static_cast<int>(sets_.size());
    if (big_n_ != net_.size()) {
        throw DimensionError("GameSpec: population does not match network");
    }
    if (costs_.Q.dim() != n_ || costs_.C.rows() != n_ || costs_.C.cols() != n_) {
        throw DimensionError("GameSpec: cost matrices do not match dimension");
    }
    if (static_cast<int>(costs_.q.size()) != big_n_ ||
        static_cast<int>(costs_.c.size()) != big_n_) {
        throw DimensionError("GameSpec: per-agent cost lists have wrong length");
    }
    for (double qi : costs_.q) {
        if (qi <= 0.0) throw std::invalid_argument("GameSpec: q_i must be > 0");
    }
    for (const ConvexSet& s : sets_) {
        if (s.dim() != n_) {
            throw DimensionError("GameSpec: constraint set dimension mismatch");
        }
    }
    if (nu_ < 0) throw std::invalid_argument("GameSpec: nu must be >= 0");
}

Eigen::Map<const VectorXd> GameSpec::agent_segment(const StackedSignal& z,
                                                   int i) const {
    return Eigen::Map<const VectorXd>(z.data() + i * n_, n_);
}

double GameSpec::cost(int i, const VectorXd& x, const VectorXd& sigma) const {
    if (i < 0 || i >= big_n_) throw std::out_of_range("cost: agent index");
    if (x.size() != n_ || sigma.size() != n_) {
        throw DimensionError("cost: dimension mismatch");
    }
    return costs_.q[i] * x.dot(costs_.Q.matrix() * x) +
           2.0 * (costs_.C * sigma + costs_.c[i]).dot(x);
}

VectorXd GameSpec::optimal_response(int i, const VectorXd& z) const {
    if (i < 0 || i >= big_n_) throw std::out_of_range("optimal_response: agent index");
    // Unconstrained minimizer -(q_i Q)^{-1}(C z + c_i), then projection in
    // the q_i Q metric; the scale q_i does not change the projection.
    VectorXd unconstrained =
        -costs_.Q.solve(costs_.C * z + costs_.c[i]) / costs_.q[i];
    return sets_[i].project(costs_.Q, unconstrained);
}

StackedSignal GameSpec::stacked_response_serial(const StackedSignal& z) const {
    if (z.size() != big_n_ * n_) {
        throw DimensionError("stacked_response: signal length mismatch");
    }
    StackedSignal out(big_n_ * n_);
    for (int i = 0; i < big_n_; ++i) {
        out.segment(i * n_, n_) = optimal_response(i, agent_segment(z, i));
    }
    return out;
}

StackedSignal GameSpec::stacked_response(const StackedSignal& z) const {
    if (z.size() != big_n_ * n_) {
        throw DimensionError("stacked_response: signal length mismatch");
    }
    StackedSignal out(big_n_ * n_);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < big_n_; ++i) {
        out.segment(i * n_, n_) = optimal_response(i, agent_segment(z, i));
    }
    return out;
}

StackedSignal GameSpec::mix(const StackedSignal& z, int nu) const {
    if (nu == 0) return z;
    using RowMajor =
        Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    Eigen::Map<const RowMajor> rows(z.data(), big_n_, n_);
    RowMajor mixed = net_.power(nu) * rows;
    return Eigen::Map<const StackedSignal>(mixed.data(), big_n_ * n_);
}

StackedSignal GameSpec::aggregate(const StackedSignal& z, int nu1,
                                  int nu2) const {
    if (nu1 < 0 || nu2 < 0) {
        throw std::invalid_argument("aggregate: communication counts < 0");
    }
    return mix(stacked_response(mix(z, nu1)), nu2);
}

ConditionReport GameSpec::condition_matrices() const {
    ConditionReport report;
    const MatrixXd& q_mat = costs_.Q.matrix();
    const MatrixXd& c_mat = costs_.C;
    const bool c_symmetric =
        (c_mat - c_mat.transpose()).cwiseAbs().maxCoeff() <= 1e-12;
    double min_m = std::numeric_limits<double>::infinity();
    double min_sandwich = std::numeric_limits<double>::infinity();
    for (int i = 0; i < big_n_; ++i) {
        MatrixXd m(2 * n_, 2 * n_);
        m.topLeftCorner(n_, n_) = costs_.q[i] * q_mat;
        m.bottomRightCorner(n_, n_) = costs_.q[i] * q_mat;
        m.topRightCorner(n_, n_) = -c_mat;
        m.bottomLeftCorner(n_, n_) = -c_mat.transpose();
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (m + m.transpose()),
                                                   Eigen::EigenvaluesOnly);
        double lam = es.eigenvalues().minCoeff();
        report.M.push_back(std::move(m));
        report.min_eig.push_back(lam);
        min_m = std::min(min_m, lam);
        Eigen::SelfAdjointEigenSolver<MatrixXd> lower(
            MatrixXd(costs_.q[i] * q_mat + 0.5 * (c_mat + c_mat.transpose())),
            Eigen::EigenvaluesOnly);
        min_sandwich = std::min(min_sandwich, lower.eigenvalues().minCoeff());
    }
    Eigen::SelfAdjointEigenSolver<MatrixXd> cs(
        MatrixXd(0.5 * (c_mat + c_mat.transpose())), Eigen::EigenvaluesOnly);
    const double c_min = cs.eigenvalues().minCoeff();
    const double c_max = cs.eigenvalues().maxCoeff();

    report.margin_pd = min_m;
    report.margin_psd = min_m;
    report.all_pd = min_m > 0.0;
    report.all_psd = min_m >= -1e-12;
    report.margin_sandwich = std::min(min_sandwich, -c_max);
    report.c_sandwich = c_symmetric && c_max < 0.0 && min_sandwich >= -1e-12;
    report.margin_c_pd = c_min;
    report.c_pd = c_symmetric && c_min > 0.0;
    return report;
}

Box GameSpec::stacked_bounding_box() const {
    VectorXd lo(big_n_ * n_), hi(big_n_ * n_);
    for (int i = 0; i < big_n_; ++i) {
        Box b = sets_[i].bounding_box();
        lo.segment(i * n_, n_) = b.lo;
        hi.segment(i * n_, n_) = b.hi;
    }
    return Box{lo, hi};
}

double GameSpec::stacked_radius() const {
    Box b = stacked_bounding_box();
    return b.lo.cwiseAbs().cwiseMax(b.hi.cwiseAbs()).norm();
}

ConvergenceGap uniform_convergence_gap(
    const GameSpec& game, int nu, const std::vector<StackedSignal>& samples) {
    const int n_agents = game.population();
    const int n = game.n();
    ConvergenceGap result;
    for (const StackedSignal& z : samples) {
        StackedSignal responses = game.stacked_response(z);
        StackedSignal via_network = game.mix(responses, nu);
        VectorXd mean = VectorXd::Zero(n);
        for (int i = 0; i < n_agents; ++i) {
            mean += responses.segment(i * n, n);
        }
        mean /= n_agents;
        StackedSignal averaged = mean.replicate(n_agents, 1);
        result.gap = std::max(result.gap, (via_network - averaged).norm());
    }
    MatrixXd dev = game.net().power(nu).array() - 1.0 / n_agents;
    double norm2 = Eigen::BDCSVD<MatrixXd>(dev).singularValues()(0);
    result.bound = norm2 * game.stacked_radius();
    return result;
}

GameSpec with_averaging_network(const GameSpec& game) {
    const int n_agents = game.population();
    MatrixXd avg =
        MatrixXd::Constant(n_agents, n_agents, 1.0 / n_agents);
    return GameSpec(game.n(), game.costs(), game.sets(), Network(avg),
                    game.nu());
}

}  // namespace nag
