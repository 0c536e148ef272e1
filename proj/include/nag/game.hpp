// SPDX-License-Identifier: Apache-2.0
#ifndef NAG_GAME_HPP
#define NAG_GAME_HPP

#include <vector>

#include "nag/convex_set.hpp"
#include "nag/network.hpp"

namespace nag {

/// Concatenated per-agent reference signals, length N*n.
using StackedSignal = Eigen::VectorXd;

/// Shared quadratic cost structure: agent i pays
///   q_i x'Qx + 2 (C sigma + c_i)' x.
struct CostParams {
    SpdMatrix Q;
    MatrixXd C;
    std::vector<double> q;    // per-agent, > 0
    std::vector<VectorXd> c;  // per-agent offsets
};

struct ConditionReport {
    std::vector<MatrixXd> M;       // [[q_i Q, -C], [-C', q_i Q]]
    std::vector<double> min_eig;   // per-agent minimum eigenvalue of M_i
    // Cost-side predicates of the convergence table, with margins
    // (positive margin = condition holds strictly).
    bool all_pd = false;       // M_i > 0 for all i
    bool all_psd = false;      // M_i >= 0 for all i
    bool c_sandwich = false;   // -q_i Q <= C < 0 for all i
    bool c_pd = false;         // C > 0
    double margin_pd = 0.0;
    double margin_psd = 0.0;
    double margin_sandwich = 0.0;
    double margin_c_pd = 0.0;
};

class GameSpec {
  public:
    GameSpec(int n, CostParams costs, std::vector<ConvexSet> sets, Network net,
             int nu);

    int n() const { return n_; }
    int population() const { return big_n_; }
    int nu() const { return nu_; }
    const CostParams& costs() const { return costs_; }
    const ConvexSet& set(int i) const { return sets_.at(i); }
    const std::vector<ConvexSet>& sets() const { return sets_; }
    const Network& net() const { return net_; }

    double cost(int i, const VectorXd& x, const VectorXd& sigma) const;

    /// argmin over X^i of J^i(., z): the weighted projection of the
    /// unconstrained minimizer -(q_i Q)^{-1}(C z + c_i).
    VectorXd optimal_response(int i, const VectorXd& z) const;

    StackedSignal stacked_response(const StackedSignal& z) const;
    StackedSignal stacked_response_serial(const StackedSignal& z) const;

    /// (P^{nu2} kron I_n) stacked_response((P^{nu1} kron I_n) z).
    /// (0, nu) is the plain aggregation mapping over nu communications.
    StackedSignal aggregate(const StackedSignal& z, int nu1, int nu2) const;

    /// (P^nu kron I_n) z, applied without forming the Kronecker product.
    StackedSignal mix(const StackedSignal& z, int nu) const;

    ConditionReport condition_matrices() const;

    Box stacked_bounding_box() const;
    /// D_N: max stacked norm over the constraint product, from bounding boxes.
    double stacked_radius() const;

    Eigen::Map<const VectorXd> agent_segment(const StackedSignal& z, int i) const;

  private:
    int n_ = 0, big_n_ = 0, nu_ = 0;
    CostParams costs_;
    std::vector<ConvexSet> sets_;
    Network net_;
};

/// Max over samples of ||A_nu(z) - A(z)||, plus the certified upper bound
/// ||P^nu - (1/N)11'||_2 * D_N.
struct ConvergenceGap {
    double gap = 0.0;
    double bound = 0.0;
};
ConvergenceGap uniform_convergence_gap(const GameSpec& game, int nu,
                                       const std::vector<StackedSignal>& samples);

/// Same game played over the exact averaging network (1/N)11'.
GameSpec with_averaging_network(const GameSpec& game);

}  // namespace nag

#endif
