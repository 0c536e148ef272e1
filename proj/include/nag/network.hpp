// SPDX-License-Identifier: Apache-2.0
#ifndef NAG_NETWORK_HPP
#define NAG_NETWORK_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>

#include "nag/convex_set.hpp"

namespace nag {

struct SpectralReport {
    double operator_norm = 0.0;  // largest singular value of P
    double mu = 0.0;             // max |lambda| over Lambda(P) \ {1}
    bool symmetric = false;
    bool doubly_stochastic = false;
    bool primitive = false;
};

/// Row-stochastic weighted adjacency matrix over N agents.
class Network {
  public:
    explicit Network(MatrixXd p);

    int size() const { return n_; }
    const MatrixXd& matrix() const { return p_; }

    SpectralReport certify() const;
    MatrixXd power(int nu) const;        // repeated squaring, power(0) = I
    bool check_no_cycles(int nu) const;  // all diagonal entries of P^nu ~ 0
    double consensus_error(int nu) const;  // max_i sum_j |P^nu_ij - 1/N|

    /// Emulates the distributed precomputation of the communication count:
    /// each round k builds P^{k+1} from neighbor rows, every agent runs its
    /// local consensus test, and the pass flags propagate through N rounds
    /// of min-consensus. Returns the first k at which all flags are 1.
    int precompute_nu_bar(double eps_d, int max_nu) const;

  private:
    MatrixXd p_;
    int n_ = 0;
};

enum class TopologyKind { CompleteNoSelf, DirectedRing, UndirectedRing, SmallWorld };

struct Topology {
    TopologyKind kind = TopologyKind::CompleteNoSelf;
    double p_shortcut = 0.3;  // SmallWorld only
};

Network generate(const Topology& topology, int n, std::uint64_t seed);

/// Undirected ring plus random shortcuts, weighted by symmetric Sinkhorn
/// scaling so the matrix is doubly stochastic with zero diagonal.
Network generate_small_world_zero_diag(int n, double p_shortcut,
                                       std::uint64_t seed);

/// P = P_M kron (1/B) 11'. Inherits double stochasticity, primitivity and
/// operator norm from P_M.
Network hierarchical(const Network& p_m, int b);

Network load_network_csv(const std::string& path);
void save_network_csv(const Network& net, const std::string& path);

}  // namespace nag

#endif
