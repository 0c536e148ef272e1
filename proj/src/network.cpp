// SPDX-License-Identifier: Apache-2.0
#include "nag/network.hpp"

#include <cmath>
#include <complex>
#include <fstream>
#include <random>
#include <sstream>
#include <vector>

namespace nag {

Network::Network(MatrixXd p) : p_(std::move(p)) {
    if (p_.rows() != p_.cols() || p_.rows() < 1) {
        throw DimensionError("Network: adjacency matrix must be square");
    }
    n_ = static_cast<int>(p_.rows());
    if (p_.minCoeff() < -1e-12 || p_.maxCoeff() > 1.0 + 1e-12) {
        throw std::invalid_argument("Network: entries must lie in [0,1]");
    }
    VectorXd row_sums = p_.rowwise().sum();
    if ((row_sums.array() - 1.0).abs().maxCoeff() > 1e-10) {
        throw std::invalid_argument("Network: matrix not row stochastic");
    }
}

MatrixXd Network::power(int nu) const {
    if (nu < 0) throw std::invalid_argument("power: nu must be >= 0");
    MatrixXd result = MatrixXd::Identity(n_, n_);
    MatrixXd base = p_;
    int e = nu;
    while (e > 0) {
        if (e & 1) result = result * base;
        base = base * base;
        e >>= 1;
    }
    return result;
}

SpectralReport Network::certify() const {
    SpectralReport report;
    report.symmetric = (p_ - p_.transpose()).cwiseAbs().maxCoeff() <= 1e-10;
    report.doubly_stochastic =
        (p_.colwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-10;
    report.operator_norm =
        Eigen::BDCSVD<MatrixXd>(p_).singularValues()(0);

    // Primitivity: some boolean power of the adjacency pattern is all
    // positive; the Wielandt bound N^2-2N+2 caps the exponent, and for a
    // primitive matrix every larger power stays positive, so checking the
    // squarings that pass the bound is enough.
    const long bound = static_cast<long>(n_) * n_ - 2L * n_ + 2L;
    MatrixXd a = (p_.array() > 0.0).cast<double>();
    long exponent = 1;
    while (true) {
        if (a.minCoeff() > 0.0) {
            report.primitive = true;
            break;
        }
        if (exponent > bound) break;
        a = ((a * a).array() > 0.0).cast<double>();
        exponent *= 2;
    }

    Eigen::EigenSolver<MatrixXd> es(p_);
    const auto& eig = es.eigenvalues();
    int drop = 0;
    for (int k = 1; k < n_; ++k) {
        if (std::abs(eig(k) - std::complex<double>(1.0, 0.0)) <
            std::abs(eig(drop) - std::complex<double>(1.0, 0.0))) {
            drop = k;
        }
    }
    double mu = 0.0;
    for (int k = 0; k < n_; ++k) {
        if (k != drop) mu = std::max(mu, std::abs(eig(k)));
    }
    report.mu = mu;
    return report;
}

bool Network::check_no_cycles(int nu) const {
    if (nu < 1) throw std::invalid_argument("check_no_cycles: nu must be >= 1");
    return power(nu).diagonal().cwiseAbs().maxCoeff() <= 1e-12;
}

double Network::consensus_error(int nu) const {
    if (nu < 1) throw std::invalid_argument("consensus_error: nu must be >= 1");
    MatrixXd dev = power(nu).array() - 1.0 / n_;
    return dev.cwiseAbs().rowwise().sum().maxCoeff();
}

int Network::precompute_nu_bar(double eps_d, int max_nu) const {
    if (eps_d <= 0.0) throw std::invalid_argument("precompute_nu_bar: eps_d <= 0");
    // In-neighborhoods for the min-consensus flag rounds.
    std::vector<std::vector<int>> in_neighbors(n_);
    for (int i = 0; i < n_; ++i) {
        for (int j = 0; j < n_; ++j) {
            if (p_(i, j) > 0.0) in_neighbors[i].push_back(j);
        }
    }
    MatrixXd pk = MatrixXd::Identity(n_, n_);
    for (int k = 1; k <= max_nu; ++k) {
        pk = p_ * pk;  // row i is rebuilt from the rows of its neighbors
        std::vector<int> flags(n_);
        for (int i = 0; i < n_; ++i) {
            double dev = (pk.row(i).array() - 1.0 / n_).abs().sum();
            flags[i] = dev < eps_d ? 1 : 0;
        }
        for (int round = 0; round < n_; ++round) {
            std::vector<int> next = flags;
            for (int i = 0; i < n_; ++i) {
                for (int j : in_neighbors[i]) {
                    next[i] = std::min(next[i], flags[j]);
                }
            }
            flags = std::move(next);
        }
        bool all = true;
        for (int f : flags) all = all && (f == 1);
        if (all) return k;
    }
    throw NonConvergenceError("precompute_nu_bar: no admissible nu found");
}

namespace {

// Ring adjacency over n nodes plus each chord added independently with the
// given probability.
MatrixXd small_world_adjacency(int n, double p_shortcut, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution coin(p_shortcut);
    MatrixXd a = MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        a(i, (i + 1) % n) = 1.0;
        a((i + 1) % n, i) = 1.0;
    }
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (a(i, j) == 0.0 && coin(rng)) {
                a(i, j) = 1.0;
                a(j, i) = 1.0;
            }
        }
    }
    return a;
}

// Metropolis weights: P_ij = 1/(1+max(d_i,d_j)) on edges, remainder on the
// diagonal. Doubly stochastic for any undirected graph.
MatrixXd metropolis_weights(const MatrixXd& a) {
    const int n = static_cast<int>(a.rows());
    VectorXd degree = a.rowwise().sum();
    MatrixXd p = MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i != j && a(i, j) > 0.0) {
                p(i, j) = 1.0 / (1.0 + std::max(degree[i], degree[j]));
            }
        }
        p(i, i) = 1.0 - p.row(i).sum();
    }
    return p;
}

}  // namespace

Network generate(const Topology& topology, int n, std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("generate: need at least 2 agents");
    switch (topology.kind) {
        case TopologyKind::CompleteNoSelf: {
            MatrixXd p = MatrixXd::Constant(n, n, 1.0 / (n - 1));
            p.diagonal().setZero();
            return Network(p);
        }
        case TopologyKind::DirectedRing: {
            MatrixXd p = MatrixXd::Zero(n, n);
            for (int i = 0; i < n; ++i) p(i, (i + 1) % n) = 1.0;
            return Network(p);
        }
        case TopologyKind::UndirectedRing: {
            MatrixXd a = small_world_adjacency(n, 0.0, seed);
            return Network(metropolis_weights(a));
        }
        case TopologyKind::SmallWorld: {
            MatrixXd a = small_world_adjacency(n, topology.p_shortcut, seed);
            return Network(metropolis_weights(a));
        }
    }
    throw std::invalid_argument("generate: unknown topology");
}

Network generate_small_world_zero_diag(int n, double p_shortcut,
                                       std::uint64_t seed) {
    MatrixXd a = small_world_adjacency(n, p_shortcut, seed);
    // Sinkhorn scaling keeps the zero pattern (and the zero diagonal) while
    // making the matrix doubly stochastic; the ring guarantees support.
    MatrixXd p = a;
    for (int it = 0; it < 100000; ++it) {
        for (int i = 0; i < n; ++i) p.row(i) /= p.row(i).sum();
        for (int j = 0; j < n; ++j) p.col(j) /= p.col(j).sum();
        double row_dev = (p.rowwise().sum().array() - 1.0).abs().maxCoeff();
        if (row_dev <= 1e-13) break;
    }
    p = 0.5 * (p + p.transpose());
    for (int i = 0; i < n; ++i) p.row(i) /= p.row(i).sum();
    return Network(p);
}

Network hierarchical(const Network& p_m, int b) {
    if (b < 1) throw std::invalid_argument("hierarchical: B must be >= 1");
    const int m = p_m.size();
    MatrixXd block = MatrixXd::Constant(b, b, 1.0 / b);
    MatrixXd p(m * b, m * b);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            p.block(i * b, j * b, b, b) = p_m.matrix()(i, j) * block;
        }
    }
    return Network(p);
}

Network load_network_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open network file: " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        rows.push_back(std::move(row));
    }
    const size_t n = rows.size();
    MatrixXd p(n, n);
    for (size_t i = 0; i < n; ++i) {
        if (rows[i].size() != n) {
            throw std::runtime_error("network file is not square: " + path);
        }
        for (size_t j = 0; j < n; ++j) p(i, j) = rows[i][j];
    }
    return Network(p);
}

void save_network_csv(const Network& net, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write network file: " + path);
    out.precision(17);
    const MatrixXd& p = net.matrix();
    for (int i = 0; i < net.size(); ++i) {
        for (int j = 0; j < net.size(); ++j) {
            out << p(i, j) << (j + 1 == net.size() ? '\n' : ',');
        }
    }
}

}  // namespace nag
