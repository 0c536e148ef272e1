// SPDX-License-Identifier: Apache-2.0
#include "nag/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <set>

namespace nag {

std::pair<VectorXd, double> best_deviation(
    const GameSpec& game, int i, const std::vector<VectorXd>& profile,
    EquilibriumMode mode) {
    const int n = game.n();
    const int n_agents = game.population();
    if (static_cast<int>(profile.size()) != n_agents) {
        throw DimensionError("best_deviation: profile size mismatch");
    }
    if (i < 0 || i >= n_agents) throw std::out_of_range("best_deviation: agent");

    double w;
    VectorXd fixed_part = VectorXd::Zero(n);
    if (mode == EquilibriumMode::NA) {
        MatrixXd p_nu = game.net().power(game.nu());
        w = p_nu(i, i);
        for (int j = 0; j < n_agents; ++j) {
            if (j != i) fixed_part += p_nu(i, j) * profile[j];
        }
    } else {
        w = 1.0 / n_agents;
        for (int j = 0; j < n_agents; ++j) {
            if (j != i) fixed_part += profile[j] / n_agents;
        }
    }

    if (w <= 1e-15) {
        VectorXd y = game.optimal_response(i, fixed_part);
        return {y, game.cost(i, y, fixed_part)};
    }

    // The deviation also moves the aggregate through the self-weight:
    //   g(y) = q_i y'Qy + 2w y'Cy + 2(C r + c_i)'y,  Hessian 2H with
    //   H = q_i Q + w (C + C').
    const MatrixXd& c_mat = game.costs().C;
    MatrixXd h = game.costs().q[i] * game.costs().Q.matrix() +
                 w * (c_mat + c_mat.transpose());
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (h + h.transpose()),
                                               Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < 1e-12) {
        throw NonconvexError("best_deviation: problem not strictly convex");
    }
    const double lipschitz = 2.0 * es.eigenvalues().maxCoeff() * 1.05;
    const VectorXd affine = c_mat * fixed_part + game.costs().c[i];
    const SpdMatrix euclid = SpdMatrix::identity(n);

    VectorXd y = game.set(i).project(euclid, profile[i]);
    for (long it = 0; it < 100000; ++it) {
        VectorXd grad = 2.0 * (h * y + affine);
        VectorXd next = game.set(i).project(euclid, y - grad / lipschitz);
        double delta = (next - y).cwiseAbs().maxCoeff();
        y = std::move(next);
        if (delta <= 1e-9) break;
    }
    return {y, game.cost(i, y, w * y + fixed_part)};
}

NashCertificate certify_nash(const GameSpec& game,
                             const std::vector<VectorXd>& profile,
                             EquilibriumMode mode) {
    const int n_agents = game.population();
    NashCertificate cert;
    cert.mode = mode;
    cert.nu = game.nu();
    cert.per_agent_eps.assign(n_agents, 0.0);

    MatrixXd p_nu = game.net().power(game.nu());
    std::exception_ptr error;
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n_agents; ++i) {
        try {
            VectorXd sigma = VectorXd::Zero(game.n());
            if (mode == EquilibriumMode::NA) {
                for (int j = 0; j < n_agents; ++j) sigma += p_nu(i, j) * profile[j];
            } else {
                for (int j = 0; j < n_agents; ++j) sigma += profile[j];
                sigma /= n_agents;
            }
            double played = game.cost(i, profile[i], sigma);
            double best = best_deviation(game, i, profile, mode).second;
            cert.per_agent_eps[i] = played - best;
        } catch (...) {
#pragma omp critical
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
    cert.max_eps = *std::max_element(cert.per_agent_eps.begin(),
                                     cert.per_agent_eps.end());
    return cert;
}

std::vector<VectorXd> brute_force_nash(const GameSpec& game,
                                       double grid_resolution) {
    if (game.n() != 1 || game.population() > 4) {
        throw UnsupportedError("brute_force_nash: needs n = 1 and N <= 4");
    }
    const int n_agents = game.population();
    std::vector<VectorXd> grids(n_agents);
    std::vector<long> index(n_agents, 0);
    MatrixXd p_nu = game.net().power(game.nu());

    for (int i = 0; i < n_agents; ++i) {
        Box box = game.set(i).bounding_box();
        if (game.set(i).primitives().size() != 1 ||
            !std::holds_alternative<Box>(game.set(i).primitives().front())) {
            throw UnsupportedError("brute_force_nash: box sets only");
        }
        const double lo = box.lo[0], hi = box.hi[0];
        const long count =
            1 + static_cast<long>(std::floor((hi - lo) / grid_resolution + 1e-12));
        VectorXd g(count);
        for (long k = 0; k < count; ++k) g[k] = std::min(lo + k * grid_resolution, hi);
        grids[i] = g;
        // start at the grid point nearest the feasible witness
        double x0 = game.set(i).feasible_point()[0];
        long k0 = std::lround((x0 - lo) / grid_resolution);
        index[i] = std::clamp(k0, 0L, count - 1);
    }

    std::set<std::vector<long>> seen;
    for (long sweep = 0; sweep < 100000; ++sweep) {
        bool changed = false;
        for (int i = 0; i < n_agents; ++i) {
            const double w = p_nu(i, i);
            double fixed_part = 0.0;
            for (int j = 0; j < n_agents; ++j) {
                if (j != i) fixed_part += p_nu(i, j) * grids[j][index[j]];
            }
            long best_k = index[i];
            double best_val = std::numeric_limits<double>::infinity();
            VectorXd y(1), sigma(1);
            for (long k = 0; k < grids[i].size(); ++k) {
                y[0] = grids[i][k];
                sigma[0] = w * y[0] + fixed_part;
                double val = game.cost(i, y, sigma);
                if (val < best_val) {
                    best_val = val;
                    best_k = k;
                }
            }
            if (best_k != index[i]) changed = true;
            index[i] = best_k;
        }
        if (!changed) {
            std::vector<VectorXd> profile;
            for (int i = 0; i < n_agents; ++i) {
                VectorXd x(1);
                x[0] = grids[i][index[i]];
                profile.push_back(x);
            }
            return profile;
        }
        if (!seen.insert(index).second) {
            throw NonConvergenceError(
                "brute_force_nash: best-response cycle, no pure grid equilibrium");
        }
    }
    throw NonConvergenceError("brute_force_nash: sweep limit reached");
}

std::pair<double, double> corollary1_pieces(const Network& net, int nu) {
    SpectralReport report = net.certify();
    if (!report.symmetric || !report.doubly_stochastic || !report.primitive) {
        throw std::invalid_argument(
            "corollary1_pieces: network must be symmetric, doubly stochastic "
            "and primitive");
    }
    double first = net.consensus_error(nu);
    double second = std::sqrt(double(net.size())) * std::pow(report.mu, nu);
    if (first > second + 1e-9) {
        throw std::logic_error("corollary1_pieces: spectral bound violated");
    }
    return {first, second};
}

}  // namespace nag
