// SPDX-License-Identifier: Apache-2.0
#include "nag/iterations.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace nag {

namespace {

double mix_weight(const FeedbackScheme& scheme, long k) {
    if (std::holds_alternative<PicardBanach>(scheme)) return 1.0;
    if (const auto* kr = std::get_if<Krasnoselskij>(&scheme)) {
        if (kr->lambda <= 0.0 || kr->lambda >= 1.0) {
            throw std::invalid_argument("Krasnoselskij: lambda must be in (0,1)");
        }
        return kr->lambda;
    }
    const auto& mann = std::get<Mann>(scheme);
    double a = mann.alpha(k);
    if (a <= 0.0 || a > 1.0) {
        throw std::invalid_argument("Mann: alpha_k must be in (0,1]");
    }
    return a;
}

}  // namespace

StackedSignal step(const GameSpec& game, const FeedbackScheme& scheme,
                   SplitCounts split, const StackedSignal& z, long k) {
    StackedSignal aggregated = game.aggregate(z, split.nu1, split.nu2);
    double w = mix_weight(scheme, k);
    if (w == 1.0) return aggregated;
    return (1.0 - w) * z + w * aggregated;
}

RunResult run(const GameSpec& game, const FeedbackScheme& scheme,
              SplitCounts split, const StoppingRule& stop, StackedSignal z0,
              bool record_trajectory) {
    if (split.nu1 + split.nu2 != game.nu()) {
        throw std::invalid_argument("run: nu1 + nu2 must equal the game's nu");
    }
    if (stop.tol <= 0.0) throw std::invalid_argument("run: tol must be > 0");

    const long k0 = std::holds_alternative<Mann>(scheme)
                        ? std::get<Mann>(scheme).k0
                        : 1;
    RunResult result;
    if (record_trajectory) {
        result.trajectory.emplace();
        result.trajectory->push_back(z0);
    }
    StackedSignal z = std::move(z0);
    for (long iter = 1; iter <= stop.max_iter; ++iter) {
        StackedSignal next = step(game, scheme, split, z, k0 + iter - 1);
        double residual;
        if (stop.kind == ResidualKind::SignalDelta) {
            residual = (next - z).cwiseAbs().maxCoeff();
        } else {
            StackedSignal a = game.mix(next, split.nu1);
            residual =
                (game.aggregate(a, 0, game.nu()) - a).cwiseAbs().maxCoeff();
        }
        z = std::move(next);
        result.residual_history.push_back(residual);
        if (record_trajectory) result.trajectory->push_back(z);
        result.iterations = iter;
        if (residual <= stop.tol) {
            result.converged = true;
            break;
        }
    }
    result.final_z = z;
    StackedSignal played = game.stacked_response(game.mix(z, split.nu1));
    for (int i = 0; i < game.population(); ++i) {
        result.final_strategies.emplace_back(
            played.segment(i * game.n(), game.n()));
    }
    return result;
}

StackedSignal sample_stacked(const GameSpec& game, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Box box = game.stacked_bounding_box();
    StackedSignal z(box.lo.size());
    for (Eigen::Index k = 0; k < z.size(); ++k) {
        z[k] = box.lo[k] + (box.hi[k] - box.lo[k]) * unit(rng);
    }
    return z;
}

namespace {

// ||v||_{I kron S}^2 for a stacked vector of n-dimensional blocks.
double stacked_quad(const VectorXd& v, const MatrixXd& s, int n) {
    double total = 0.0;
    for (Eigen::Index i = 0; i + n <= v.size(); i += n) {
        total += v.segment(i, n).dot(s * v.segment(i, n));
    }
    return total;
}

bool positive_definite(const MatrixXd& s) {
    if ((s - s.transpose()).cwiseAbs().maxCoeff() > 1e-12) return false;
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (s + s.transpose()),
                                               Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff() > 0.0;
}

}  // namespace

RegularityReport certify_regularity(const GameSpec& game, SplitCounts split,
                                    int n_samples, std::uint64_t seed) {
    if (n_samples < 1) {
        throw std::invalid_argument("certify_regularity: n_samples < 1");
    }
    const int n = game.n();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const MatrixXd q_metric = game.costs().Q.matrix();
    const MatrixXd neg_c = -game.costs().C;
    const MatrixXd pos_c = game.costs().C;
    const bool has_neg_c = positive_definite(neg_c);
    const bool has_pos_c = positive_definite(pos_c);

    RegularityReport report;
    report.ne_margin = std::numeric_limits<double>::infinity();
    report.fne_margin =
        has_neg_c ? std::numeric_limits<double>::infinity() : nan;
    report.mon_margin =
        has_pos_c ? std::numeric_limits<double>::infinity() : nan;
    report.spc_rho = has_pos_c ? -std::numeric_limits<double>::infinity() : nan;
    report.samples = n_samples;

    std::mt19937_64 seeder(seed);
    for (int sample = 0; sample < n_samples; ++sample) {
        StackedSignal r = sample_stacked(game, seeder());
        StackedSignal s = sample_stacked(game, seeder());
        StackedSignal fr = game.aggregate(r, split.nu1, split.nu2);
        StackedSignal fs = game.aggregate(s, split.nu1, split.nu2);
        VectorXd df = fr - fs;
        VectorXd dz = r - s;

        double df_q = std::sqrt(std::max(0.0, stacked_quad(df, q_metric, n)));
        double dz_q = std::sqrt(std::max(0.0, stacked_quad(dz, q_metric, n)));
        if (dz_q > 1e-12) {
            report.contraction_factor =
                std::max(report.contraction_factor, df_q / dz_q);
        }
        report.ne_margin = std::min(report.ne_margin, dz_q - df_q);

        if (has_neg_c) {
            double cross = 0.0;
            for (Eigen::Index i = 0; i + n <= dz.size(); i += n) {
                cross += dz.segment(i, n).dot(neg_c * df.segment(i, n));
            }
            report.fne_margin = std::min(
                report.fne_margin, cross - stacked_quad(df, neg_c, n));
        }
        if (has_pos_c) {
            double cross = 0.0;
            for (Eigen::Index i = 0; i + n <= dz.size(); i += n) {
                cross += dz.segment(i, n).dot(pos_c * df.segment(i, n));
            }
            report.mon_margin = std::min(report.mon_margin, -cross);
            double num = stacked_quad(df, pos_c, n) - stacked_quad(dz, pos_c, n);
            double den = stacked_quad(df - dz, pos_c, n);
            if (den > 1e-12) {
                report.spc_rho = std::max(report.spc_rho, num / den);
            }
        }
    }
    return report;
}

}  // namespace nag
