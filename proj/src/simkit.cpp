#include "binspec/simkit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <omp.h>

#include "binspec/errors.hpp"
#include "binspec/linalg.hpp"
#include "binspec/rng.hpp"

namespace binspec {

Eigen::MatrixXd sample_windows(const Scenario& scn, const ParamVector& theta, std::size_t N,
                               std::uint64_t seed, std::uint64_t trial) {
    if (N < 1) throw ValidationError("sample_windows: N must be at least 1");
    const Eigen::MatrixXd ry = build_ry(scn, theta);
    const auto llt = factorize_spd(ry, "R_y");
    const Eigen::MatrixXd lower = llt.matrixL();

    const auto M = static_cast<Eigen::Index>(scn.M);
    Eigen::MatrixXd g(static_cast<Eigen::Index>(N), M);
    for (std::size_t n = 0; n < N; ++n) {
        NormalSource normal(derive_stream(seed, trial, n));
        for (Eigen::Index m = 0; m < M; ++m) g(static_cast<Eigen::Index>(n), m) = normal();
    }
    return g * lower.transpose();
}

SignMatrix hard_limit(const Eigen::MatrixXd& Y) {
    SignMatrix Z(Y.rows(), Y.cols());
    for (Eigen::Index j = 0; j < Y.cols(); ++j)
        for (Eigen::Index i = 0; i < Y.rows(); ++i) Z(i, j) = Y(i, j) >= 0.0 ? 1 : -1;
    return Z;
}

TrialBatch make_trial_batch(const Scenario& scn, const ParamVector& theta, std::size_t N,
                            std::uint64_t seed, std::uint64_t trial) {
    TrialBatch b;
    b.Z = hard_limit(sample_windows(scn, theta, N, seed, trial));
    b.mu_emp = empirical_mean_stats(b.Z);
    b.seed = seed;
    b.trial = trial;
    return b;
}

McReport summarize_trials(const std::vector<std::optional<Eigen::VectorXd>>& estimates,
                          const ParamVector& truth, McMode mode) {
    McReport r;
    r.mode = mode;
    r.K = estimates.size();
    const Eigen::VectorXd theta = truth.source_vector();
    const Eigen::Index D = theta.size();
    r.r_hat = Eigen::MatrixXd::Zero(D, D);
    std::size_t ok = 0;
    for (std::size_t k = 0; k < estimates.size(); ++k) {
        if (!estimates[k]) {
            ++r.failures;
            continue;
        }
        const Eigen::VectorXd err = *estimates[k] - theta;
        r.r_hat += err * err.transpose();
        r.trial_ids.push_back(k);
        r.estimates.push_back(*estimates[k]);
        ++ok;
    }
    if (ok > 0) r.r_hat /= static_cast<double>(ok);
    r.sigma_hat = r.r_hat.diagonal().cwiseSqrt().cwiseQuotient(theta);
    r.valid = ok > 0 && static_cast<double>(r.failures) <= 0.01 * static_cast<double>(r.K);
    return r;
}

McReport run_mc(const Scenario& scn, const ParamVector& theta_true, std::size_t N, std::size_t K,
                const ScoringConfig& cfg, std::uint64_t seed, McMode mode, const McOptions& opt) {
    if (K < 2) throw ValidationError("run_mc: K must be at least 2");
    if (N < 1) throw ValidationError("run_mc: N must be at least 1");
    scn.validate();
    cfg.validate(scn.sources());
    if (theta_true.noise() != 1.0) throw ValidationError("run_mc: theta_0 must be 1");

    std::vector<std::optional<Eigen::VectorXd>> finals(K);
    std::vector<std::string> messages(K);
    const auto top = static_cast<std::int64_t>(K);

#pragma omp parallel for schedule(dynamic, 1) num_threads(std::max(1, opt.threads))
    for (std::int64_t kk = 0; kk < top; ++kk) {
        const auto k = static_cast<std::size_t>(kk);
        try {
            const Eigen::MatrixXd Y = sample_windows(scn, theta_true, N, seed, k);
            Trajectory traj;
            if (mode == McMode::quantized) {
                traj = estimate_quant_from_mean(scn, empirical_mean_stats(hard_limit(Y)), cfg);
            } else {
                traj = estimate_ideal(scn, Y, cfg);
            }
            finals[k] = traj.back().source_vector();
        } catch (const Error& e) {
            messages[k] = "trial " + std::to_string(k) + ": " + e.what();
        }
    }

    McReport r = summarize_trials(finals, theta_true, mode);
    for (auto& m : messages)
        if (!m.empty()) r.failure_messages.push_back(std::move(m));
    if (!opt.keep_estimates) {
        r.estimates.clear();
        r.trial_ids.clear();
    }
    return r;
}

void write_report(const McReport& report, std::ostream& os) {
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    os << "mode " << (report.mode == McMode::quantized ? "quantized" : "ideal") << '\n';
    os << "K " << report.K << "\nfailures " << report.failures << "\nvalid " << report.valid << '\n';
    os << "r_hat";
    for (Eigen::Index i = 0; i < report.r_hat.size(); ++i) os << ' ' << num(report.r_hat.data()[i]);
    os << "\nsigma_hat";
    for (Eigen::Index i = 0; i < report.sigma_hat.size(); ++i) os << ' ' << num(report.sigma_hat[i]);
    os << '\n';
    for (std::size_t t = 0; t < report.estimates.size(); ++t) {
        os << "trial " << report.trial_ids[t];
        for (Eigen::Index d = 0; d < report.estimates[t].size(); ++d)
            os << ' ' << num(report.estimates[t][d]);
        os << '\n';
    }
    for (const auto& m : report.failure_messages) os << "failure " << m << '\n';
}

void write_trial_csv(const McReport& report, std::ostream& os) {
    const Eigen::Index D = report.sigma_hat.size();
    os << "trial";
    for (Eigen::Index d = 0; d < D; ++d) os << ",theta_hat_" << (d + 1);
    os << '\n';
    char buf[64];
    for (std::size_t t = 0; t < report.estimates.size(); ++t) {
        os << report.trial_ids[t];
        for (Eigen::Index d = 0; d < report.estimates[t].size(); ++d) {
            std::snprintf(buf, sizeof buf, "%.9g", report.estimates[t][d]);
            os << ',' << buf;
        }
        os << '\n';
    }
}

}  // namespace binspec
