#pragma once

// Synthetic data and Monte-Carlo trials. Window n of trial k is drawn from
// its own random stream derived from (seed, k, n), so every output is fixed
// by the inputs regardless of thread count or schedule.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "binspec/auxstats.hpp"
#include "binspec/estimator.hpp"
#include "binspec/model.hpp"

namespace binspec {

/// N x M zero-mean Gaussian windows with covariance R_y(theta), y = L g.
Eigen::MatrixXd sample_windows(const Scenario& scn, const ParamVector& theta, std::size_t N,
                               std::uint64_t seed, std::uint64_t trial = 0);

/// Elementwise hard limiter, +1 for y >= 0 and -1 otherwise.
SignMatrix hard_limit(const Eigen::MatrixXd& Y);

struct TrialBatch {
    SignMatrix Z;
    Eigen::VectorXd mu_emp;
    std::uint64_t seed = 0;
    std::uint64_t trial = 0;
};

TrialBatch make_trial_batch(const Scenario& scn, const ParamVector& theta, std::size_t N,
                            std::uint64_t seed, std::uint64_t trial);

enum class McMode { quantized, ideal };

struct McReport {
    McMode mode = McMode::quantized;
    std::size_t K = 0;          // trials requested
    std::size_t failures = 0;   // trials whose estimator aborted (excluded below)
    bool valid = false;         // at most 1% of trials failed
    Eigen::MatrixXd r_hat;      // empirical error covariance over successful trials
    Eigen::VectorXd sigma_hat;  // (1/theta_d) sqrt([r_hat]_dd)
    std::vector<std::size_t> trial_ids;     // successful trials, ascending
    std::vector<Eigen::VectorXd> estimates; // final iterates, same order (kept on request)
    std::vector<std::string> failure_messages;
};

struct McOptions {
    int threads = 1;
    bool keep_estimates = false;
};

/// Aggregates per-trial final iterates (nullopt marks a failed trial).
McReport summarize_trials(const std::vector<std::optional<Eigen::VectorXd>>& estimates,
                          const ParamVector& truth, McMode mode = McMode::quantized);

/// K >= 2 independent trials of N windows each, estimated in the given mode.
McReport run_mc(const Scenario& scn, const ParamVector& theta_true, std::size_t N, std::size_t K,
                const ScoringConfig& cfg, std::uint64_t seed, McMode mode,
                const McOptions& opt = {});

/// Full-precision text form of a report (for byte comparisons and archiving).
void write_report(const McReport& report, std::ostream& os);

/// Raw estimates as CSV: trial, theta_hat_1 ... theta_hat_D.
void write_trial_csv(const McReport& report, std::ostream& os);

}  // namespace binspec
