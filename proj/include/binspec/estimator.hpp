#pragma once

// Fisher-scoring estimators of the source powers with back-projection onto
// theta >= floor. The hard-limited estimator matches the reduced statistics
// (pairwise sign products) under the auxiliary quadratic model; the ideal
// estimator is Gaussian maximum likelihood on unquantized windows. theta_0 is
// known and equal to 1 in both.

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "binspec/auxstats.hpp"
#include "binspec/model.hpp"

namespace binspec {

struct ScoringConfig {
    int iterations = 5;
    double floor = 1e-3;              // theta_Delta, linear (-30 dB)
    std::vector<double> theta_init;   // empty: every source starts at the floor
    bool log = false;                 // per-iteration trace on std::clog
    /// Reuse the reduced-statistics covariance from the initial iterate for
    /// all later iterations. Faster, not the plain scoring rule.
    bool freeze_cov = false;

    std::vector<double> initial(std::size_t D) const;
    void validate(std::size_t D) const;
};

using Trajectory = std::vector<ParamVector>;

/// Scoring update (J^T R^{-1} J)^{-1} J^T R^{-1} (mu_emp - mu) from the
/// moments at the current iterate.
Eigen::VectorXd scoring_step_quant(const AuxMoments& aux, const Eigen::VectorXd& mu_emp);
Eigen::VectorXd scoring_step_quant(const Scenario& scn, const ParamVector& theta_hat,
                                   const Eigen::VectorXd& mu_emp);

/// Iterates theta^(0) ... theta^(I) from hard-limited windows (rows of Z).
Trajectory estimate_quant(const Scenario& scn, const SignMatrix& Z, const ScoringConfig& cfg);
/// Same, from precomputed empirical mean statistics.
Trajectory estimate_quant_from_mean(const Scenario& scn, const Eigen::VectorXd& mu_emp,
                                    const ScoringConfig& cfg);

/// (1/N) Y^T Y for N windows stored as rows.
Eigen::MatrixXd empirical_second_moment(const Eigen::MatrixXd& Y);

/// Per-window Gaussian scoring update F^{-1} s / N.
Eigen::VectorXd scoring_step_ideal(const Scenario& scn, const ParamVector& theta_hat,
                                   const Eigen::MatrixXd& s_hat);

Trajectory estimate_ideal(const Scenario& scn, const Eigen::MatrixXd& Y, const ScoringConfig& cfg);
Trajectory estimate_ideal_from_moment(const Scenario& scn, const Eigen::MatrixXd& s_hat,
                                      const ScoringConfig& cfg);

}  // namespace binspec
