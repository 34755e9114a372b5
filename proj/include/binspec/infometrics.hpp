#pragma once

#include <cstddef>

#include <Eigen/Dense>

#include "binspec/auxstats.hpp"
#include "binspec/model.hpp"

namespace binspec {

/// Conservative per-window Fisher matrix of hard-limited windows,
/// J^T R^{-1} J with J, R from the reduced statistics. Requires theta_0 = 1.
Eigen::MatrixXd fisher_quantized(const Scenario& scn, const ParamVector& theta,
                                 const AuxOptions& opt = {});
Eigen::MatrixXd fisher_quantized(const AuxMoments& aux);

enum class NoiseHandling {
    known,  // theta_0 fixed; D x D over the source powers
    joint,  // theta_0 estimated too; (D+1) x (D+1), last row/column is theta_0
};

/// Per-window Fisher matrix of the unquantized Gaussian windows,
/// [F]_ab = 1/2 tr(R^{-1} dR_a R^{-1} dR_b).
Eigen::MatrixXd fisher_ideal(const Scenario& scn, const ParamVector& theta,
                             NoiseHandling noise = NoiseHandling::known);

/// chi_d = [F_ideal^{-1}]_dd / [F_quant^{-1}]_dd over the first D parameters.
Eigen::VectorXd info_loss(const Eigen::MatrixXd& f_ideal, const Eigen::MatrixXd& f_quant);
Eigen::VectorXd info_loss(const Scenario& scn, const ParamVector& theta);

/// Predicted relative uncertainty (1/theta_d) sqrt([F^{-1}]_dd / N) for N windows.
Eigen::VectorXd predict_sigma(const Eigen::MatrixXd& fisher, const ParamVector& theta,
                              std::size_t N);

struct FisherReport {
    Eigen::MatrixXd f_quant;
    Eigen::MatrixXd f_ideal;
    Eigen::VectorXd loss;     // chi_d, linear
    Eigen::VectorXd loss_db;  // 10 log10 chi_d
    Eigen::VectorXd crb_sigma_quant;
    Eigen::VectorXd crb_sigma_ideal;
};

FisherReport fisher_report(const Scenario& scn, const ParamVector& theta, std::size_t N,
                           const AuxOptions& opt = {});

}  // namespace binspec
