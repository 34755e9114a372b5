#pragma once

// Covariance model of D flat band-limited sources plus band-limited noise,
// sampled at the noise Nyquist rate and observed in windows of M samples.
//
// All frequencies are dimensionless ratios to the noise half-bandwidth
// Omega_0. Omega_0 is fixed to pi internally so that Omega_0/pi = 1 and a
// source's factor Omega_d/pi equals its relative bandwidth.
//
// Source indices are zero-based throughout the library.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace binspec {

struct Scenario {
    std::vector<double> omega_bar;      // center frequencies / Omega_0, in [0, 1]
    std::vector<double> bandwidth_bar;  // half-bandwidths / Omega_0, in (0, 1]
    double sampler_ratio = 1.0;         // Omega_AD / Omega_0; only 1 is supported
    std::size_t M = 0;                  // samples per window

    std::size_t sources() const { return omega_bar.size(); }
    std::size_t pair_count() const { return M * (M - 1) / 2; }

    /// Throws ValidationError naming the first violated invariant.
    void validate() const;
};

double db_to_linear(double db);
double linear_to_db(double value);

/// Spectral power levels [theta_1 ... theta_D, theta_0], linear units, all > 0.
class ParamVector {
public:
    explicit ParamVector(std::vector<double> source_powers, double noise_power = 1.0);

    static ParamVector from_db(std::span<const double> source_db, double noise_power = 1.0);
    static ParamVector from_vector(const Eigen::VectorXd& source_powers, double noise_power = 1.0);

    std::size_t sources() const { return src_.size(); }
    double source(std::size_t d) const { return src_.at(d); }
    double noise() const { return noise_; }
    const std::vector<double>& source_powers() const { return src_; }

    Eigen::VectorXd source_vector() const;
    std::vector<double> source_db() const;

    /// All powers (sources and noise) multiplied by c > 0.
    ParamVector scaled(double c) const;
    ParamVector with_source(std::size_t d, double value) const;

    bool operator==(const ParamVector&) const = default;

private:
    std::vector<double> src_;
    double noise_;
};

/// Normalized sinc, sin(pi x)/(pi x) with sinc(0) = 1.
double sinc(double x);

Eigen::MatrixXd build_source_corr(const Scenario& scn, std::size_t d);
Eigen::MatrixXd build_mixing(const Scenario& scn, std::size_t d);
Eigen::MatrixXd build_noise_corr(const Scenario& scn);

/// Sum_d theta_d (Omega_d/pi) Sigma_d .* W_d + theta_0 (Omega_0/pi) Sigma_0.
Eigen::MatrixXd build_ry(const Scenario& scn, const ParamVector& theta);

/// R_y normalized by its (shared) diagonal; unit diagonal.
Eigen::MatrixXd build_sigma_y(const Scenario& scn, const ParamVector& theta);

/// Derivative of Sigma_y with respect to theta_d (zero-based d). Zero diagonal.
Eigen::MatrixXd dsigma_y_dtheta(const Scenario& scn, const ParamVector& theta, std::size_t d);

/// Everything above for one (scenario, theta), built once.
struct ModelMatrices {
    std::vector<Eigen::MatrixXd> sigma_src;  // Sigma_d
    std::vector<Eigen::MatrixXd> mixing;     // W_d
    Eigen::MatrixXd sigma_noise;             // Sigma_0
    Eigen::MatrixXd ry;
    Eigen::MatrixXd sigma_y;
    std::vector<Eigen::MatrixXd> dsigma_y;   // d Sigma_y / d theta_d
    std::vector<Eigen::MatrixXd> dry;        // d R_y / d theta_d

    static ModelMatrices build(const Scenario& scn, const ParamVector& theta);
};

/// FNV-1a over the canonical field values; used to key on-disk caches.
std::uint64_t scenario_hash(const Scenario& scn);
std::uint64_t theta_hash(const ParamVector& theta);

}  // namespace binspec
