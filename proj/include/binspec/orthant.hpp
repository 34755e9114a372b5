#pragma once

// Sign moments and orthant probabilities of zero-mean, unit-variance Gaussian
// vectors of dimension two to four.
//
// The four-variate quantities are computed by Plackett's reduction along the
// straight path t*R, 0 <= t <= 1, from the independence point. Differentiating
// a Gaussian expectation with respect to a correlation rho_ij is the same as
// differentiating the integrand with respect to x_i and x_j; for sign
// functions that collapses to the bivariate density at the origin times a
// conditional expectation of the remaining pair, which has a closed form. The
// result is one smooth 1-D integral per evaluation.

#include <array>
#include <cstdint>

#include <Eigen/Dense>

#include "binspec/quadrature.hpp"

namespace binspec {

/// Pairwise correlations of four coordinates, ordered (12, 13, 14, 23, 24, 34).
/// The implied 4x4 matrix must be positive semidefinite (eigenvalue tolerance -1e-10).
class CorrSubset {
public:
    explicit CorrSubset(const std::array<double, 6>& rho);

    static CorrSubset from_matrix(const Eigen::Matrix4d& corr);
    static CorrSubset equicorrelated(double rho);

    /// Correlation of coordinates i != j, zero-based.
    double operator()(int i, int j) const;
    const std::array<double, 6>& rho() const { return rho_; }
    Eigen::Matrix4d matrix() const;

    /// Correlations of (s_0 x_0, ..., s_3 x_3) for signs s_i in {-1, +1}.
    CorrSubset flipped(const std::array<int, 4>& signs) const;
    /// Coordinate k of the result is coordinate perm[k] of this subset.
    CorrSubset permuted(const std::array<int, 4>& perm) const;

    static int slot(int i, int j);

private:
    struct Unchecked {};
    CorrSubset(const std::array<double, 6>& rho, Unchecked) : rho_(rho) {}
    std::array<double, 6> rho_;
};

/// Correlations beyond this magnitude are clamped before arcsine and
/// 1/sqrt(1 - rho^2) evaluations.
inline constexpr double kCorrClamp = 1.0 - 1e-12;

double clamp_corr(double rho);

/// E[sgn(a) sgn(b)] = (2/pi) asin(rho). Throws ValidationError for |rho| > 1.
double arcsine_pair(double rho);

/// P(x_1 > 0, x_2 > 0, x_3 > 0) = 1/8 + (asin r12 + asin r13 + asin r23) / (4 pi).
double orthant3(double rho12, double rho13, double rho23);

/// P(x_1 > 0, ..., x_4 > 0), absolute error <= 1e-8.
double orthant4(const CorrSubset& c, const QuadratureOptions& opt = {});

/// E[sgn(x_1) sgn(x_2) sgn(x_3) sgn(x_4)] for four distinct coordinates.
///
/// Equal to 2 * sum over the eight sign patterns with s_1 = +1 of
/// (prod s) * orthant4(flipped). The eight Plackett integrands along the
/// shared path combine term by term into
///   d/dt E = sum_{i<j} rho_ij * (2/pi) / sqrt(1 - t^2 rho_ij^2)
///                    * (2/pi) asin(rho_{kl|ij}(t)),
/// so a single quadrature is carried out.
double sign_moment4(const CorrSubset& c, const QuadratureOptions& opt = {});

struct McEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
};

/// Plain Monte-Carlo estimate of sign_moment4 by Cholesky-factor sampling.
/// Requires n_samples >= 1e4; bit-reproducible for fixed (c, n_samples, seed).
McEstimate mc_sign_moment_oracle(const CorrSubset& c, std::uint64_t n_samples, std::uint64_t seed);

}  // namespace binspec
