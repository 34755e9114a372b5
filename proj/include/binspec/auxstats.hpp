#pragma once

// Reduced sufficient statistics of hard-limited windows: the pairwise sign
// products z_i z_j for i < j, their mean under the model, its Jacobian in the
// source powers and their covariance.
//
// Pair order is row-major over the strict upper triangle:
// (0,1), (0,2), ..., (0,M-1), (1,2), ...

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "binspec/model.hpp"
#include "binspec/quadrature.hpp"

namespace binspec {

using SignMatrix = Eigen::Matrix<std::int8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

class PairIndex {
public:
    explicit PairIndex(std::size_t M);

    std::size_t window() const { return M_; }
    std::size_t size() const { return pairs_.size(); }
    /// Position of the unordered pair {i, j}, i != j.
    std::size_t position(std::size_t i, std::size_t j) const;
    std::pair<std::size_t, std::size_t> pair(std::size_t c) const { return pairs_.at(c); }

private:
    std::size_t M_;
    std::vector<std::pair<std::size_t, std::size_t>> pairs_;
};

/// Sign products of one window in canonical pair order. Entries must be +-1.
std::vector<std::int8_t> reduce_stats(std::span<const std::int8_t> z);

/// (1/N) sum_n reduce_stats(z_n) over the rows of Z. Accumulated as exact
/// integer counts, so the result does not depend on summation order.
Eigen::VectorXd empirical_mean_stats(const SignMatrix& Z);

std::size_t binomial(std::size_t n, std::size_t k);

/// Fourth sign moments E[z_i z_j z_k z_l] for every 4-subset of distinct
/// window indices, stored in colex rank order.
///
/// On-disk cache format (all integers little-endian, version 1):
///   bytes 0..7    magic "BSM4TBL\0"
///   u32           format version (1)
///   u32           window length M
///   u64           scenario hash (scenario_hash)
///   u64           parameter hash (theta_hash)
///   u64           entry count, must equal binomial(M, 4)
///   f64 x count   moments in colex rank order
class FourthMomentTable {
public:
    static constexpr std::uint32_t kFormatVersion = 1;

    /// Evaluates every 4-subset of the correlation matrix (in parallel).
    /// A quadrature failure is rethrown naming the offending index set.
    static FourthMomentTable compute(const Eigen::MatrixXd& sigma_y,
                                     const QuadratureOptions& opt = {});

    std::size_t window() const { return M_; }
    std::size_t size() const { return values_.size(); }
    /// Number of four-variate quadratures run while building (0 when loaded).
    std::size_t evaluations() const { return evaluations_; }

    /// Moment for four distinct indices in any order.
    double operator()(std::size_t i, std::size_t j, std::size_t k, std::size_t l) const;
    static std::size_t rank(std::size_t a, std::size_t b, std::size_t c, std::size_t d);

    void save(const std::filesystem::path& path, std::uint64_t scenario_key,
              std::uint64_t theta_key) const;
    /// Throws ValidationError on a malformed file or, when given, key mismatch.
    static FourthMomentTable load(const std::filesystem::path& path,
                                  std::optional<std::uint64_t> scenario_key = std::nullopt,
                                  std::optional<std::uint64_t> theta_key = std::nullopt);

    std::uint64_t scenario_key() const { return scenario_key_; }
    std::uint64_t theta_key() const { return theta_key_; }

private:
    std::size_t M_ = 0;
    std::vector<double> values_;
    std::size_t evaluations_ = 0;
    std::uint64_t scenario_key_ = 0;
    std::uint64_t theta_key_ = 0;
};

struct AuxMoments {
    Eigen::VectorXd mu;   // C~ mean sign products
    Eigen::MatrixXd jac;  // C~ x D derivative of mu in the source powers
    Eigen::MatrixXd cov;  // C~ x C~ covariance; empty when not requested
    std::size_t clamped = 0;  // pairs whose |Sigma_y| hit the correlation clamp
};

struct AuxOptions {
    bool with_cov = true;
    QuadratureOptions quadrature{};
    /// Precomputed fourth moments for exactly this (scenario, theta); optional.
    const FourthMomentTable* table = nullptr;
};

/// Requires theta_0 = 1.
AuxMoments compute_aux_moments(const Scenario& scn, const ParamVector& theta,
                               const AuxOptions& opt = {});

Eigen::VectorXd mean_stats(const Scenario& scn, const ParamVector& theta);
Eigen::MatrixXd jac_mean_stats(const Scenario& scn, const ParamVector& theta);
Eigen::MatrixXd cov_stats(const Scenario& scn, const ParamVector& theta);

/// Covariance of the reduced statistics from a correlation matrix and its
/// fourth-moment table. Shared-index entries use z_j^2 = 1 and the arcsine law.
Eigen::MatrixXd assemble_cov(const Eigen::MatrixXd& sigma_y, const FourthMomentTable& table);

}  // namespace binspec
