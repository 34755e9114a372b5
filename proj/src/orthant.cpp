#include "binspec/orthant.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "binspec/errors.hpp"
#include "binspec/rng.hpp"

namespace binspec {

namespace {

constexpr double kPi = std::numbers::pi;

// The six (i, j | k, l) splits of four coordinates, in CorrSubset slot order.
struct Split {
    int i, j, k, l;
};
constexpr std::array<Split, 6> kSplits = {{
    {0, 1, 2, 3}, {0, 2, 1, 3}, {0, 3, 1, 2}, {1, 2, 0, 3}, {1, 3, 0, 2}, {2, 3, 0, 1},
}};

// Correlation of (x_k, x_l) given x_i = x_j = 0 under the matrix t*R.
double conditional_corr(const CorrSubset& c, const Split& s, double t) {
    const double r = t * c(s.i, s.j);
    const double a = t * c(s.i, s.k), b = t * c(s.j, s.k);
    const double p = t * c(s.i, s.l), q = t * c(s.j, s.l);
    const double f = t * c(s.k, s.l);
    const double one_r2 = 1.0 - r * r;
    const double vk = one_r2 - a * a + 2.0 * r * a * b - b * b;
    const double vl = one_r2 - p * p + 2.0 * r * p * q - q * q;
    const double ckl = f * one_r2 - (a * p - r * (a * q + b * p) + b * q);
    if (vk <= 0.0 || vl <= 0.0) {
        // Conditional variance collapsed; the sign of the covariance decides.
        return ckl > 0.0 ? 1.0 : (ckl < 0.0 ? -1.0 : 0.0);
    }
    return std::clamp(ckl / std::sqrt(vk * vl), -1.0, 1.0);
}

// Integrates g(t) over [0, 1] after t = 1 - (1 - s)^2, which removes the
// 1/sqrt(1 - t) endpoint singularity that appears as |rho_ij| -> 1.
template <typename G>
QuadratureResult integrate_path(G&& g, const QuadratureOptions& opt) {
    return integrate_adaptive(
        [&](double s) {
            const double u = 1.0 - s;
            return g(1.0 - u * u) * 2.0 * u;
        },
        0.0, 1.0, opt);
}

std::array<double, 6> clamped(const CorrSubset& c) {
    std::array<double, 6> out{};
    for (int k = 0; k < 6; ++k) out[k] = clamp_corr(c.rho()[k]);
    return out;
}

}  // namespace

int CorrSubset::slot(int i, int j) {
    if (i > j) std::swap(i, j);
    static constexpr int table[4][4] = {{-1, 0, 1, 2}, {0, -1, 3, 4}, {1, 3, -1, 5}, {2, 4, 5, -1}};
    if (i < 0 || j > 3 || i == j) throw ValidationError("CorrSubset: invalid coordinate pair");
    return table[i][j];
}

CorrSubset::CorrSubset(const std::array<double, 6>& rho) : rho_(rho) {
    for (double v : rho_) {
        if (!std::isfinite(v) || std::abs(v) > 1.0)
            throw ValidationError("CorrSubset: correlation outside [-1, 1]");
    }
    const Eigen::Matrix4d m = matrix();
    if (Eigen::LLT<Eigen::Matrix4d>(m).info() == Eigen::Success) return;
    const double min_eig = Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d>(m).eigenvalues()[0];
    if (min_eig < -1e-10) {
        std::ostringstream msg;
        msg << "CorrSubset: correlation matrix is indefinite (smallest eigenvalue " << min_eig
            << ")";
        throw ValidationError(msg.str());
    }
}

CorrSubset CorrSubset::from_matrix(const Eigen::Matrix4d& corr) {
    return CorrSubset({corr(0, 1), corr(0, 2), corr(0, 3), corr(1, 2), corr(1, 3), corr(2, 3)});
}

CorrSubset CorrSubset::equicorrelated(double rho) {
    return CorrSubset({rho, rho, rho, rho, rho, rho});
}

double CorrSubset::operator()(int i, int j) const { return rho_[slot(i, j)]; }

Eigen::Matrix4d CorrSubset::matrix() const {
    Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) m(i, j) = m(j, i) = rho_[slot(i, j)];
    return m;
}

CorrSubset CorrSubset::flipped(const std::array<int, 4>& signs) const {
    std::array<double, 6> out{};
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) out[slot(i, j)] = signs[i] * signs[j] * rho_[slot(i, j)];
    return CorrSubset(out, Unchecked{});
}

CorrSubset CorrSubset::permuted(const std::array<int, 4>& perm) const {
    std::array<double, 6> out{};
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) out[slot(i, j)] = rho_[slot(perm[i], perm[j])];
    return CorrSubset(out, Unchecked{});
}

double clamp_corr(double rho) { return std::clamp(rho, -kCorrClamp, kCorrClamp); }

double arcsine_pair(double rho) {
    if (!(std::abs(rho) <= 1.0)) {
        std::ostringstream msg;
        msg << "arcsine_pair: |rho| = " << std::abs(rho) << " exceeds 1";
        throw ValidationError(msg.str());
    }
    return 2.0 / kPi * std::asin(rho);
}

double orthant3(double rho12, double rho13, double rho23) {
    Eigen::Matrix3d m;
    m << 1.0, rho12, rho13, rho12, 1.0, rho23, rho13, rho23, 1.0;
    if (std::abs(rho12) > 1.0 || std::abs(rho13) > 1.0 || std::abs(rho23) > 1.0 ||
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(m).eigenvalues()[0] < -1e-10)
        throw ValidationError("orthant3: invalid correlation matrix");
    return 0.125 + (std::asin(rho12) + std::asin(rho13) + std::asin(rho23)) / (4.0 * kPi);
}

double orthant4(const CorrSubset& c, const QuadratureOptions& opt) {
    const auto rho = clamped(c);
    auto dp_dt = [&](double t) {
        double sum = 0.0;
        for (int s = 0; s < 6; ++s) {
            const double r = rho[s];
            if (r == 0.0) continue;
            const double density = r / (2.0 * kPi * std::sqrt(1.0 - t * t * r * r));
            const double cond = conditional_corr(c, kSplits[s], t);
            sum += density * (0.25 + std::asin(cond) / (2.0 * kPi));
        }
        return sum;
    };
    return 1.0 / 16.0 + integrate_path(dp_dt, opt).value;
}

double sign_moment4(const CorrSubset& c, const QuadratureOptions& opt) {
    const auto rho = clamped(c);
    constexpr double kScale = 4.0 / (kPi * kPi);
    auto de_dt = [&](double t) {
        double sum = 0.0;
        for (int s = 0; s < 6; ++s) {
            const double r = rho[s];
            if (r == 0.0) continue;
            const double cond = conditional_corr(c, kSplits[s], t);
            sum += r / std::sqrt(1.0 - t * t * r * r) * std::asin(cond);
        }
        return kScale * sum;
    };
    return integrate_path(de_dt, opt).value;
}

McEstimate mc_sign_moment_oracle(const CorrSubset& c, std::uint64_t n_samples, std::uint64_t seed) {
    if (n_samples < 10000) throw ValidationError("mc_sign_moment_oracle: n_samples must be >= 1e4");
    const Eigen::Matrix4d m = c.matrix();
    Eigen::Matrix4d factor;
    Eigen::LLT<Eigen::Matrix4d> llt(m);
    if (llt.info() == Eigen::Success) {
        factor = llt.matrixL();
    } else {
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(m);
        factor = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
    }
    NormalSource normal(derive_stream(seed, 0x6f7274ull));
    std::int64_t sum = 0;
    for (std::uint64_t n = 0; n < n_samples; ++n) {
        Eigen::Vector4d g;
        for (int k = 0; k < 4; ++k) g[k] = normal();
        const Eigen::Vector4d x = factor * g;
        int sign = 1;
        for (int k = 0; k < 4; ++k)
            if (x[k] < 0.0) sign = -sign;
        sum += sign;
    }
    const double mean = static_cast<double>(sum) / static_cast<double>(n_samples);
    return {mean, std::sqrt(std::max(0.0, 1.0 - mean * mean) / static_cast<double>(n_samples))};
}

}  // namespace binspec
