#include "binspec/model.hpp"

#include <cmath>
#include <cstring>
#include <numbers>
#include <sstream>

#include "binspec/errors.hpp"

namespace binspec {

namespace {

void check_index(const Scenario& scn, std::size_t d) {
    if (d >= scn.sources()) {
        std::ostringstream msg;
        msg << "source index " << d << " out of range (D = " << scn.sources() << ")";
        throw ValidationError(msg.str());
    }
}

void check_theta(const Scenario& scn, const ParamVector& theta) {
    if (theta.sources() != scn.sources()) {
        std::ostringstream msg;
        msg << "parameter vector has " << theta.sources() << " source powers, scenario has "
            << scn.sources();
        throw ValidationError(msg.str());
    }
}

// Denominator of Sigma_y: the common diagonal of R_y.
double ry_diagonal(const Scenario& scn, const ParamVector& theta) {
    double total = theta.noise();
    for (std::size_t d = 0; d < scn.sources(); ++d) total += theta.source(d) * scn.bandwidth_bar[d];
    return total;
}

template <typename F>
Eigen::MatrixXd toeplitz(std::size_t M, F&& entry_at_lag) {
    Eigen::VectorXd lag(M);
    for (std::size_t k = 0; k < M; ++k) lag[k] = entry_at_lag(static_cast<double>(k));
    Eigen::MatrixXd out(M, M);
    for (std::size_t j = 0; j < M; ++j)
        for (std::size_t i = 0; i < M; ++i) out(i, j) = lag[i > j ? i - j : j - i];
    return out;
}

// Sigma_d .* W_d
Eigen::MatrixXd source_shape(const Scenario& scn, std::size_t d) {
    return build_source_corr(scn, d).cwiseProduct(build_mixing(scn, d));
}

struct Fnv1a {
    std::uint64_t h = 1469598103934665603ull;
    void bytes(const void* p, std::size_t n) {
        const auto* b = static_cast<const unsigned char*>(p);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= b[i];
            h *= 1099511628211ull;
        }
    }
    void f64(double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof bits);
        u64(bits);
    }
    void u64(std::uint64_t v) {
        unsigned char le[8];
        for (int i = 0; i < 8; ++i) le[i] = static_cast<unsigned char>(v >> (8 * i));
        bytes(le, 8);
    }
};

}  // namespace

void Scenario::validate() const {
    if (omega_bar.empty()) throw ValidationError("scenario needs at least one source (D >= 1)");
    if (bandwidth_bar.size() != omega_bar.size()) {
        std::ostringstream msg;
        msg << "bandwidth_bar has " << bandwidth_bar.size() << " entries, omega_bar has "
            << omega_bar.size();
        throw ValidationError(msg.str());
    }
    if (M < 2) throw ValidationError("window length M must be at least 2");
    for (std::size_t d = 0; d < omega_bar.size(); ++d) {
        if (!(omega_bar[d] >= 0.0 && omega_bar[d] <= 1.0)) {
            std::ostringstream msg;
            msg << "omega_bar[" << d << "] = " << omega_bar[d] << " outside [0, 1]";
            throw ValidationError(msg.str());
        }
        if (!(bandwidth_bar[d] > 0.0 && bandwidth_bar[d] <= 1.0)) {
            std::ostringstream msg;
            msg << "bandwidth_bar[" << d << "] = " << bandwidth_bar[d] << " outside (0, 1]";
            throw ValidationError(msg.str());
        }
    }
    if (sampler_ratio != 1.0) {
        std::ostringstream msg;
        msg << "sampler_ratio = " << sampler_ratio
            << " not supported: only Nyquist-rate sampling of the noise band (ratio 1) is "
               "implemented, oversampling is out of scope";
        throw ValidationError(msg.str());
    }
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double value) { return 10.0 * std::log10(value); }

ParamVector::ParamVector(std::vector<double> source_powers, double noise_power)
    : src_(std::move(source_powers)), noise_(noise_power) {
    for (std::size_t d = 0; d < src_.size(); ++d) {
        if (!(src_[d] > 0.0) || !std::isfinite(src_[d])) {
            std::ostringstream msg;
            msg << "source power theta[" << d << "] = " << src_[d] << " must be positive";
            throw ValidationError(msg.str());
        }
    }
    if (!(noise_ > 0.0) || !std::isfinite(noise_))
        throw ValidationError("noise power theta_0 must be positive");
}

ParamVector ParamVector::from_db(std::span<const double> source_db, double noise_power) {
    std::vector<double> lin;
    lin.reserve(source_db.size());
    for (double v : source_db) lin.push_back(db_to_linear(v));
    return ParamVector(std::move(lin), noise_power);
}

ParamVector ParamVector::from_vector(const Eigen::VectorXd& source_powers, double noise_power) {
    return ParamVector(std::vector<double>(source_powers.data(),
                                           source_powers.data() + source_powers.size()),
                       noise_power);
}

Eigen::VectorXd ParamVector::source_vector() const {
    return Eigen::Map<const Eigen::VectorXd>(src_.data(), static_cast<Eigen::Index>(src_.size()));
}

std::vector<double> ParamVector::source_db() const {
    std::vector<double> out;
    out.reserve(src_.size());
    for (double v : src_) out.push_back(linear_to_db(v));
    return out;
}

ParamVector ParamVector::scaled(double c) const {
    std::vector<double> s = src_;
    for (double& v : s) v *= c;
    return ParamVector(std::move(s), noise_ * c);
}

ParamVector ParamVector::with_source(std::size_t d, double value) const {
    std::vector<double> s = src_;
    s.at(d) = value;
    return ParamVector(std::move(s), noise_);
}

double sinc(double x) {
    if (x == 0.0) return 1.0;
    const double px = std::numbers::pi * x;
    return std::sin(px) / px;
}

Eigen::MatrixXd build_source_corr(const Scenario& scn, std::size_t d) {
    check_index(scn, d);
    const double rate = scn.bandwidth_bar[d] / scn.sampler_ratio;
    return toeplitz(scn.M, [&](double lag) {
        // sin(pi k) is not exactly zero in floating point
        const double x = rate * lag;
        if (x != 0.0 && x == std::floor(x)) return 0.0;
        return sinc(x);
    });
}

Eigen::MatrixXd build_mixing(const Scenario& scn, std::size_t d) {
    check_index(scn, d);
    const double rate = scn.omega_bar[d] / scn.sampler_ratio;
    return toeplitz(scn.M, [&](double lag) { return std::cos(rate * std::numbers::pi * lag); });
}

Eigen::MatrixXd build_noise_corr(const Scenario& scn) {
    const double rate = 1.0 / scn.sampler_ratio;
    return toeplitz(scn.M, [&](double lag) {
        const double x = rate * lag;
        if (x != 0.0 && x == std::floor(x)) return 0.0;
        return sinc(x);
    });
}

Eigen::MatrixXd build_ry(const Scenario& scn, const ParamVector& theta) {
    scn.validate();
    check_theta(scn, theta);
    Eigen::MatrixXd ry = theta.noise() * build_noise_corr(scn);
    for (std::size_t d = 0; d < scn.sources(); ++d)
        ry += theta.source(d) * scn.bandwidth_bar[d] * source_shape(scn, d);
    return ry;
}

Eigen::MatrixXd build_sigma_y(const Scenario& scn, const ParamVector& theta) {
    Eigen::MatrixXd sy = build_ry(scn, theta) / ry_diagonal(scn, theta);
    sy.diagonal().setOnes();
    return sy;
}

Eigen::MatrixXd dsigma_y_dtheta(const Scenario& scn, const ParamVector& theta, std::size_t d) {
    check_index(scn, d);
    const Eigen::MatrixXd sy = build_sigma_y(scn, theta);
    Eigen::MatrixXd out =
        scn.bandwidth_bar[d] * (source_shape(scn, d) - sy) / ry_diagonal(scn, theta);
    out.diagonal().setZero();
    return out;
}

ModelMatrices ModelMatrices::build(const Scenario& scn, const ParamVector& theta) {
    scn.validate();
    check_theta(scn, theta);
    ModelMatrices mm;
    const std::size_t D = scn.sources();
    const double denom = ry_diagonal(scn, theta);
    mm.sigma_noise = build_noise_corr(scn);
    mm.ry = theta.noise() * mm.sigma_noise;
    std::vector<Eigen::MatrixXd> shapes;
    for (std::size_t d = 0; d < D; ++d) {
        mm.sigma_src.push_back(build_source_corr(scn, d));
        mm.mixing.push_back(build_mixing(scn, d));
        shapes.push_back(mm.sigma_src.back().cwiseProduct(mm.mixing.back()));
        mm.dry.push_back(scn.bandwidth_bar[d] * shapes.back());
        mm.ry += theta.source(d) * mm.dry.back();
    }
    mm.sigma_y = mm.ry / denom;
    mm.sigma_y.diagonal().setOnes();
    for (std::size_t d = 0; d < D; ++d) {
        mm.dsigma_y.push_back(scn.bandwidth_bar[d] * (shapes[d] - mm.sigma_y) / denom);
        mm.dsigma_y.back().diagonal().setZero();
    }
    return mm;
}

std::uint64_t scenario_hash(const Scenario& scn) {
    Fnv1a h;
    h.u64(scn.sources());
    h.u64(scn.M);
    h.f64(scn.sampler_ratio);
    for (double v : scn.omega_bar) h.f64(v);
    for (double v : scn.bandwidth_bar) h.f64(v);
    return h.h;
}

std::uint64_t theta_hash(const ParamVector& theta) {
    Fnv1a h;
    h.u64(theta.sources());
    for (double v : theta.source_powers()) h.f64(v);
    h.f64(theta.noise());
    return h.h;
}

}  // namespace binspec
