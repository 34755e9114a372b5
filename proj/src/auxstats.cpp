#include "binspec/auxstats.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

#include <omp.h>

#include "binspec/errors.hpp"
#include "binspec/orthant.hpp"

namespace binspec {

namespace {

constexpr char kMagic[8] = {'B', 'S', 'M', '4', 'T', 'B', 'L', '\0'};

void put_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 4);
}

void put_u64(std::ostream& os, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 8);
}

template <typename T>
T get_le(std::istream& is) {
    unsigned char b[sizeof(T)];
    if (!is.read(reinterpret_cast<char*>(b), sizeof(T)))
        throw ValidationError("fourth-moment cache: truncated file");
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(b[i]) << (8 * i);
    return v;
}

void require_unit_noise(const ParamVector& theta) {
    if (theta.noise() != 1.0)
        throw ValidationError("quantized-domain computations require theta_0 = 1");
}

}  // namespace

PairIndex::PairIndex(std::size_t M) : M_(M) {
    if (M < 2) throw ValidationError("PairIndex: window length must be at least 2");
    pairs_.reserve(M * (M - 1) / 2);
    for (std::size_t i = 0; i < M; ++i)
        for (std::size_t j = i + 1; j < M; ++j) pairs_.emplace_back(i, j);
}

std::size_t PairIndex::position(std::size_t i, std::size_t j) const {
    if (i > j) std::swap(i, j);
    if (i == j || j >= M_) throw ValidationError("PairIndex: invalid pair");
    return i * M_ - i * (i + 1) / 2 + (j - i - 1);
}

std::vector<std::int8_t> reduce_stats(std::span<const std::int8_t> z) {
    for (std::int8_t v : z)
        if (v != 1 && v != -1) throw ValidationError("reduce_stats: entries must be +1 or -1");
    std::vector<std::int8_t> out;
    out.reserve(z.size() * (z.size() - 1) / 2);
    for (std::size_t i = 0; i < z.size(); ++i)
        for (std::size_t j = i + 1; j < z.size(); ++j)
            out.push_back(static_cast<std::int8_t>(z[i] * z[j]));
    return out;
}

Eigen::VectorXd empirical_mean_stats(const SignMatrix& Z) {
    const auto N = Z.rows();
    const auto M = static_cast<std::size_t>(Z.cols());
    if (N < 1) throw ValidationError("empirical_mean_stats: need at least one window");
    for (Eigen::Index k = 0; k < Z.size(); ++k) {
        const auto v = Z.data()[k];
        if (v != 1 && v != -1) throw ValidationError("empirical_mean_stats: data must be +1 or -1");
    }
    const std::size_t C = M * (M - 1) / 2;
    std::vector<std::int64_t> counts(C, 0);
    for (Eigen::Index n = 0; n < N; ++n) {
        const std::int8_t* z = Z.row(n).data();
        std::size_t c = 0;
        for (std::size_t i = 0; i < M; ++i)
            for (std::size_t j = i + 1; j < M; ++j) counts[c++] += z[i] * z[j];
    }
    Eigen::VectorXd mu(static_cast<Eigen::Index>(C));
    for (std::size_t c = 0; c < C; ++c)
        mu[static_cast<Eigen::Index>(c)] = static_cast<double>(counts[c]) / static_cast<double>(N);
    return mu;
}

std::size_t binomial(std::size_t n, std::size_t k) {
    if (k > n) return 0;
    std::size_t r = 1;
    for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

std::size_t FourthMomentTable::rank(std::size_t a, std::size_t b, std::size_t c, std::size_t d) {
    std::array<std::size_t, 4> s = {a, b, c, d};
    std::sort(s.begin(), s.end());
    return s[0] + binomial(s[1], 2) + binomial(s[2], 3) + binomial(s[3], 4);
}

FourthMomentTable FourthMomentTable::compute(const Eigen::MatrixXd& sigma_y,
                                             const QuadratureOptions& opt) {
    const auto M = static_cast<std::size_t>(sigma_y.rows());
    FourthMomentTable t;
    t.M_ = M;
    t.values_.assign(binomial(M, 4), 0.0);

    std::size_t first_bad = std::numeric_limits<std::size_t>::max();
    std::string first_msg;
    const auto top = static_cast<std::int64_t>(M);

#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t dd = 3; dd < top; ++dd) {
        const auto d = static_cast<std::size_t>(dd);
        for (std::size_t c = 2; c < d; ++c) {
            for (std::size_t b = 1; b < c; ++b) {
                for (std::size_t a = 0; a < b; ++a) {
                    const std::size_t r = a + binomial(b, 2) + binomial(c, 3) + binomial(d, 4);
                    const auto ia = static_cast<Eigen::Index>(a), ib = static_cast<Eigen::Index>(b);
                    const auto ic = static_cast<Eigen::Index>(c), id = static_cast<Eigen::Index>(d);
                    try {
                        const CorrSubset sub({sigma_y(ia, ib), sigma_y(ia, ic), sigma_y(ia, id),
                                              sigma_y(ib, ic), sigma_y(ib, id), sigma_y(ic, id)});
                        t.values_[r] = sign_moment4(sub, opt);
                    } catch (const Error& e) {
#pragma omp critical(binspec_table_error)
                        if (r < first_bad) {
                            first_bad = r;
                            std::ostringstream msg;
                            msg << "fourth moment for indices (" << a << ", " << b << ", " << c
                                << ", " << d << "): " << e.what();
                            first_msg = msg.str();
                        }
                    }
                }
            }
        }
    }
    if (!first_msg.empty()) throw NumericalError(first_msg);
    t.evaluations_ = t.values_.size();
    return t;
}

double FourthMomentTable::operator()(std::size_t i, std::size_t j, std::size_t k,
                                     std::size_t l) const {
    std::array<std::size_t, 4> s = {i, j, k, l};
    std::sort(s.begin(), s.end());
    if (s[0] == s[1] || s[1] == s[2] || s[2] == s[3] || s[3] >= M_)
        throw ValidationError("fourth-moment lookup needs four distinct indices below M");
    return values_[s[0] + binomial(s[1], 2) + binomial(s[2], 3) + binomial(s[3], 4)];
}

void FourthMomentTable::save(const std::filesystem::path& path, std::uint64_t scenario_key,
                             std::uint64_t theta_key) const {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw Error("cannot open " + path.string() + " for writing");
    os.write(kMagic, sizeof kMagic);
    put_u32(os, kFormatVersion);
    put_u32(os, static_cast<std::uint32_t>(M_));
    put_u64(os, scenario_key);
    put_u64(os, theta_key);
    put_u64(os, values_.size());
    for (double v : values_) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof bits);
        put_u64(os, bits);
    }
    if (!os) throw Error("write failed: " + path.string());
}

FourthMomentTable FourthMomentTable::load(const std::filesystem::path& path,
                                          std::optional<std::uint64_t> scenario_key,
                                          std::optional<std::uint64_t> theta_key) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ValidationError("cannot open fourth-moment cache " + path.string());
    char magic[8];
    if (!is.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0)
        throw ValidationError("fourth-moment cache: bad magic in " + path.string());
    const auto version = get_le<std::uint32_t>(is);
    if (version != kFormatVersion)
        throw ValidationError("fourth-moment cache: unsupported version " + std::to_string(version));
    FourthMomentTable t;
    t.M_ = get_le<std::uint32_t>(is);
    t.scenario_key_ = get_le<std::uint64_t>(is);
    t.theta_key_ = get_le<std::uint64_t>(is);
    const auto count = get_le<std::uint64_t>(is);
    if (count != binomial(t.M_, 4))
        throw ValidationError("fourth-moment cache: entry count does not match window length");
    if (scenario_key && *scenario_key != t.scenario_key_)
        throw ValidationError("fourth-moment cache: scenario hash mismatch");
    if (theta_key && *theta_key != t.theta_key_)
        throw ValidationError("fourth-moment cache: parameter hash mismatch");
    t.values_.resize(count);
    for (auto& v : t.values_) {
        const auto bits = get_le<std::uint64_t>(is);
        std::memcpy(&v, &bits, sizeof v);
    }
    if (is.peek() != std::char_traits<char>::eof())
        throw ValidationError("fourth-moment cache: trailing bytes");
    return t;
}

Eigen::MatrixXd assemble_cov(const Eigen::MatrixXd& sigma_y, const FourthMomentTable& table) {
    const auto M = static_cast<std::size_t>(sigma_y.rows());
    if (table.window() != M) throw ValidationError("assemble_cov: table window mismatch");
    const PairIndex pairs(M);
    const auto C = static_cast<std::int64_t>(pairs.size());

    Eigen::MatrixXd rz(sigma_y.rows(), sigma_y.cols());
    for (Eigen::Index j = 0; j < rz.cols(); ++j)
        for (Eigen::Index i = 0; i < rz.rows(); ++i)
            rz(i, j) = 2.0 / std::numbers::pi * std::asin(clamp_corr(sigma_y(i, j)));
    rz.diagonal().setOnes();

    Eigen::MatrixXd cov(C, C);
#pragma omp parallel for schedule(dynamic, 8)
    for (std::int64_t c1 = 0; c1 < C; ++c1) {
        const auto [i, j] = pairs.pair(static_cast<std::size_t>(c1));
        const double mu1 = rz(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        for (std::int64_t c2 = c1; c2 < C; ++c2) {
            const auto [k, l] = pairs.pair(static_cast<std::size_t>(c2));
            const double mu2 = rz(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l));
            double fourth;
            if (c1 == c2) {
                fourth = 1.0;
            } else if (i == k) {
                fourth = rz(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(l));
            } else if (i == l) {
                fourth = rz(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k));
            } else if (j == k) {
                fourth = rz(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(l));
            } else if (j == l) {
                fourth = rz(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
            } else {
                fourth = table(i, j, k, l);
            }
            cov(c1, c2) = cov(c2, c1) = fourth - mu1 * mu2;
        }
    }
    return cov;
}

AuxMoments compute_aux_moments(const Scenario& scn, const ParamVector& theta,
                               const AuxOptions& opt) {
    require_unit_noise(theta);
    const ModelMatrices mm = ModelMatrices::build(scn, theta);
    const PairIndex pairs(scn.M);
    const auto C = static_cast<Eigen::Index>(pairs.size());
    const auto D = static_cast<Eigen::Index>(scn.sources());
    constexpr double kTwoOverPi = 2.0 / std::numbers::pi;

    AuxMoments out;
    out.mu.resize(C);
    out.jac.resize(C, D);
    for (Eigen::Index c = 0; c < C; ++c) {
        const auto [i, j] = pairs.pair(static_cast<std::size_t>(c));
        const auto ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j);
        const double raw = mm.sigma_y(ii, jj);
        const double rho = clamp_corr(raw);
        if (rho != raw) ++out.clamped;
        out.mu[c] = kTwoOverPi * std::asin(rho);
        const double inv_sqrt = 1.0 / std::sqrt(1.0 - rho * rho);
        for (Eigen::Index d = 0; d < D; ++d)
            out.jac(c, d) = kTwoOverPi * mm.dsigma_y[static_cast<std::size_t>(d)](ii, jj) * inv_sqrt;
    }

    if (opt.with_cov) {
        if (opt.table) {
            out.cov = assemble_cov(mm.sigma_y, *opt.table);
        } else {
            const FourthMomentTable table = FourthMomentTable::compute(mm.sigma_y, opt.quadrature);
            out.cov = assemble_cov(mm.sigma_y, table);
        }
    }
    return out;
}

Eigen::VectorXd mean_stats(const Scenario& scn, const ParamVector& theta) {
    return compute_aux_moments(scn, theta, {.with_cov = false}).mu;
}

Eigen::MatrixXd jac_mean_stats(const Scenario& scn, const ParamVector& theta) {
    return compute_aux_moments(scn, theta, {.with_cov = false}).jac;
}

Eigen::MatrixXd cov_stats(const Scenario& scn, const ParamVector& theta) {
    return compute_aux_moments(scn, theta).cov;
}

}  // namespace binspec
