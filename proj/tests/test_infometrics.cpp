#include <cmath>
#include <random>
#include <vector>

#include "catch_amalgamated.hpp"

#include "binspec/errors.hpp"
#include "binspec/infometrics.hpp"
#include "binspec/linalg.hpp"
#include "fixtures.hpp"

using namespace binspec;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

double min_eigenvalue(const Eigen::MatrixXd& m) {
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(0.5 * (m + m.transpose()),
                                                          Eigen::EigenvaluesOnly)
        .eigenvalues()
        .minCoeff();
}

// 1/2 tr(R^-1 dR_a R^-1 dR_b) with R and its (constant) derivatives from the
// raw product form.
Eigen::MatrixXd naive_gaussian_fisher(const oracle::Setup& s, const std::vector<double>& theta) {
    const std::size_t D = theta.size();
    const Eigen::MatrixXd rinv = oracle::naive_ry(s, theta).inverse();
    std::vector<Eigen::MatrixXd> a;
    for (std::size_t d = 0; d < D; ++d) {
        std::vector<double> unit(D, 0.0);
        unit[d] = 1.0;
        a.push_back(rinv * oracle::naive_ry(s, unit, 0.0));
    }
    Eigen::MatrixXd f(D, D);
    for (std::size_t p = 0; p < D; ++p)
        for (std::size_t q = 0; q < D; ++q) f(p, q) = 0.5 * (a[p] * a[q]).trace();
    return f;
}

// Expected negative log-density of N(0, R(theta)) under data with covariance
// R(truth), up to a constant.
double expected_nll(const oracle::Setup& s, const std::vector<double>& theta,
                    const Eigen::MatrixXd& r_true) {
    const Eigen::MatrixXd r = oracle::naive_ry(s, theta);
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(r);
    return 0.5 * (ldlt.vectorD().array().log().sum() + ldlt.solve(r_true).trace());
}

}  // namespace

TEST_CASE("quantized Fisher is exact for a pair of samples") {
    const Scenario scn{{0.25}, {1.0 / 64}, 1.0, 2};
    for (double db : {-15.0, -6.0, 0.0, 6.0}) {
        const ParamVector theta = fixture::theta_db({db});
        const Eigen::MatrixXd got = fisher_quantized(scn, theta);
        const Eigen::MatrixXd want =
            oracle::exact_binary_fisher(fixture::as_setup(scn), theta.source_powers());
        CHECK(oracle::rel_err(got, want) < 1e-6);
    }
}

TEST_CASE("quantized Fisher is dominated by the exact Fisher for three samples") {
    std::mt19937_64 rng(31);
    for (int rep = 0; rep < 10; ++rep) {
        const Scenario scn = fixture::random_scenario(rng, 2, 3);
        const ParamVector theta = fixture::random_theta(rng, 2);
        const Eigen::MatrixXd exact =
            oracle::exact_binary_fisher(fixture::as_setup(scn), theta.source_powers());
        CHECK(min_eigenvalue(exact - fisher_quantized(scn, theta)) >= -1e-8);
    }
}

TEST_CASE("identical sources leave only the sum identifiable") {
    const Scenario scn{{0.3, 0.3}, {0.1, 0.1}, 1.0, 8};
    for (const auto& theta : {ParamVector({2.0, 2.0}), ParamVector({0.5, 3.0})}) {
        const Eigen::MatrixXd f = fisher_quantized(scn, theta);
        const Eigen::Vector2d v(1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0));
        CHECK((f * v).norm() <= 1e-8 * f.norm());
        CHECK_THROWS_AS(info_loss(scn, theta), SingularFisherError);
    }
}

TEST_CASE("ideal Fisher in the white case") {
    const Scenario scn{{0.0}, {1.0}, 1.0, 12};
    for (double t : {0.01, 1.0, 40.0}) {
        const Eigen::MatrixXd f = fisher_ideal(scn, ParamVector({t}));
        CHECK_THAT(f(0, 0), WithinRel(12.0 / (2.0 * (t + 1.0) * (t + 1.0)), 1e-12));
        const auto sigma = predict_sigma(f, ParamVector({t}), 1000);
        CHECK_THAT(sigma(0), WithinRel((t + 1.0) / t * std::sqrt(2.0 / (12.0 * 1000.0)), 1e-12));
    }
}

TEST_CASE("ideal Fisher matches the raw trace form") {
    std::mt19937_64 rng(4);
    for (int rep = 0; rep < 6; ++rep) {
        Scenario scn = fixture::random_scenario(rng, 1 + rep % 3, 8);
        const ParamVector theta = fixture::random_theta(rng, scn.sources());
        CHECK(oracle::rel_err(fisher_ideal(scn, theta),
                              naive_gaussian_fisher(fixture::as_setup(scn), theta.source_powers())) <
              1e-10);
        // wider first band: only the derivative matrices change
        scn.bandwidth_bar[0] = std::min(1.0, 2.0 * scn.bandwidth_bar[0]);
        CHECK(oracle::rel_err(fisher_ideal(scn, theta),
                              naive_gaussian_fisher(fixture::as_setup(scn), theta.source_powers())) <
              1e-10);
    }
}

TEST_CASE("ideal Fisher is the curvature of the expected log-density") {
    std::mt19937_64 rng(12);
    const Scenario scn = fixture::random_scenario(rng, 2, 8);
    const ParamVector theta = fixture::random_theta(rng, 2, -5.0, 10.0);
    const auto setup = fixture::as_setup(scn);
    const auto t = theta.source_powers();
    const Eigen::MatrixXd r_true = oracle::naive_ry(setup, t);
    Eigen::Matrix2d hess;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            const double ha = 1e-3 * t[a], hb = 1e-3 * t[b];
            auto at = [&](double sa, double sb) {
                auto v = t;
                v[a] += sa * ha;
                v[b] += sb * hb;
                return expected_nll(setup, v, r_true);
            };
            hess(a, b) = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4.0 * ha * hb);
        }
    CHECK(oracle::rel_err(fisher_ideal(scn, theta), hess) < 1e-4);
}

TEST_CASE("joint noise handling adds the noise power as a parameter") {
    const Scenario scn = fixture::narrow2(16);
    const ParamVector theta = fixture::theta_db({0.0, 10.0});
    const Eigen::MatrixXd known = fisher_ideal(scn, theta);
    const Eigen::MatrixXd joint = fisher_ideal(scn, theta, NoiseHandling::joint);
    REQUIRE(joint.rows() == 3);
    CHECK(oracle::rel_err(joint.topLeftCorner(2, 2), known) < 1e-14);
    // estimating the noise as well can only lose information
    const Eigen::VectorXd v_known = spd_inverse_diagonal(known, "known");
    const Eigen::VectorXd v_joint = spd_inverse_diagonal(joint, "joint");
    CHECK(v_joint(0) >= v_known(0));
    CHECK(v_joint(1) >= v_known(1));
}

TEST_CASE("information loss never exceeds one") {
    std::mt19937_64 rng(77);
    for (int rep = 0; rep < 8; ++rep) {
        const Scenario scn = fixture::random_scenario(rng, 2, 10);
        const auto chi = info_loss(scn, fixture::random_theta(rng, 2));
        for (Eigen::Index d = 0; d < chi.size(); ++d) {
            CHECK(chi(d) > 0.0);
            CHECK(chi(d) <= 1.0);
        }
    }
    for (const Scenario& scn : {fixture::narrow2(16), fixture::broadnarrow(16)})
        for (double t2 = -15.0; t2 <= 20.0; t2 += 5.0) {
            const auto chi = info_loss(scn, fixture::theta_db({-15.0, t2}));
            CHECK(chi.maxCoeff() <= 1.0);
            CHECK(chi.minCoeff() > 0.0);
        }
}

TEST_CASE("fisher_report is consistent with its parts") {
    const Scenario scn = fixture::narrow2(12);
    const ParamVector theta = fixture::theta_db({-6.0, 3.0});
    const auto r = fisher_report(scn, theta, 5000);
    CHECK(r.f_quant == fisher_quantized(scn, theta));
    CHECK(r.f_ideal == fisher_ideal(scn, theta));
    for (int d = 0; d < 2; ++d) {
        CHECK_THAT(r.loss_db(d), WithinAbs(10.0 * std::log10(r.loss(d)), 1e-12));
        CHECK(r.loss_db(d) <= 0.0);
        CHECK_THAT(r.loss(d), WithinRel(std::pow(r.crb_sigma_ideal(d) / r.crb_sigma_quant(d), 2), 1e-12));
    }
}

TEST_CASE("predict_sigma") {
    const Scenario scn = fixture::narrow2(10);
    const ParamVector theta = fixture::theta_db({2.0, -4.0});
    const Eigen::MatrixXd f = fisher_quantized(scn, theta);
    const auto s1 = predict_sigma(f, theta, 1000);
    const auto s4 = predict_sigma(f, theta, 4000);
    CHECK(oracle::rel_err(s4, s1 / 2.0) < 1e-14);

    const Eigen::VectorXd inv = f.inverse().diagonal();
    CHECK(oracle::rel_err(spd_inverse_diagonal(f, "f"), inv) < 1e-10);
    for (int d = 0; d < 2; ++d)
        CHECK_THAT(s1(d), WithinRel(std::sqrt(inv(d) / 1000.0) / theta.source(d), 1e-10));

    CHECK_THROWS_AS(predict_sigma(f, theta, 0), ValidationError);
    CHECK_THROWS_AS(predict_sigma(Eigen::Matrix2d::Ones(), theta, 10), SingularFisherError);
}
