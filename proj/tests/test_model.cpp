#include <cmath>
#include <numbers>
#include <random>

#include "catch_amalgamated.hpp"

#include "binspec/errors.hpp"
#include "binspec/model.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace binspec;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

using fixture::as_setup;
using fixture::narrow2;
using fixture::random_scenario;
using fixture::random_theta;

TEST_CASE("sinc is the normalized sinc") {
    CHECK(sinc(0.0) == 1.0);
    CHECK_THAT(sinc(0.5), WithinAbs(2.0 / std::numbers::pi, 1e-15));
    CHECK_THAT(sinc(3.0), WithinAbs(0.0, 1e-15));
}

TEST_CASE("dB conversion is power style and round-trips") {
    CHECK_THAT(db_to_linear(-30.0), WithinRel(1e-3, 1e-15));
    CHECK_THAT(db_to_linear(10.0), WithinRel(10.0, 1e-15));
    for (double db : {-30.0, -15.0, -12.6, 0.0, 3.0, 12.6, 20.0})
        CHECK_THAT(linear_to_db(db_to_linear(db)), WithinAbs(db, 1e-12));
    const double dbs[2] = {-15.0, 12.5};
    const auto p = ParamVector::from_db(dbs);
    CHECK_THAT(p.source_db()[1], WithinAbs(12.5, 1e-12));
    CHECK(p.noise() == 1.0);
}

TEST_CASE("scenario validation") {
    Scenario ok = narrow2();
    CHECK_NOTHROW(ok.validate());

    Scenario over = ok;
    over.sampler_ratio = 2.0;
    CHECK_THROWS_AS(over.validate(), ValidationError);
    CHECK_THROWS_WITH(over.validate(), Catch::Matchers::ContainsSubstring("oversampling"));

    Scenario shortM = ok;
    shortM.M = 1;
    CHECK_THROWS_AS(shortM.validate(), ValidationError);

    Scenario badbw = ok;
    badbw.bandwidth_bar[0] = 0.0;
    CHECK_THROWS_AS(badbw.validate(), ValidationError);
    badbw.bandwidth_bar[0] = 1.5;
    CHECK_THROWS_AS(badbw.validate(), ValidationError);

    Scenario badw = ok;
    badw.omega_bar[1] = -0.1;
    CHECK_THROWS_AS(badw.validate(), ValidationError);

    Scenario mismatch = ok;
    mismatch.bandwidth_bar.pop_back();
    CHECK_THROWS_AS(mismatch.validate(), ValidationError);

    CHECK_THROWS_AS(ParamVector({1.0, 0.0}), ValidationError);
    CHECK_THROWS_AS(ParamVector({1.0, -2.0}), ValidationError);
    CHECK_THROWS_AS(ParamVector({1.0}, 0.0), ValidationError);
}

TEST_CASE("source correlation matrices") {
    Scenario s{{0.3, 0.3}, {1.0, 0.5}, 1.0, 6};
    const auto full = build_source_corr(s, 0);
    const auto half = build_source_corr(s, 1);
    for (int i = 0; i < 6; ++i) {
        CHECK(full(i, i) == 1.0);
        CHECK(half(i, i) == 1.0);
        for (int j = 0; j < 6; ++j)
            if (i != j) CHECK(full(i, j) == 0.0);
    }
    CHECK_THAT(half(0, 1), WithinAbs(2.0 / std::numbers::pi, 1e-15));
    CHECK_THAT(half(3, 2), WithinAbs(2.0 / std::numbers::pi, 1e-15));
    CHECK_THROWS_AS(build_source_corr(s, 2), ValidationError);
}

TEST_CASE("mixing matrices") {
    Scenario s{{0.0, 0.5, 0.37}, {0.1, 0.1, 0.1}, 1.0, 7};
    CHECK(build_mixing(s, 0).isOnes(0.0));
    const auto w = build_mixing(s, 1);
    CHECK_THAT(w(0, 1), WithinAbs(0.0, 1e-15));
    CHECK_THAT(w(4, 3), WithinAbs(0.0, 1e-15));
    CHECK_THROWS_AS(build_mixing(s, 3), ValidationError);

    // equals the raw cos*cos + sin*sin form
    for (std::size_t d = 0; d < 3; ++d) {
        const auto m = build_mixing(s, d);
        for (int i = 1; i <= 7; ++i) {
            CHECK(m(i - 1, i - 1) == 1.0);
            for (int j = 1; j <= 7; ++j) {
                const double ai = s.omega_bar[d] * std::numbers::pi * (i - 1);
                const double aj = s.omega_bar[d] * std::numbers::pi * (j - 1);
                const double raw = std::cos(ai) * std::cos(aj) + std::sin(ai) * std::sin(aj);
                CHECK_THAT(m(i - 1, j - 1), WithinAbs(raw, 1e-14));
            }
        }
    }
}

TEST_CASE("R_y structure") {
    const Scenario s = narrow2();

    SECTION("vanishing sources leave white noise") {
        const auto ry = build_ry(s, ParamVector({1e-16, 1e-16}, 1.0));
        CHECK((ry - Eigen::MatrixXd::Identity(64, 64)).cwiseAbs().maxCoeff() < 1e-14);
    }

    SECTION("diagonal collapses to sum of theta_d * bandwidth_d + theta_0") {
        const ParamVector theta({2.0, 0.5}, 1.5);
        const auto ry = build_ry(s, theta);
        const double want = 2.0 / 64 + 0.5 / 64 + 1.5;
        for (int i = 0; i < 64; ++i) CHECK_THAT(ry(i, i), WithinRel(want, 1e-15));
    }

    SECTION("narrowband scenario matches a naive double loop") {
        const std::vector<double> th = {db_to_linear(-15.0), db_to_linear(12.5)};
        const auto ry = build_ry(s, ParamVector(th));
        const auto ref = oracle::naive_ry(as_setup(s), th);
        CHECK((ry - ref).cwiseAbs().maxCoeff() < 1e-14);
    }

    SECTION("symmetric positive definite over a parameter grid") {
        for (const Scenario& scn : {narrow2(), Scenario{{0.5, 0.5}, {0.25, 1.0 / 64}, 1.0, 64}}) {
            for (double t1 : {-15.0, -3.0, 10.0}) {
                for (double t2 = -15.0; t2 <= 20.0; t2 += 5.0) {
                    const double dbs[2] = {t1, t2};
                    const auto ry = build_ry(scn, ParamVector::from_db(dbs));
                    CHECK((ry - ry.transpose()).cwiseAbs().maxCoeff() < 1e-14);
                    CHECK(Eigen::LLT<Eigen::MatrixXd>(ry).info() == Eigen::Success);
                }
            }
        }
    }

    SECTION("wrong parameter count") {
        CHECK_THROWS_AS(build_ry(s, ParamVector({1.0})), ValidationError);
    }
}

TEST_CASE("Sigma_y correlation matrix") {
    const Scenario s = narrow2(16);
    SECTION("noise only gives identity") {
        const auto sy = build_sigma_y(s, ParamVector({1e-16, 1e-16}));
        CHECK((sy - Eigen::MatrixXd::Identity(16, 16)).cwiseAbs().maxCoeff() < 1e-14);
    }
    SECTION("unit diagonal, symmetric, off-diagonals inside (-1, 1)") {
        std::mt19937_64 rng(7);
        for (int rep = 0; rep < 20; ++rep) {
            const auto scn = random_scenario(rng, 3, 12);
            const auto sy = build_sigma_y(scn, random_theta(rng, 3));
            for (int i = 0; i < 12; ++i) {
                CHECK(sy(i, i) == 1.0);
                for (int j = 0; j < 12; ++j) {
                    CHECK(std::abs(sy(i, j) - sy(j, i)) < 1e-14);
                    if (i != j) CHECK(std::abs(sy(i, j)) < 1.0);
                }
            }
        }
    }
    SECTION("invariant to a common scale of all powers") {
        const ParamVector theta({0.3, 4.0}, 1.0);
        const auto ref = build_sigma_y(s, theta);
        for (double c : {0.1, 10.0})
            CHECK((build_sigma_y(s, theta.scaled(c)) - ref).cwiseAbs().maxCoeff() < 1e-13);
    }
}

TEST_CASE("dSigma_y/dtheta") {
    SECTION("zero diagonal and agreement with central differences") {
        std::mt19937_64 rng(11);
        for (int rep = 0; rep < 10; ++rep) {
            const std::size_t D = 1 + rep % 3;
            const auto scn = random_scenario(rng, D, 10);
            const auto theta = random_theta(rng, D);
            for (std::size_t d = 0; d < D; ++d) {
                const auto ds = dsigma_y_dtheta(scn, theta, d);
                CHECK(ds.diagonal().isZero(0.0));
                const double h = 1e-6 * theta.source(d);
                const Eigen::MatrixXd fd = (build_sigma_y(scn, theta.with_source(d, theta.source(d) + h)) -
                                 build_sigma_y(scn, theta.with_source(d, theta.source(d) - h))) /
                                (2.0 * h);
                CHECK(oracle::rel_err(ds, fd) < 1e-6);
            }
        }
    }
    SECTION("single source limit at vanishing power") {
        Scenario s{{0.3}, {0.2}, 1.0, 8};
        const auto ds = dsigma_y_dtheta(s, ParamVector({1e-14}), 0);
        Eigen::MatrixXd want = 0.2 * (build_source_corr(s, 0).cwiseProduct(build_mixing(s, 0)) -
                                      build_noise_corr(s));
        want.diagonal().setZero();
        CHECK((ds - want).cwiseAbs().maxCoeff() < 1e-12);
    }
    SECTION("index out of range") {
        CHECK_THROWS_AS(dsigma_y_dtheta(narrow2(8), ParamVector({1.0, 1.0}), 2), ValidationError);
    }
}

TEST_CASE("ModelMatrices matches the standalone builders") {
    const Scenario s = narrow2(12);
    const ParamVector theta({0.2, 3.0});
    const auto mm = ModelMatrices::build(s, theta);
    CHECK(mm.ry.isApprox(build_ry(s, theta), 1e-15));
    CHECK(mm.sigma_y.isApprox(build_sigma_y(s, theta), 1e-15));
    for (std::size_t d = 0; d < 2; ++d)
        CHECK((mm.dsigma_y[d] - dsigma_y_dtheta(s, theta, d)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("cache keys depend on every field") {
    const Scenario a = narrow2();
    Scenario b = a;
    b.omega_bar[1] = 0.7500001;
    CHECK(scenario_hash(a) == scenario_hash(narrow2()));
    CHECK(scenario_hash(a) != scenario_hash(b));
    CHECK(theta_hash(ParamVector({1.0, 2.0})) != theta_hash(ParamVector({2.0, 1.0})));
}
