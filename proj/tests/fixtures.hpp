#pragma once

#include <random>
#include <vector>

#include "binspec/model.hpp"
#include "oracles.hpp"

namespace fixture {

inline binspec::Scenario narrow2(std::size_t M = 64) {
    return binspec::Scenario{{0.25, 0.75}, {1.0 / 64, 1.0 / 64}, 1.0, M};
}

inline binspec::Scenario broadnarrow(std::size_t M = 64) {
    return binspec::Scenario{{0.5, 0.5}, {0.25, 1.0 / 64}, 1.0, M};
}

inline oracle::Setup as_setup(const binspec::Scenario& s) {
    return {s.omega_bar, s.bandwidth_bar, static_cast<int>(s.M)};
}

inline binspec::Scenario random_scenario(std::mt19937_64& rng, std::size_t D, std::size_t M) {
    std::uniform_real_distribution<double> u(0.0, 1.0), bw(0.01, 1.0);
    binspec::Scenario s;
    s.M = M;
    for (std::size_t d = 0; d < D; ++d) {
        s.omega_bar.push_back(u(rng));
        s.bandwidth_bar.push_back(bw(rng));
    }
    return s;
}

inline binspec::ParamVector random_theta(std::mt19937_64& rng, std::size_t D, double lo_db = -15.0,
                                         double hi_db = 20.0) {
    std::uniform_real_distribution<double> db(lo_db, hi_db);
    std::vector<double> v;
    for (std::size_t d = 0; d < D; ++d) v.push_back(binspec::db_to_linear(db(rng)));
    return binspec::ParamVector(v);
}

inline binspec::ParamVector theta_db(std::initializer_list<double> db) {
    std::vector<double> v(db);
    return binspec::ParamVector::from_db(v);
}

}  // namespace fixture
