#include "binspec/estimator.hpp"

#include <algorithm>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>

#include "binspec/errors.hpp"
#include "binspec/linalg.hpp"

namespace binspec {

namespace {

std::string describe(const ParamVector& theta) {
    std::ostringstream os;
    os << "theta_hat = [";
    for (std::size_t d = 0; d < theta.sources(); ++d)
        os << (d ? ", " : "") << theta.source(d);
    os << "]";
    return os.str();
}

ParamVector project(const Eigen::VectorXd& v, double floor) {
    std::vector<double> out(static_cast<std::size_t>(v.size()));
    for (Eigen::Index d = 0; d < v.size(); ++d)
        out[static_cast<std::size_t>(d)] = std::max(floor, v[d]);
    return ParamVector(std::move(out), 1.0);
}

void trace(const ScoringConfig& cfg, const char* tag, int iter, const ParamVector& theta) {
    if (!cfg.log) return;
    std::clog << tag << " iter " << iter << ":";
    for (double v : theta.source_db()) std::clog << ' ' << std::setprecision(6) << v << " dB";
    std::clog << '\n';
}

template <typename Step>
Trajectory run_scoring(const Scenario& scn, const ScoringConfig& cfg, const char* tag, Step&& step) {
    scn.validate();
    cfg.validate(scn.sources());
    Trajectory traj;
    traj.emplace_back(cfg.initial(scn.sources()), 1.0);
    trace(cfg, tag, 0, traj.back());
    for (int i = 1; i <= cfg.iterations; ++i) {
        const ParamVector& cur = traj.back();
        Eigen::VectorXd update;
        try {
            update = step(cur, i);
        } catch (const SingularFisherError& e) {
            throw SingularFisherError(std::string(e.what()) + " at " + describe(cur));
        }
        traj.push_back(project(cur.source_vector() + update, cfg.floor));
        trace(cfg, tag, i, traj.back());
    }
    return traj;
}

}  // namespace

std::vector<double> ScoringConfig::initial(std::size_t D) const {
    if (theta_init.empty()) return std::vector<double>(D, floor);
    return theta_init;
}

void ScoringConfig::validate(std::size_t D) const {
    if (iterations < 1) throw ValidationError("scoring needs at least one iteration");
    if (!(floor > 0.0)) throw ValidationError("scoring floor must be positive");
    if (!theta_init.empty()) {
        if (theta_init.size() != D)
            throw ValidationError("initial iterate has the wrong number of sources");
        for (double v : theta_init)
            if (!(v >= floor)) throw ValidationError("initial iterate must be >= the floor");
    }
}

Eigen::VectorXd scoring_step_quant(const AuxMoments& aux, const Eigen::VectorXd& mu_emp) {
    if (mu_emp.size() != aux.mu.size())
        throw ValidationError("scoring_step_quant: statistic length mismatch");
    if ((mu_emp.array().abs() > 1.0).any())
        throw ValidationError("scoring_step_quant: empirical statistics outside [-1, 1]");
    const auto llt = factorize_spd(aux.cov, "reduced-statistics covariance");
    const Eigen::MatrixXd rinv_j = llt.solve(aux.jac);
    Eigen::MatrixXd fisher = aux.jac.transpose() * rinv_j;
    fisher = 0.5 * (fisher + fisher.transpose());
    const Eigen::VectorXd score = rinv_j.transpose() * (mu_emp - aux.mu);
    return spd_solve_checked(fisher, score, "quantized Fisher matrix");
}

Eigen::VectorXd scoring_step_quant(const Scenario& scn, const ParamVector& theta_hat,
                                   const Eigen::VectorXd& mu_emp) {
    return scoring_step_quant(compute_aux_moments(scn, theta_hat), mu_emp);
}

Trajectory estimate_quant_from_mean(const Scenario& scn, const Eigen::VectorXd& mu_emp,
                                    const ScoringConfig& cfg) {
    Eigen::MatrixXd frozen;
    return run_scoring(scn, cfg, "quant", [&](const ParamVector& cur, int iter) {
        if (!cfg.freeze_cov || iter == 1) {
            AuxMoments aux = compute_aux_moments(scn, cur);
            if (cfg.freeze_cov) frozen = aux.cov;
            return scoring_step_quant(aux, mu_emp);
        }
        AuxMoments aux = compute_aux_moments(scn, cur, {.with_cov = false});
        aux.cov = frozen;
        return scoring_step_quant(aux, mu_emp);
    });
}

Trajectory estimate_quant(const Scenario& scn, const SignMatrix& Z, const ScoringConfig& cfg) {
    if (static_cast<std::size_t>(Z.cols()) != scn.M)
        throw ValidationError("estimate_quant: window length does not match scenario");
    return estimate_quant_from_mean(scn, empirical_mean_stats(Z), cfg);
}

Eigen::MatrixXd empirical_second_moment(const Eigen::MatrixXd& Y) {
    if (Y.rows() < 1) throw ValidationError("empirical_second_moment: need at least one window");
    return (Y.transpose() * Y) / static_cast<double>(Y.rows());
}

Eigen::VectorXd scoring_step_ideal(const Scenario& scn, const ParamVector& theta_hat,
                                   const Eigen::MatrixXd& s_hat) {
    const ModelMatrices mm = ModelMatrices::build(scn, theta_hat);
    const auto llt = factorize_spd(mm.ry, "R_y");
    const Eigen::MatrixXd rinv_s = llt.solve(s_hat);
    const auto D = static_cast<Eigen::Index>(scn.sources());
    std::vector<Eigen::MatrixXd> a;
    for (const auto& dr : mm.dry) a.push_back(llt.solve(dr));

    Eigen::MatrixXd fisher(D, D);
    Eigen::VectorXd score(D);
    for (Eigen::Index p = 0; p < D; ++p) {
        const auto& ap = a[static_cast<std::size_t>(p)];
        score[p] = 0.5 * (ap.cwiseProduct(rinv_s.transpose()).sum() - ap.trace());
        for (Eigen::Index q = p; q < D; ++q)
            fisher(p, q) = fisher(q, p) =
                0.5 * ap.cwiseProduct(a[static_cast<std::size_t>(q)].transpose()).sum();
    }
    return spd_solve_checked(fisher, score, "ideal Fisher matrix");
}

Trajectory estimate_ideal_from_moment(const Scenario& scn, const Eigen::MatrixXd& s_hat,
                                      const ScoringConfig& cfg) {
    if (static_cast<std::size_t>(s_hat.rows()) != scn.M || s_hat.rows() != s_hat.cols())
        throw ValidationError("estimate_ideal: second-moment matrix has the wrong shape");
    return run_scoring(scn, cfg, "ideal", [&](const ParamVector& cur, int) {
        return scoring_step_ideal(scn, cur, s_hat);
    });
}

Trajectory estimate_ideal(const Scenario& scn, const Eigen::MatrixXd& Y, const ScoringConfig& cfg) {
    if (static_cast<std::size_t>(Y.cols()) != scn.M)
        throw ValidationError("estimate_ideal: window length does not match scenario");
    return estimate_ideal_from_moment(scn, empirical_second_moment(Y), cfg);
}

}  // namespace binspec
