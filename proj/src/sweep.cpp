#include "binspec/sweep.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include "binspec/auxstats.hpp"
#include "binspec/errors.hpp"
#include "binspec/infometrics.hpp"
#include "binspec/rng.hpp"
#include "binspec/scenario_io.hpp"
#include "binspec/simkit.hpp"

namespace binspec {

namespace {

double parse_double(std::string_view text, std::string_view what) {
    std::string s(text);
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (s.empty() || used != s.size())
        throw ValidationError(std::string(what) + ": cannot parse '" + s + "'");
    return v;
}

ParamVector sweep_point(const SweepSpec& spec, double theta2_db) {
    const double db[2] = {spec.theta1_db, theta2_db};
    return ParamVector::from_db(db);
}

std::uint64_t point_seed(std::uint64_t seed, std::size_t index) {
    std::uint64_t s = seed ^ (0x5bd1e995ull * (index + 1));
    return splitmix64(s);
}

}  // namespace

std::vector<double> SweepSpec::grid() const {
    validate();
    const auto n = static_cast<std::size_t>(std::floor((to_db - from_db) / step_db + 1e-9)) + 1;
    std::vector<double> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(from_db + static_cast<double>(i) * step_db);
    return out;
}

void SweepSpec::validate() const {
    if (!(step_db > 0.0)) throw ValidationError("sweep step must be positive");
    if (from_db > to_db) throw ValidationError("sweep range must satisfy from <= to");
    if (N < 1) throw ValidationError("N must be at least 1");
    if (K == 1) throw ValidationError("K must be 0 (analytic only) or at least 2");
    if (iterations < 1) throw ValidationError("iterations must be at least 1");
    if (threads < 1) throw ValidationError("threads must be at least 1");
    for (const auto& m : modes)
        if (m != "loss" && m != "crb" && m != "mc-quant" && m != "mc-ideal")
            throw ValidationError("unknown mode '" + m + "'");
}

void SweepSpec::apply_preset(std::string_view name) {
    if (name == "desk") {
        window_override = 16;
        N = 10000;
        K = 200;
    } else if (name == "full") {
        window_override.reset();
        N = 100000;
        K = 1000;
    } else {
        throw ValidationError("unknown preset '" + std::string(name) + "'");
    }
}

void parse_sweep_range(std::string_view text, SweepSpec& spec) {
    const auto a = text.find(':');
    const auto b = a == std::string_view::npos ? a : text.find(':', a + 1);
    if (b == std::string_view::npos) throw ValidationError("--sweep expects FROM:TO:STEP");
    spec.from_db = parse_double(text.substr(0, a), "sweep FROM");
    spec.to_db = parse_double(text.substr(a + 1, b - a - 1), "sweep TO");
    spec.step_db = parse_double(text.substr(b + 1), "sweep STEP");
}

std::set<std::string> parse_modes(std::string_view text) {
    std::set<std::string> out;
    while (!text.empty()) {
        const auto comma = text.find(',');
        const std::string item(text.substr(0, comma));
        if (!item.empty()) out.insert(item);
        if (comma == std::string_view::npos) break;
        text = text.substr(comma + 1);
    }
    return out;
}

Scenario sweep_scenario(const SweepSpec& spec) {
    Scenario scn = load_scenario(spec.scenario_path);
    if (spec.window_override) {
        scn.M = *spec.window_override;
        scn.validate();
    }
    if (scn.sources() != 2)
        throw ValidationError("sweeps need a two-source scenario (theta_1 fixed, theta_2 swept)");
    return scn;
}

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw Error("cannot open " + tmp.string() + " for writing");
        os << content;
        os.flush();
        if (!os) {
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw Error("write failed: " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw Error("cannot move output into place: " + path.string());
    }
}

void cmd_loss(const SweepSpec& spec) {
    spec.validate();
    if (spec.out_path.empty()) throw ValidationError("--out is required");
    const Scenario scn = sweep_scenario(spec);
    std::ostringstream csv;
    csv << "theta2_db";
    for (std::size_t d = 0; d < scn.sources(); ++d) csv << ",chi_" << (d + 1) << "_db";
    csv << '\n';
    for (double t2 : spec.grid()) {
        const ParamVector theta = sweep_point(spec, t2);
        const Eigen::VectorXd chi = info_loss(fisher_ideal(scn, theta), fisher_quantized(scn, theta));
        csv << format_number(t2);
        for (Eigen::Index d = 0; d < chi.size(); ++d) csv << ',' << format_number(linear_to_db(chi[d]));
        csv << '\n';
    }
    write_file_atomic(spec.out_path, csv.str());
}

void cmd_uncertainty(const SweepSpec& spec) {
    spec.validate();
    if (spec.out_path.empty()) throw ValidationError("--out is required");
    const Scenario scn = sweep_scenario(spec);
    const std::size_t D = scn.sources();
    const bool mc_quant = spec.K > 0 && spec.has_mode("mc-quant");
    const bool mc_ideal = spec.K > 0 && spec.has_mode("mc-ideal");

    ScoringConfig cfg;
    cfg.iterations = spec.iterations;
    cfg.floor = db_to_linear(spec.floor_db);

    std::ostringstream csv;
    csv << "theta2_db";
    auto columns = [&](const char* prefix) {
        for (std::size_t d = 0; d < D; ++d) csv << ',' << prefix << (d + 1);
    };
    columns("crb_ideal_");
    columns("crb_quant_");
    if (mc_quant) columns("mc_quant_");
    if (mc_ideal) columns("mc_ideal_");
    csv << '\n';

    const auto grid = spec.grid();
    for (std::size_t g = 0; g < grid.size(); ++g) {
        const ParamVector theta = sweep_point(spec, grid[g]);
        const FisherReport fr = fisher_report(scn, theta, spec.N);
        csv << format_number(grid[g]);
        for (Eigen::Index d = 0; d < fr.crb_sigma_ideal.size(); ++d)
            csv << ',' << format_number(fr.crb_sigma_ideal[d]);
        for (Eigen::Index d = 0; d < fr.crb_sigma_quant.size(); ++d)
            csv << ',' << format_number(fr.crb_sigma_quant[d]);
        const std::uint64_t seed = point_seed(spec.seed, g);
        for (const auto& [enabled, mode] : {std::pair{mc_quant, McMode::quantized},
                                           std::pair{mc_ideal, McMode::ideal}}) {
            if (!enabled) continue;
            const McReport rep =
                run_mc(scn, theta, spec.N, spec.K, cfg, seed, mode, {.threads = spec.threads});
            if (!rep.valid) {
                std::ostringstream msg;
                msg << "Monte-Carlo report invalid at theta2 = " << grid[g] << " dB: "
                    << rep.failures << " of " << rep.K << " trials failed";
                if (!rep.failure_messages.empty()) msg << " (first: " << rep.failure_messages[0] << ")";
                throw NumericalError(msg.str());
            }
            for (Eigen::Index d = 0; d < rep.sigma_hat.size(); ++d)
                csv << ',' << format_number(rep.sigma_hat[d]);
        }
        csv << '\n';
    }
    write_file_atomic(spec.out_path, csv.str());
}

std::string cmd_scenario_check(const std::filesystem::path& path) {
    const Scenario scn = load_scenario(path);
    const std::size_t C = scn.pair_count();
    const std::size_t Q = binomial(scn.M, 4);
    std::ostringstream os;
    os << "scenario " << path.string() << ": OK\n";
    os << "D = " << scn.sources() << '\n';
    os << "M = " << scn.M << '\n';
    os << "sampler_ratio = " << scn.sampler_ratio << '\n';
    for (std::size_t d = 0; d < scn.sources(); ++d)
        os << "source " << (d + 1) << ": omega_bar = " << scn.omega_bar[d]
           << ", bandwidth_bar = " << scn.bandwidth_bar[d] << '\n';
    os << "pairs = " << C << '\n';
    os << "quadruples = " << Q << '\n';
    const double chol_flops = std::pow(static_cast<double>(C), 3) / 3.0;
    os << "cost per parameter point: " << Q << " four-variate quadratures, " << C << " x " << C
       << " covariance (" << format_number(static_cast<double>(C) * static_cast<double>(C) * 8.0 / 1048576.0)
       << " MiB), Cholesky ~" << format_number(chol_flops / 1e9) << " GFLOP\n";
    return os.str();
}

std::string cmd_moment_table_dump(const std::filesystem::path& scenario_path,
                                  const std::vector<double>& theta_db,
                                  const std::filesystem::path& out_path) {
    const Scenario scn = load_scenario(scenario_path);
    const ParamVector theta = ParamVector::from_db(theta_db);
    if (theta.sources() != scn.sources())
        throw ValidationError("--theta-db needs one value per source");
    const FourthMomentTable table = FourthMomentTable::compute(build_sigma_y(scn, theta));
    std::filesystem::path tmp = out_path;
    tmp += ".tmp";
    table.save(tmp, scenario_hash(scn), theta_hash(theta));
    std::filesystem::rename(tmp, out_path);
    std::ostringstream os;
    os << "wrote " << table.size() << " fourth moments (M = " << scn.M << ") to "
       << out_path.string() << '\n';
    return os.str();
}

std::string cmd_moment_table_load(const std::filesystem::path& scenario_path,
                                  const std::vector<double>& theta_db,
                                  const std::filesystem::path& in_path) {
    const Scenario scn = load_scenario(scenario_path);
    const ParamVector theta = ParamVector::from_db(theta_db);
    if (theta.sources() != scn.sources())
        throw ValidationError("--theta-db needs one value per source");
    const FourthMomentTable table =
        FourthMomentTable::load(in_path, scenario_hash(scn), theta_hash(theta));
    if (table.window() != scn.M) throw ValidationError("moment table window does not match scenario");
    const AuxMoments aux = compute_aux_moments(scn, theta, {.table = &table});
    const Eigen::MatrixXd f = fisher_quantized(aux);
    std::ostringstream os;
    os << "loaded " << table.size() << " fourth moments (M = " << table.window() << ")\n";
    os << "quantized Fisher matrix diagonal:";
    for (Eigen::Index d = 0; d < f.rows(); ++d) os << ' ' << format_number(f(d, d));
    os << '\n';
    return os.str();
}

}  // namespace binspec
