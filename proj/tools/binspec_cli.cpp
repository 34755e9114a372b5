// binspec: spectral power analysis for hard-limited band-limited Gaussian data.
//
//   binspec check --scenario scenarios/narrow2.scn
//   binspec loss --scenario scenarios/narrow2.scn --theta1-db -15 --sweep -15:20:2.5 --out loss.csv
//   binspec uncertainty --scenario scenarios/narrow2.scn --theta1-db -12 --sweep -12:0:6 \
//       --preset desk --threads 8 --out sigma.csv
//   binspec moment-table dump --scenario S --theta-db -15,12.5 --out table.bin
//   binspec moment-table load --scenario S --theta-db -15,12.5 --in table.bin
//
// Exit codes: 0 success, 2 validation error, 3 numerical failure.

#include <iostream>
#include <string>
#include <vector>

#include <omp.h>

#include "CLI11.hpp"
#include "binspec/errors.hpp"
#include "binspec/sweep.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

struct SweepFlags {
    binspec::SweepSpec spec;
    std::string sweep;
    std::string modes;
    std::string preset;
    double floor_db = -30.0;
};

void add_sweep_flags(CLI::App* cmd, SweepFlags& f) {
    cmd->add_option("--scenario", f.spec.scenario_path, "Scenario file")->required();
    cmd->add_option("--theta1-db", f.spec.theta1_db, "Fixed SNR of source 1 [dB]");
    cmd->add_option("--sweep", f.sweep, "Sweep of theta_2 as FROM:TO:STEP [dB]");
    cmd->add_option("--n", f.spec.N, "Windows per dataset");
    cmd->add_option("--k", f.spec.K, "Monte-Carlo trials (0: analytic only)");
    cmd->add_option("--iters", f.spec.iterations, "Scoring iterations");
    cmd->add_option("--floor-db", f.floor_db, "Back-projection floor and initial iterate [dB]");
    cmd->add_option("--seed", f.spec.seed, "Random seed");
    cmd->add_option("--mode", f.modes, "Comma list of loss,crb,mc-quant,mc-ideal");
    cmd->add_option("--out", f.spec.out_path, "Output CSV")->required();
    cmd->add_option("--preset", f.preset, "Parameter preset (desk, full)");
    cmd->add_option("--threads", f.spec.threads, "Worker threads");
}

binspec::SweepSpec finish(CLI::App* cmd, SweepFlags& f) {
    binspec::SweepSpec spec = f.spec;
    if (!f.preset.empty()) {
        spec.apply_preset(f.preset);
        // explicit flags win over the preset
        if (cmd->count("--n")) spec.N = f.spec.N;
        if (cmd->count("--k")) spec.K = f.spec.K;
    }
    if (!f.sweep.empty()) binspec::parse_sweep_range(f.sweep, spec);
    if (!f.modes.empty()) spec.modes = binspec::parse_modes(f.modes);
    spec.floor_db = f.floor_db;
    spec.validate();
    omp_set_num_threads(spec.threads);
    return spec;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral power estimation from hard-limited samples"};
    app.require_subcommand(1);
    omp_set_max_active_levels(1);

    SweepFlags loss_flags;
    auto* loss = app.add_subcommand("loss", "Information loss of hard limiting over an SNR sweep");
    add_sweep_flags(loss, loss_flags);

    SweepFlags unc_flags;
    auto* unc = app.add_subcommand("uncertainty", "Predicted and Monte-Carlo uncertainty sweep");
    add_sweep_flags(unc, unc_flags);

    std::string check_path;
    auto* check = app.add_subcommand("check", "Validate a scenario file");
    check->add_option("--scenario,scenario", check_path, "Scenario file")->required();

    auto* table = app.add_subcommand("moment-table", "Dump or load a fourth-moment cache");
    table->require_subcommand(1);
    std::string tbl_scenario, tbl_theta, tbl_path;
    int tbl_threads = 1;
    auto* dump = table->add_subcommand("dump", "Compute and write the table");
    dump->add_option("--scenario", tbl_scenario)->required();
    dump->add_option("--theta-db", tbl_theta, "Comma list of source SNRs [dB]")->required();
    dump->add_option("--out", tbl_path)->required();
    dump->add_option("--threads", tbl_threads);
    auto* load = table->add_subcommand("load", "Read and verify a table");
    load->add_option("--scenario", tbl_scenario)->required();
    load->add_option("--theta-db", tbl_theta, "Comma list of source SNRs [dB]")->required();
    load->add_option("--in", tbl_path)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitValidation;
    }

    try {
        if (*loss) {
            binspec::cmd_loss(finish(loss, loss_flags));
        } else if (*unc) {
            binspec::cmd_uncertainty(finish(unc, unc_flags));
        } else if (*check) {
            std::cout << binspec::cmd_scenario_check(check_path);
        } else if (*table) {
            std::vector<double> theta_db;
            std::string rest = tbl_theta;
            std::size_t pos = 0;
            while (pos <= rest.size()) {
                const auto comma = rest.find(',', pos);
                const std::string item = rest.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
                try {
                    theta_db.push_back(std::stod(item));
                } catch (const std::exception&) {
                    throw binspec::ValidationError("--theta-db: cannot parse '" + item + "'");
                }
                if (comma == std::string::npos) break;
                pos = comma + 1;
            }
            if (*dump) {
                omp_set_num_threads(tbl_threads);
                std::cout << binspec::cmd_moment_table_dump(tbl_scenario, theta_db, tbl_path);
            } else {
                std::cout << binspec::cmd_moment_table_load(tbl_scenario, theta_db, tbl_path);
            }
        }
    } catch (const binspec::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const binspec::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
