#pragma once

// SNR sweeps behind the command-line tool: theta_2 (dB) varies over a grid
// while theta_1 (dB) is fixed, for two-source scenarios. CSV output carries a
// header row, numbers with 9 significant digits, and is written to a
// temporary file that is renamed over the target on success.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "binspec/model.hpp"

namespace binspec {

struct SweepSpec {
    std::string scenario_path;
    double theta1_db = -15.0;
    double from_db = -15.0;
    double to_db = 20.0;
    double step_db = 2.5;
    std::size_t N = 100000;
    std::size_t K = 1000;
    int iterations = 5;
    double floor_db = -30.0;
    std::uint64_t seed = 1;
    std::set<std::string> modes = {"loss", "crb", "mc-quant", "mc-ideal"};
    std::string out_path;
    int threads = 1;
    std::optional<std::size_t> window_override;  // replaces the scenario's M

    /// from, from + step, ...; floor((to - from)/step) + 1 points.
    std::vector<double> grid() const;
    void validate() const;
    /// "desk": M = 16, N = 1e4, K = 200. Unknown names throw ValidationError.
    void apply_preset(std::string_view name);
    bool has_mode(std::string_view m) const { return modes.count(std::string(m)) > 0; }
};

/// "from:to:step" in dB.
void parse_sweep_range(std::string_view text, SweepSpec& spec);
std::set<std::string> parse_modes(std::string_view text);

/// The spec's scenario with any window override applied, validated.
Scenario sweep_scenario(const SweepSpec& spec);

/// Rows: theta2_db, chi_1_db ... chi_D_db.
void cmd_loss(const SweepSpec& spec);

/// Rows: theta2_db, crb_ideal_d..., crb_quant_d..., then mc_quant_d... and
/// mc_ideal_d... when those modes are requested and K > 0.
void cmd_uncertainty(const SweepSpec& spec);

/// Human-readable validation report for a scenario file.
std::string cmd_scenario_check(const std::filesystem::path& path);

/// Computes and stores the fourth-moment table for (scenario, theta_db).
std::string cmd_moment_table_dump(const std::filesystem::path& scenario_path,
                                  const std::vector<double>& theta_db,
                                  const std::filesystem::path& out_path);
/// Loads a table, checks it against (scenario, theta_db) and summarizes it.
std::string cmd_moment_table_load(const std::filesystem::path& scenario_path,
                                  const std::vector<double>& theta_db,
                                  const std::filesystem::path& in_path);

std::string format_number(double v);
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace binspec
