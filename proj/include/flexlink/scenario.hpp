#pragma once
#include "flexlink/simulator.hpp"

#include <string>
#include <utility>
#include <vector>

namespace flexlink {

/// Parsed scenario file: one base configuration plus optional sweep axes.
///
/// The file format is flat key = value text grouped under [section] headers
/// (beam, environment, gains, force, simulation, sweep). Unknown sections or
/// keys are rejected with the offending line number.
struct ScenarioFile {
    SimConfig base;

    bool has_environment = false;
    bool contact_auto = true;  ///< contact_point = auto: P0 = target + (fd/Ke) n

    std::vector<double> sweep_ke;
    std::vector<double> sweep_fd;
    std::vector<double> sweep_lengths;
    std::vector<double> sweep_diameters;
    double young_modulus = 0.0;  ///< E [Pa], used to derive EI when sweeping diameters
    bool ei_explicit = false;    ///< file named beam.ei, so diameter sweeps keep it

    /// Every resolved field as key/value text, in a stable order. Echoed into
    /// summary.csv so a run is reproducible from its outputs alone.
    std::vector<std::pair<std::string, std::string>> echo;
};

/// Parse a scenario file from disk. Honors FLEXLINK_QUAD_PANELS as an override
/// of the quadrature resolution. Throws ConfigError with line diagnostics.
ScenarioFile parse_scenario_file(const std::string& path);

/// Parse scenario text (name used in diagnostics only).
ScenarioFile parse_scenario_text(const std::string& text, const std::string& name);

/// Expand the sweep axes into concrete configurations (cross product, at least
/// the base when no axis is present). Resolves per-row auto contact placement.
std::vector<SimConfig> expand_sweep(const ScenarioFile& scenario);

/// Reconstruct scenario text from echoed key/value metadata (the reverse of
/// the echo produced by parsing). Used to reproduce a run from its summary.
std::string scenario_text_from_echo(
    const std::vector<std::pair<std::string, std::string>>& echo);

void write_log_csv(const std::string& path, const SimConfig& config, const SimLog& log);
void write_summary_csv(const std::string& path, const ScenarioFile& scenario,
                       const SimSummary& summary);
void write_constants_csv(const std::string& path, const ModalBasis& basis);
void write_sweep_summary_csv(const std::string& path, const std::vector<SimConfig>& configs,
                             const std::vector<SweepOutcome>& outcomes);

/// One verification check re-run against written outputs.
struct VerifyCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct VerifyReport {
    std::vector<VerifyCheck> checks;
    bool all_passed() const {
        for (const auto& c : checks)
            if (!c.passed) return false;
        return true;
    }
};

/// Re-check the acceptance properties (Lyapunov monotonicity, steady force,
/// penetration law, residual tip deflection) on a completed run directory.
/// Throws ConfigError when expected files are missing or unreadable.
VerifyReport verify_outputs(const std::string& out_dir);

/// CLI entry points; return process exit codes.
int run_command(const std::string& config_path, const std::string& out_dir, bool sweep_all,
                bool seed_constants_only);
int verify_command(const std::string& out_dir);

} // namespace flexlink
