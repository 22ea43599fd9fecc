#pragma once

#include "bqc/params.hpp"
#include "bqc/spectral.hpp"

#include <map>
#include <string>
#include <vector>

namespace bqc {

/// Parsed `key = value` configuration (UTF-8, '#' comments, unknown keys are
/// errors). Holds the simulation config and the multiplier parameters; `raw`
/// records which keys were given explicitly.
struct ParsedConfig {
    SimConfig sim;
    MultiplierParams multipliers;
    std::map<std::string, std::string> raw;
};

ParsedConfig parse_config_text(const std::string& text);
ParsedConfig parse_config_file(const std::string& path);

/// Apply one `key=value` override on top of a parsed config (same validation).
void apply_override(ParsedConfig& cfg, const std::string& key, const std::string& value);

/// Canonical echo of every config key (defaults included). Parsing the echo
/// reproduces the configuration bit-for-bit.
std::string config_echo(const ParsedConfig& cfg);

/// Shortest round-trip decimal formatting (%.17g, trimmed).
std::string format_double(double v, int max_digits = 17);

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

/// Fixed, versioned diagnostics schema (header comment line carries the
/// version tag).
extern const char* kDiagCsvVersion;
void write_diagnostics_csv(const std::vector<DiagRow>& rows, const std::string& path);
std::vector<DiagRow> read_diagnostics_csv(const std::string& path);

/// Generic numeric table writer for subcommand outputs.
void write_csv(const std::string& path, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows,
               const std::vector<std::string>& footer = {});

// ---------------------------------------------------------------------------
// Snapshots (BQC1 binary, little-endian only)
// ---------------------------------------------------------------------------
//
// magic "BQC1" | u32 kmax, nv, flags (bit0: little-endian), reserved |
// f64 t, lv, beta, epsilon | omega then theta as row-major (re, im) f64
// pairs, rows k = -kmax..kmax, columns n = -nv/2..nv/2-1.

void write_snapshot(const SolverState& state, const SimConfig& cfg, const std::string& path);

struct Snapshot {
    SolverState state;
    double lv = 0.0;
    double beta = 0.0;
    double epsilon = 0.0;
};
Snapshot read_snapshot(const std::string& path);

// ---------------------------------------------------------------------------
// Run manifest
// ---------------------------------------------------------------------------

struct RunManifest {
    std::string version;
    std::uint64_t seed = 0;
    double wall_time_seconds = 0.0;
    double guard_horizon = 0.0;
    bool guard_exceeded = false;
    double wraparound_max = 0.0;
    double cfl_worst = 0.0;
    std::vector<std::string> outputs;
    std::string config_echo_text;
};

void write_manifest(const RunManifest& manifest, const std::string& path);
/// Extract the config echo block from a manifest (for replays).
std::string read_manifest_config(const std::string& path);

} // namespace bqc
