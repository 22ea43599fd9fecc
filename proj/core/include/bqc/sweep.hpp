#pragma once

#include "bqc/io.hpp"

#include <string>
#include <vector>

namespace bqc {

/// One sweep axis: a config key and the values it takes.
struct SweepAxis {
    std::string key;
    std::vector<std::string> values;
};

struct SweepResult {
    std::size_t n_runs = 0;
    std::size_t n_failed = 0;
    std::string aggregate_path;
};

/// Cartesian-product parameter sweep. Each run lives in out_dir/run_NNNN with
/// its own diagnostics CSV and manifest; the per-run seed is the template
/// seed plus the lexicographic run index, so a sweep is reproducible
/// bit-for-bit from (template, axes, base seed). Child failures are recorded
/// in the aggregate and the sweep continues. Aggregation order is fixed by
/// the run index regardless of parallelism.
SweepResult run_sweep(const ParsedConfig& templ, const std::vector<SweepAxis>& axes,
                      int parallelism, const std::string& out_dir);

} // namespace bqc
