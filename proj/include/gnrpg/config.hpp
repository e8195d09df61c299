#pragma once

#include <string>
#include <vector>

#include "gnrpg/circuit_sim.hpp"
#include "gnrpg/power_gating.hpp"

namespace gnrpg {

/// Run configuration for the CLI: benchmark/structure lists plus every device,
/// supply and measurement knob. Text format is `key = value` lines with `#`
/// comments; list values are comma-separated. Unknown keys are errors.
struct RunConfig {
    std::vector<std::string> benchmarks = {"invchain", "c17", "c432"};
    std::vector<PgKind> structures = {PgKind::MosPg, PgKind::GmcpgSs, PgKind::GmcpgNs};
    std::string bench_dir = "benches";
    int chains = 20;
    int stages = 20;
    PgOptions pg;
    SimConfig sim;
};

RunConfig parse_run_config(const std::string& text, const std::string& path = "<config>");
RunConfig load_run_config(const std::string& path);

// "invchain" builds the chains x stages inverter-chain fixture; anything else
// loads <bench_dir>/<name>.bench.
BenchmarkCase load_benchmark(const std::string& name, const RunConfig& cfg);

}  // namespace gnrpg
