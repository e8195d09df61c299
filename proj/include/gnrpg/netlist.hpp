#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "gnrpg/errors.hpp"

namespace gnrpg {

enum class GateKind { And, Nand, Or, Nor, Not, Buff, Xor, Xnor };

const char* gate_kind_name(GateKind kind);

struct Gate {
    std::string output;
    GateKind kind;
    std::vector<std::string> fanins;
};

/// A validated gate-level benchmark: single driver per signal, acyclic,
/// outputs reference existing signals. Signal order is preserved from the
/// source text; names are case-sensitive.
struct Netlist {
    std::string name;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    std::vector<Gate> gates;

    // index into gates, or -1 for primary inputs / unknown signals
    int driver_index(const std::string& signal) const;

    // gate indices in dependency order (fanins before the gate)
    std::vector<int> topological_order() const;

    // longest input-to-signal path length in gates
    int depth() const;

    // Boolean evaluation of every signal for the given primary-input values.
    // Throws std::out_of_range if an input is missing from `input_values`.
    std::map<std::string, bool> evaluate(const std::map<std::string, bool>& input_values) const;
};

// Parses `.bench` text: INPUT(x), OUTPUT(y), `y = NAND(a, b, ...)`, `#`
// comments, blank lines. Distinct BenchParseError kinds for syntax errors,
// duplicate drivers, undefined fanins, cycles, and unsupported gate types
// (e.g. DFF). Definitions may reference signals defined later in the file.
Netlist parse_bench(std::string_view text, const std::string& name = "");

Netlist load_bench_file(const std::string& path);

// Canonical form: INPUT lines, blank, OUTPUT lines, blank, one gate per line
// with `out = KIND(a, b)` spacing. parse(serialize(nl)) == nl.
std::string serialize_bench(const Netlist& nl);

}  // namespace gnrpg
