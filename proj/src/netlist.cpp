#include "gnrpg/netlist.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace gnrpg {

const char* gate_kind_name(GateKind kind) {
    switch (kind) {
        case GateKind::And: return "AND";
        case GateKind::Nand: return "NAND";
        case GateKind::Or: return "OR";
        case GateKind::Nor: return "NOR";
        case GateKind::Not: return "NOT";
        case GateKind::Buff: return "BUFF";
        case GateKind::Xor: return "XOR";
        case GateKind::Xnor: return "XNOR";
    }
    return "?";
}

int Netlist::driver_index(const std::string& signal) const {
    for (size_t i = 0; i < gates.size(); ++i)
        if (gates[i].output == signal) return static_cast<int>(i);
    return -1;
}

std::vector<int> Netlist::topological_order() const {
    std::unordered_map<std::string, int> driver;
    for (size_t i = 0; i < gates.size(); ++i) driver[gates[i].output] = static_cast<int>(i);

    std::vector<int> indegree(gates.size(), 0);
    std::vector<std::vector<int>> fanout(gates.size());
    for (size_t i = 0; i < gates.size(); ++i) {
        for (const auto& fi : gates[i].fanins) {
            auto it = driver.find(fi);
            if (it != driver.end()) {
                fanout[it->second].push_back(static_cast<int>(i));
                ++indegree[i];
            }
        }
    }
    std::vector<int> ready;
    for (size_t i = 0; i < gates.size(); ++i)
        if (indegree[i] == 0) ready.push_back(static_cast<int>(i));
    std::vector<int> order;
    order.reserve(gates.size());
    for (size_t k = 0; k < ready.size(); ++k) {
        const int g = ready[k];
        order.push_back(g);
        for (int next : fanout[g])
            if (--indegree[next] == 0) ready.push_back(next);
    }
    if (order.size() != gates.size())
        throw BenchParseError(BenchErrorKind::CycleDetected, 0, 0,
                              "combinational cycle in netlist " + name);
    return order;
}

int Netlist::depth() const {
    std::unordered_map<std::string, int> level;
    for (const auto& in : inputs) level[in] = 0;
    int maxd = 0;
    for (int gi : topological_order()) {
        const Gate& g = gates[gi];
        int d = 0;
        for (const auto& fi : g.fanins) d = std::max(d, level[fi]);
        level[g.output] = d + 1;
        maxd = std::max(maxd, d + 1);
    }
    return maxd;
}

std::map<std::string, bool> Netlist::evaluate(
    const std::map<std::string, bool>& input_values) const {
    std::map<std::string, bool> val;
    for (const auto& in : inputs) val[in] = input_values.at(in);
    for (int gi : topological_order()) {
        const Gate& g = gates[gi];
        bool v = false;
        switch (g.kind) {
            case GateKind::And:
            case GateKind::Nand: {
                v = true;
                for (const auto& fi : g.fanins) v = v && val.at(fi);
                if (g.kind == GateKind::Nand) v = !v;
                break;
            }
            case GateKind::Or:
            case GateKind::Nor: {
                v = false;
                for (const auto& fi : g.fanins) v = v || val.at(fi);
                if (g.kind == GateKind::Nor) v = !v;
                break;
            }
            case GateKind::Not: v = !val.at(g.fanins[0]); break;
            case GateKind::Buff: v = val.at(g.fanins[0]); break;
            case GateKind::Xor:
            case GateKind::Xnor: {
                v = false;
                for (const auto& fi : g.fanins) v = v != val.at(fi);
                if (g.kind == GateKind::Xnor) v = !v;
                break;
            }
        }
        val[g.output] = v;
    }
    return val;
}

namespace {

bool is_name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '[' ||
           c == ']' || c == '$' || c == '/';
}

}  // namespace

Netlist parse_bench(std::string_view text, const std::string& name) {
    Netlist nl;
    nl.name = name;

    std::unordered_set<std::string> declared_inputs;
    std::unordered_map<std::string, int> driver_line;

    std::istringstream in{std::string(text)};
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = raw;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);

        size_t i = 0;
        auto skip_ws = [&] { while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i; };
        auto take_name = [&]() -> std::string {
            skip_ws();
            const size_t b = i;
            while (i < line.size() && is_name_char(line[i])) ++i;
            if (i == b)
                throw BenchParseError(BenchErrorKind::Syntax, lineno, static_cast<int>(i) + 1,
                                      "expected a signal name");
            return std::string(line.substr(b, i - b));
        };
        auto expect = [&](char c) {
            skip_ws();
            if (i >= line.size() || line[i] != c)
                throw BenchParseError(BenchErrorKind::Syntax, lineno, static_cast<int>(i) + 1,
                                      std::string("expected `") + c + "`");
            ++i;
        };

        skip_ws();
        if (i >= line.size()) continue;

        // INPUT(x) / OUTPUT(y)
        if (line.compare(i, 6, "INPUT(") == 0 || line.compare(i, 7, "OUTPUT(") == 0) {
            const bool is_input = line[i] == 'I';
            i += is_input ? 6 : 7;
            const std::string sig = take_name();
            expect(')');
            skip_ws();
            if (i < line.size())
                throw BenchParseError(BenchErrorKind::Syntax, lineno, static_cast<int>(i) + 1,
                                      "trailing text after declaration");
            if (is_input) {
                if (!declared_inputs.insert(sig).second)
                    throw BenchParseError(BenchErrorKind::DuplicateDriver, lineno, 1,
                                          "input `" + sig + "` declared twice");
                nl.inputs.push_back(sig);
            } else {
                nl.outputs.push_back(sig);
            }
            continue;
        }

        // out = KIND(a, b, ...)
        const std::string out = take_name();
        expect('=');
        skip_ws();
        const size_t kb = i;
        while (i < line.size() && std::isalpha(static_cast<unsigned char>(line[i]))) ++i;
        const std::string kind_str(line.substr(kb, i - kb));
        if (kind_str.empty())
            throw BenchParseError(BenchErrorKind::Syntax, lineno, static_cast<int>(kb) + 1,
                                  "expected a gate type");
        GateKind kind;
        if (kind_str == "AND") kind = GateKind::And;
        else if (kind_str == "NAND") kind = GateKind::Nand;
        else if (kind_str == "OR") kind = GateKind::Or;
        else if (kind_str == "NOR") kind = GateKind::Nor;
        else if (kind_str == "NOT") kind = GateKind::Not;
        else if (kind_str == "BUFF" || kind_str == "BUF") kind = GateKind::Buff;
        else if (kind_str == "XOR") kind = GateKind::Xor;
        else if (kind_str == "XNOR") kind = GateKind::Xnor;
        else
            throw BenchParseError(BenchErrorKind::UnsupportedGate, lineno,
                                  static_cast<int>(kb) + 1,
                                  "unsupported gate type `" + kind_str +
                                      "` (sequential elements are not supported)");
        expect('(');
        std::vector<std::string> fanins;
        fanins.push_back(take_name());
        for (;;) {
            skip_ws();
            if (i < line.size() && line[i] == ',') {
                ++i;
                fanins.push_back(take_name());
            } else {
                break;
            }
        }
        expect(')');
        skip_ws();
        if (i < line.size())
            throw BenchParseError(BenchErrorKind::Syntax, lineno, static_cast<int>(i) + 1,
                                  "trailing text after gate definition");

        const bool unary = kind == GateKind::Not || kind == GateKind::Buff;
        if (unary && fanins.size() != 1)
            throw BenchParseError(BenchErrorKind::Syntax, lineno, 1,
                                  kind_str + " takes exactly one fanin");
        if (!unary && fanins.size() < 2)
            throw BenchParseError(BenchErrorKind::Syntax, lineno, 1,
                                  kind_str + " takes at least two fanins");

        if (declared_inputs.count(out) || driver_line.count(out))
            throw BenchParseError(BenchErrorKind::DuplicateDriver, lineno, 1,
                                  "signal `" + out + "` has multiple drivers");
        driver_line[out] = lineno;
        nl.gates.push_back(Gate{out, kind, std::move(fanins)});
    }

    // fanins must be declared inputs or gate outputs
    for (const auto& g : nl.gates) {
        for (const auto& fi : g.fanins) {
            if (!declared_inputs.count(fi) && !driver_line.count(fi))
                throw BenchParseError(BenchErrorKind::UndefinedFanin, driver_line[g.output], 1,
                                      "fanin `" + fi + "` of `" + g.output + "` is undefined");
        }
    }
    for (const auto& out : nl.outputs) {
        if (!declared_inputs.count(out) && !driver_line.count(out))
            throw BenchParseError(BenchErrorKind::UndefinedFanin, 0, 0,
                                  "output `" + out + "` references no signal");
    }

    nl.topological_order();  // throws CycleDetected on a cycle
    return nl;
}

Netlist load_bench_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path, 0, "cannot open bench file");
    std::ostringstream ss;
    ss << in.rdbuf();
    std::string base = path;
    const auto slash = base.find_last_of('/');
    if (slash != std::string::npos) base.erase(0, slash + 1);
    const auto dot = base.rfind(".bench");
    if (dot != std::string::npos) base.erase(dot);
    return parse_bench(ss.str(), base);
}

std::string serialize_bench(const Netlist& nl) {
    std::ostringstream out;
    for (const auto& in : nl.inputs) out << "INPUT(" << in << ")\n";
    out << "\n";
    for (const auto& o : nl.outputs) out << "OUTPUT(" << o << ")\n";
    out << "\n";
    for (const auto& g : nl.gates) {
        out << g.output << " = " << gate_kind_name(g.kind) << "(";
        for (size_t i = 0; i < g.fanins.size(); ++i) {
            if (i) out << ", ";
            out << g.fanins[i];
        }
        out << ")\n";
    }
    return out.str();
}

}  // namespace gnrpg
