#include "gnrpg/circuit.hpp"

#include <algorithm>
#include <unordered_set>

namespace gnrpg {

namespace {

struct NodeVisitor {
    std::vector<std::string> out;
    void operator()(const Mosfet& m) { out = {m.drain, m.gate, m.source, m.bulk}; }
    void operator()(const GnrFetDevice& g) { out = {g.drain, g.gate, g.source, g.substrate}; }
    void operator()(const Capacitor& c) { out = {c.node_a, c.node_b}; }
    void operator()(const Resistor& r) { out = {r.node_a, r.node_b}; }
    void operator()(const VoltageSource& v) { out = {v.node}; }
    void operator()(const CurrentSource& i) { out = {i.node}; }
};

}  // namespace

void Circuit::touch(const std::string& node) {
    if (node == ground_ref) return;
    if (node_set_.insert(node).second) nodes.push_back(node);
}

bool Circuit::has_node(const std::string& node) const {
    return node == ground_ref || node_set_.count(node) > 0;
}

void Circuit::add(Device dev) {
    NodeVisitor v;
    std::visit(v, dev);
    for (const auto& n : v.out) touch(n);
    devices.push_back(std::move(dev));
}

int Circuit::transistor_count() const {
    int n = 0;
    for (const auto& d : devices)
        if (std::holds_alternative<Mosfet>(d) || std::holds_alternative<GnrFetDevice>(d)) ++n;
    return n;
}

bool Circuit::has_source_on(const std::string& node) const {
    for (const auto& d : devices)
        if (const auto* v = std::get_if<VoltageSource>(&d); v && v->node == node) return true;
    return false;
}

namespace {

class Expander {
public:
    Expander(const Netlist& nl, const ExpandOptions& opts) : nl_(nl), opts_(opts) {
        circuit_.name = nl.name;
    }

    Circuit run() {
        circuit_.add(VoltageSource{kVdd, 0.0, "VDD"});
        for (const auto& in : nl_.inputs) circuit_.add(VoltageSource{in, 0.0, "in:" + in});
        for (const auto& g : nl_.gates) emit_gate(g);
        return std::move(circuit_);
    }

private:
    const Netlist& nl_;
    const ExpandOptions& opts_;
    Circuit circuit_;
    int tmp_ = 0;

    std::string fresh(const std::string& base, const std::string& tag) {
        return base + "#" + tag + std::to_string(tmp_++);
    }

    void add_nmos(const std::string& d, const std::string& g, const std::string& s,
                  const std::string& label) {
        circuit_.add(Mosfet{d, g, s, kGnd, opts_.nmos, 1.0, DeviceRole::Logic, label});
    }
    void add_pmos(const std::string& d, const std::string& g, const std::string& s,
                  const std::string& label) {
        circuit_.add(Mosfet{d, g, s, kVdd, opts_.pmos, 1.0, DeviceRole::Logic, label});
    }

    void add_load(const std::string& node) {
        circuit_.add(Capacitor{node, kGnd, opts_.c_load_f, "load:" + node});
    }

    void emit_inverter(const std::string& in, const std::string& out) {
        add_pmos(out, in, kVdd, "inv:" + out);
        add_nmos(out, in, kVgnr, "inv:" + out);
        add_load(out);
    }

    // k parallel pull-ups from VDD, k series pull-downs to VGNR
    void emit_nand(const std::vector<std::string>& ins, const std::string& out) {
        for (const auto& in : ins) add_pmos(out, in, kVdd, "nand:" + out);
        std::string lower = kVgnr;
        for (size_t i = ins.size(); i-- > 1;) {
            const std::string mid = fresh(out, "pd");
            add_nmos(mid, ins[i], lower, "nand:" + out);
            lower = mid;
        }
        add_nmos(out, ins[0], lower, "nand:" + out);
        add_load(out);
    }

    // k series pull-ups from VDD, k parallel pull-downs to VGNR
    void emit_nor(const std::vector<std::string>& ins, const std::string& out) {
        std::string upper = kVdd;
        for (size_t i = 0; i + 1 < ins.size(); ++i) {
            const std::string mid = fresh(out, "pu");
            add_pmos(mid, ins[i], upper, "nor:" + out);
            upper = mid;
        }
        add_pmos(out, ins.back(), upper, "nor:" + out);
        for (const auto& in : ins) add_nmos(out, in, kVgnr, "nor:" + out);
        add_load(out);
    }

    // 4-NAND form: y = NAND(NAND(a, w), NAND(b, w)) with w = NAND(a, b)
    void emit_xor2(const std::string& a, const std::string& b, const std::string& out) {
        const std::string w = fresh(out, "x");
        const std::string p = fresh(out, "x");
        const std::string q = fresh(out, "x");
        emit_nand({a, b}, w);
        emit_nand({a, w}, p);
        emit_nand({b, w}, q);
        emit_nand({p, q}, out);
    }

    std::string emit_xor_chain(const std::vector<std::string>& ins, const std::string& out) {
        std::string acc = ins[0];
        for (size_t i = 1; i < ins.size(); ++i) {
            const std::string next = (i + 1 == ins.size()) ? out : fresh(out, "xc");
            emit_xor2(acc, ins[i], next);
            acc = next;
        }
        return acc;
    }

    void emit_gate(const Gate& g) {
        switch (g.kind) {
            case GateKind::Not:
                emit_inverter(g.fanins[0], g.output);
                break;
            case GateKind::Buff: {
                const std::string mid = fresh(g.output, "b");
                emit_inverter(g.fanins[0], mid);
                emit_inverter(mid, g.output);
                break;
            }
            case GateKind::Nand:
                emit_nand(g.fanins, g.output);
                break;
            case GateKind::Nor:
                emit_nor(g.fanins, g.output);
                break;
            case GateKind::And: {
                const std::string mid = fresh(g.output, "a");
                emit_nand(g.fanins, mid);
                emit_inverter(mid, g.output);
                break;
            }
            case GateKind::Or: {
                const std::string mid = fresh(g.output, "o");
                emit_nor(g.fanins, mid);
                emit_inverter(mid, g.output);
                break;
            }
            case GateKind::Xor:
                emit_xor_chain(g.fanins, g.output);
                break;
            case GateKind::Xnor: {
                const std::string mid = fresh(g.output, "xn");
                emit_xor_chain(g.fanins, mid);
                emit_inverter(mid, g.output);
                break;
            }
        }
    }
};

}  // namespace

Circuit expand_to_transistors(const Netlist& nl, const ExpandOptions& opts) {
    nl.topological_order();  // validate acyclicity before emitting devices
    Expander ex(nl, opts);
    return ex.run();
}

double total_nmos_width_nm(const Circuit& c) {
    double sum = 0.0;
    for (const auto& d : c.devices) {
        const auto* m = std::get_if<Mosfet>(&d);
        if (m && m->role == DeviceRole::Logic && m->params.polarity == Polarity::N)
            sum += m->params.width_nm * m->width_mult;
    }
    return sum;
}

}  // namespace gnrpg
