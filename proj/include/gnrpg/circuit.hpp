#pragma once

#include <string>
#include <unordered_set>
#include <variant>
#include <vector>

#include "gnrpg/device_models.hpp"
#include "gnrpg/netlist.hpp"

namespace gnrpg {

// Reserved node names
inline constexpr const char* kVdd = "VDD";
inline constexpr const char* kGnd = "GND";
inline constexpr const char* kVgnr = "VGNR";

enum class DeviceRole { Logic, PowerSwitch };

struct Mosfet {
    std::string drain, gate, source, bulk;
    MosParams params;
    double width_mult = 1.0;
    DeviceRole role = DeviceRole::Logic;
    std::string label;
};

struct GnrFetDevice {
    std::string drain, gate, source, substrate;
    GnrFet fet;
    DeviceRole role = DeviceRole::PowerSwitch;
    std::string label;
};

struct Capacitor {
    std::string node_a, node_b;
    double farads;
    std::string label;
};

struct Resistor {
    std::string node_a, node_b;
    double ohms;
    std::string label;
};

// Ideal node-to-ground voltage source; the value may be overridden per time
// point by a Stimulus schedule on the same node.
struct VoltageSource {
    std::string node;
    double volts;
    std::string label;
};

// Constant current injected into the node from ground.
struct CurrentSource {
    std::string node;
    double amps;
    std::string label;
};

using Device = std::variant<Mosfet, GnrFetDevice, Capacitor, Resistor, VoltageSource, CurrentSource>;

/// Flat transistor/capacitor/source graph over named nodes. Nodes are
/// registered in first-use order (the simulator's matrix ordering), with
/// ground_ref always implicit.
struct Circuit {
    std::string name;
    std::string ground_ref = kGnd;
    std::vector<Device> devices;
    std::vector<std::string> nodes;  // unique, insertion order, excludes ground_ref

    void add(Device dev);
    bool has_node(const std::string& node) const;
    int transistor_count() const;
    bool has_source_on(const std::string& node) const;

private:
    void touch(const std::string& node);
    std::unordered_set<std::string> node_set_;
};

struct ExpandOptions {
    MosParams nmos;           // uniform module NMOS card
    MosParams pmos;           // uniform module PMOS card (2x width by default)
    double c_load_f = 1e-16;  // lumped load per gate output
};

// Static-CMOS expansion. Every pull-down network sources from VGNR (not GND)
// so a footer can be attached later; pull-ups source from VDD. Device counts
// per gate:
//   NOT 2, BUFF 4, NAND-k/NOR-k 2k, AND-k/OR-k 2k+2,
//   XOR-2 16 (four NAND2), XNOR-2 18, k-ary XOR/XNOR chain left-associative
//   at 16 per pair (+2 for XNOR's final inverter).
// Each gate output gets a c_load_f capacitor to ground. Primary inputs and
// VDD get ideal voltage sources (inputs default to 0 V until driven).
Circuit expand_to_transistors(const Netlist& nl, const ExpandOptions& opts);

// Sum of width*multiplier over N-polarity MOSFETs, excluding power switches. nm
double total_nmos_width_nm(const Circuit& c);

}  // namespace gnrpg
