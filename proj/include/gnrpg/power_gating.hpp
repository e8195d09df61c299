#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gnrpg/circuit.hpp"
#include "gnrpg/circuit_sim.hpp"
#include "gnrpg/device_models.hpp"
#include "gnrpg/netlist.hpp"

namespace gnrpg {

enum class PgKind { NoGating, MosPg, GmcpgSs, GmcpgNs, TmGmcpg, QmGmcpg };
enum class PgMode { Active, Nap, Slumber, Sleep };

const char* pg_kind_name(PgKind kind);
const char* pg_mode_name(PgMode mode);
std::optional<PgKind> pg_kind_from_name(const std::string& name);
std::optional<PgMode> pg_mode_from_name(const std::string& name);

/// Control-signal encoding for the quad-mode footer. Only the four mode rows
/// are valid encodings; validate() rejects anything else.
struct QmControls {
    int nps = 0;
    int sls = 0;
    int sps = 0;

    void validate() const;
    bool operator==(const QmControls&) const = default;
};

// Mode -> control row:
//   Active  (0,0,1)  all switches on
//   Nap     (1,0,0)  ST1 partially on (forward back-gate bias)
//   Slumber (0,1,0)  ST2 partially on
//   Sleep   (0,0,0)  all switches off
QmControls qm_mode_controls(PgMode mode);

struct PgStructure {
    PgKind kind = PgKind::GmcpgSs;
    double switch_size_ratio = 0.01;  // fraction of total module NMOS width
    int ns_switch_count = 4;
    int qm_n1 = 15;  // ST1 dimer lines (larger, smaller gap, more current)
    int qm_n2 = 12;  // ST2 dimer lines

    static PgStructure make(PgKind kind);  // kind-specific default ratio
    void validate() const;
    bool uses_mode(PgMode mode) const;
};

/// All device/supply/measurement knobs for a gated run. Every field lands in
/// the report fingerprint.
struct PgOptions {
    double v_module = 0.7;   // module rail, V
    double v_switch = 0.35;  // switch gate-drive rail, V
    MosParams nmos;          // module NMOS card
    MosParams pmos;          // module PMOS card
    double c_load_f = 1e-16;
    double mosps_vth_offset = 0.15;     // high-Vth footer offset over module NMOS
    GnrGeometry gnr;                    // footer ribbon (reference device)
    int subband_count = 4;
    double n0 = 2.0;
    double beta_cds = 0.05;
    double temperature_k = 300.0;
    double back_gate_bias_frac = 0.2;   // V_BG = frac * v_module for partial-on
    double wake_threshold_frac = 0.05;  // VGNR crossing level, fraction of v_module
    double c_vgnr_per_nmos_f = 2e-17;   // explicit VGNR rail parasitic, per module NMOS
    int leakage_vector_count = 10;      // all-0, all-1, 8 seeded pseudo-random
    unsigned seed = 1;
    int transient_steps = 1000;         // fixed-step count per measurement window
    double max_window_s = 2e-6;         // give up (absent cell) beyond this window

    PgOptions();
    std::string fingerprint(const SimConfig& cfg) const;
};

/// A power-gated circuit plus the control-node bookkeeping needed to drive it.
struct GatedCircuit {
    Circuit circuit;
    PgStructure structure;
    PgOptions opts;
    Netlist netlist;                         // source netlist (for stimulus search)
    std::vector<std::string> control_nodes;  // footer control sources
    double footer_width_nm = 0.0;            // realized total switch width
    int footer_ribbons = 0;                  // total ribbons (GNR footers)
};

// Attaches the footer between VGNR and GND per structure kind:
//   NoGating  VGNR shorted to GND by an ideal source
//   MosPg     one high-Vth NMOS, width = ratio * total module NMOS width
//   GmcpgSs   one N-GNRFET, n_rib chosen so W_G >= ratio * total width (>= 1)
//   GmcpgNs   the SS ribbon budget split evenly over min(ns_switch_count, R)
//             independently-gated switches (total width preserved)
//   Tm/Qm     ST0 at the SS sizing plus ST1 (N1) [and ST2 (N2), QM only] at
//             ratio/4 each; gates share the SPS node, back-gates are NPS/SLS
// Also adds the explicit VGNR parasitic capacitance. Throws SizingError when a
// switch width would come out non-positive.
GatedCircuit attach_footer(const Circuit& c, const Netlist& nl, const PgStructure& pg,
                           const PgOptions& opts);

// Control-source voltage levels realizing `mode` on this structure's footer.
std::map<std::string, double> mode_control_levels(const GatedCircuit& gc, PgMode mode);

// V_cc * |I(VDD)| at the DC point with mode controls applied and primary
// inputs held at `input_bits`.
double measure_leakage(const GatedCircuit& gc, PgMode mode, const std::vector<int>& input_bits,
                       const SimConfig& cfg);

struct LeakageReport {
    double mean_w = 0.0;
    double vgnr_v = 0.0;  // mean VGNR level across the input set
    std::vector<double> per_vector_w;
};

// Mean over the documented input set: all-zeros, all-ones, and
// (leakage_vector_count - 2) seeded pseudo-random vectors.
LeakageReport measure_leakage_set(const GatedCircuit& gc, PgMode mode, const SimConfig& cfg);

// Transient from the `from`-mode DC point; Active controls applied at t=0.
// Returns the first time VGNR falls to wake_threshold_frac * v_module.
// NoGating returns 0. Throws TimeoutError if the threshold is never reached.
double measure_wakeup(const GatedCircuit& gc, PgMode from, const SimConfig& cfg);

/// A sensitizable input-to-output transition: with inputs held at base_bits,
/// toggling `toggle_input` flips `observed_output`.
struct TransitionSpec {
    std::vector<int> base_bits;
    std::string toggle_input;
    std::string observed_output;
};

// Deterministic search (seeded) over input vectors and single-input toggles.
std::optional<TransitionSpec> find_sensitizable_transition(const Netlist& nl, unsigned seed);

struct ActiveMetrics {
    double delay_s = 0.0;
    double active_power_w = 0.0;
    double pdp_j = 0.0;
    double vgnr_active_v = 0.0;      // DC droop in Active mode
    std::vector<Waveform> probes;    // toggle input, observed output, VGNR
};

// Active-mode delay at 50% of v_module plus mean V_cc*I(VDD) over the
// transient window; pdp = active_power * delay.
ActiveMetrics measure_active_metrics(const GatedCircuit& gc, const TransitionSpec& path,
                                     const SimConfig& cfg);

enum class SweepParam { DimerLines, RibbonCount, Spacing };

struct SweepRow {
    double value = 0.0;
    std::optional<double> delay_s;     // absent on per-point sim failure
    std::optional<double> leakage_w;
    std::string note;                  // failure reason when a cell is absent
};

// Re-sizes / re-parameterizes the GMCPG-SS footer per value on the standard
// inverter-chain fixture and measures sleep leakage and active delay. Failures
// are recorded as absent cells and the sweep continues.
std::vector<SweepRow> sweep_device_param(SweepParam param, const std::vector<double>& values,
                                         const PgOptions& opts, const SimConfig& cfg);

struct MetricsReport {
    std::string benchmark;
    std::string structure;
    double leakage_w = 0.0;
    double delay_s = 0.0;
    double wakeup_s = 0.0;
    double active_power_w = 0.0;
    double pdp_j = 0.0;
    double vgnr_sleep_v = 0.0;
    std::string fingerprint;
    std::string error;  // nonempty if the cell failed
};

struct BenchmarkCase {
    std::string name;
    Netlist netlist;
};

// Full cross product of (benchmark x structure) runs; per-cell failures are
// recorded in the report's error field and the run continues. Cells execute
// in parallel; the result order is the deterministic cross-product order.
// rest_mode picks the mode for the leakage/VGNR columns (gated structures
// that do not support it record an error; NoGating always rests in Active).
std::vector<MetricsReport> compare_structures(const std::vector<BenchmarkCase>& benchmarks,
                                              const std::vector<PgKind>& structures,
                                              const PgOptions& opts, const SimConfig& cfg,
                                              PgMode rest_mode = PgMode::Sleep);

// The standard power-gated module fixture: `chains` independent inverter
// chains of `stages` inverters each (inputs in0.., outputs out0..).
Netlist make_inverter_chain(int chains = 20, int stages = 20);

// Seeded leakage input vectors: all-zeros, all-ones, then pseudo-random.
std::vector<std::vector<int>> leakage_input_vectors(int n_inputs, int count, unsigned seed);

}  // namespace gnrpg
