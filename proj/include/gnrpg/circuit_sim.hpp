#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "gnrpg/circuit.hpp"
#include "gnrpg/errors.hpp"

namespace gnrpg {

enum class Integration { BackwardEuler, Trapezoidal };

struct SimConfig {
    double abstol = 1e-12;    // A, KCL residual tolerance
    double reltol = 1e-6;
    int max_newton_iters = 100;
    double dt = 1e-12;        // s
    double t_end = 1e-9;      // s
    Integration integration = Integration::Trapezoidal;
    double gmin = 1e-12;      // S, node-to-ground convergence aid
    double fd_step = 1e-6;    // V, central-difference step for device Jacobians

    void validate() const;
};

struct Waveform {
    std::string node;
    std::vector<double> times;  // uniform dt, starting at 0
    std::vector<double> volts;
};

/// Piecewise-linear voltage schedules, per source node. Nodes without a
/// schedule keep the VoltageSource's static value. Times clamp outside the
/// schedule range.
struct Stimulus {
    std::map<std::string, std::vector<std::pair<double, double>>> schedules;

    void set_constant(const std::string& node, double volts);
    void set_step(const std::string& node, double v0, double v1, double t_edge, double t_rise);
    double value(const std::string& node, double t, double fallback) const;
};

struct DcSolution {
    std::vector<std::string> nodes;  // all circuit nodes (ground excluded)
    std::vector<double> volts;
    double max_residual_a = 0.0;
    int newton_iters = 0;

    double voltage(const std::string& node) const;  // ground -> 0
};

// Newton iteration on nodal KCL. Converged when every node residual < abstol
// and the last voltage update < reltol*|V| + 1e-9 V. Falls back to source
// stepping (10 ramp stages), then gmin stepping, then a back-Euler
// pseudo-transient relaxation; throws DcFailure (carrying the worst-residual
// node) when none converges. `warm_start` seeds Newton with a previous
// solution of the same circuit (the fallbacks still run from scratch).
DcSolution dc_operating_point(const Circuit& c, const SimConfig& cfg,
                              const Stimulus* stim = nullptr,
                              const DcSolution* warm_start = nullptr);

struct TransientResult {
    std::vector<Waveform> probes;
    std::vector<double> supply_current_a;  // current drawn from VDD, per sample
    double t_stop = 0.0;
    bool stopped_early = false;
};

// Implicit fixed-step integration with Newton at each step; the initial
// condition is the DC point at the t=0 stimulus values. `stop` (optional) is
// evaluated on the probe values after each step; returning true ends the run
// at that sample. Throws TransientFailure with the failing time on step
// non-convergence.
TransientResult transient(const Circuit& c, const Stimulus& stim, const SimConfig& cfg,
                          const std::vector<std::string>& probes,
                          const std::function<bool(double, const std::vector<double>&)>& stop = {},
                          const DcSolution* warm_start = nullptr);

// First v_ref crossing of `out` at or after the first v_ref crossing of `in`,
// linearly interpolated between samples. Throws NoCrossingError.
double measure_delay(const Waveform& in, const Waveform& out, double v_ref);
double measure_delay(const std::vector<Waveform>& wfs, const std::string& in_node,
                     const std::string& out_node, double v_ref);

// Current delivered by the ideal source on `source_node` into the circuit at
// the DC point (device-sum, not a residual).
double supply_current(const Circuit& c, const DcSolution& sol, const std::string& source_node);

// Header `time_s,<node>...`, one row per step. All waveforms must share times.
void write_waveforms_csv(std::ostream& os, const std::vector<Waveform>& wfs);

}  // namespace gnrpg
