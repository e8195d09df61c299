#include "gnrpg/power_gating.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <thread>

namespace gnrpg {

const char* pg_kind_name(PgKind kind) {
    switch (kind) {
        case PgKind::NoGating: return "nogating";
        case PgKind::MosPg: return "mospg";
        case PgKind::GmcpgSs: return "gmcpg-ss";
        case PgKind::GmcpgNs: return "gmcpg-ns";
        case PgKind::TmGmcpg: return "tm-gmcpg";
        case PgKind::QmGmcpg: return "qm-gmcpg";
    }
    return "?";
}

const char* pg_mode_name(PgMode mode) {
    switch (mode) {
        case PgMode::Active: return "active";
        case PgMode::Nap: return "nap";
        case PgMode::Slumber: return "slumber";
        case PgMode::Sleep: return "sleep";
    }
    return "?";
}

std::optional<PgKind> pg_kind_from_name(const std::string& name) {
    for (PgKind k : {PgKind::NoGating, PgKind::MosPg, PgKind::GmcpgSs, PgKind::GmcpgNs,
                     PgKind::TmGmcpg, PgKind::QmGmcpg})
        if (name == pg_kind_name(k)) return k;
    return std::nullopt;
}

std::optional<PgMode> pg_mode_from_name(const std::string& name) {
    for (PgMode m : {PgMode::Active, PgMode::Nap, PgMode::Slumber, PgMode::Sleep})
        if (name == pg_mode_name(m)) return m;
    return std::nullopt;
}

void QmControls::validate() const {
    const bool ok = (*this == QmControls{0, 0, 1}) || (*this == QmControls{1, 0, 0}) ||
                    (*this == QmControls{0, 1, 0}) || (*this == QmControls{0, 0, 0});
    if (!ok) throw std::invalid_argument("QmControls: not one of the four mode rows");
}

QmControls qm_mode_controls(PgMode mode) {
    switch (mode) {
        case PgMode::Active: return QmControls{0, 0, 1};
        case PgMode::Nap: return QmControls{1, 0, 0};
        case PgMode::Slumber: return QmControls{0, 1, 0};
        case PgMode::Sleep: return QmControls{0, 0, 0};
    }
    throw std::invalid_argument("bad mode");
}

PgStructure PgStructure::make(PgKind kind) {
    PgStructure s;
    s.kind = kind;
    s.switch_size_ratio = kind == PgKind::MosPg ? 0.10 : 0.01;
    return s;
}

void PgStructure::validate() const {
    if (!(switch_size_ratio > 0 && switch_size_ratio <= 1))
        throw std::invalid_argument("switch_size_ratio must be in (0, 1]");
    if (ns_switch_count < 1) throw std::invalid_argument("ns_switch_count must be >= 1");
    if (kind == PgKind::QmGmcpg || kind == PgKind::TmGmcpg) {
        if (qm_n1 <= qm_n2) throw std::invalid_argument("QM requires N1 > N2");
        if (classify_chirality(qm_n1) != Chirality::Semiconducting ||
            classify_chirality(qm_n2) != Chirality::Semiconducting)
            throw std::invalid_argument("QM dimer pair must both be semiconducting");
    }
}

bool PgStructure::uses_mode(PgMode mode) const {
    switch (kind) {
        case PgKind::NoGating: return mode == PgMode::Active;
        case PgKind::MosPg:
        case PgKind::GmcpgSs:
        case PgKind::GmcpgNs: return mode == PgMode::Active || mode == PgMode::Sleep;
        case PgKind::TmGmcpg: return mode != PgMode::Slumber;
        case PgKind::QmGmcpg: return true;
    }
    return false;
}

PgOptions::PgOptions() {
    nmos = default_nmos();
    pmos = default_pmos();
}

std::string PgOptions::fingerprint(const SimConfig& cfg) const {
    char buf[64];
    std::ostringstream os;
    auto kv = [&](const char* k, double v) {
        std::snprintf(buf, sizeof buf, "%.9g", v);
        os << k << "=" << buf << ";";
    };
    kv("v_module", v_module);
    kv("v_switch", v_switch);
    kv("nmos_vth", nmos.v_th);
    kv("pmos_vth", pmos.v_th);
    kv("nmos_w", nmos.width_nm);
    kv("pmos_w", pmos.width_nm);
    kv("ideality", nmos.ideality);
    kv("i_spec_n", nmos.i_spec);
    kv("i_spec_p", pmos.i_spec);
    kv("c_load_f", c_load_f);
    kv("mosps_vth_offset", mosps_vth_offset);
    os << "gnr_n=" << gnr.n_dimer << ";gnr_rib=" << gnr.n_rib << ";";
    kv("gnr_wsp", gnr.w_sp_nm);
    kv("gnr_lch", gnr.l_ch_nm);
    kv("gnr_toxt", gnr.t_ox_top_nm);
    kv("gnr_toxs", gnr.t_ox_sub_nm);
    kv("gnr_fdop", gnr.f_dop);
    os << "subbands=" << subband_count << ";";
    kv("n0", n0);
    kv("beta_cds", beta_cds);
    kv("temp_k", temperature_k);
    kv("vbg_frac", back_gate_bias_frac);
    kv("wake_frac", wake_threshold_frac);
    kv("c_vgnr_per_nmos", c_vgnr_per_nmos_f);
    os << "leak_vectors=" << leakage_vector_count << ";seed=" << seed << ";";
    os << "steps=" << transient_steps << ";";
    kv("max_window", max_window_s);
    kv("abstol", cfg.abstol);
    kv("reltol", cfg.reltol);
    kv("gmin", cfg.gmin);
    os << "integ=" << (cfg.integration == Integration::Trapezoidal ? "trap" : "be") << ";";
    return os.str();
}

namespace {

int module_nmos_count(const Circuit& c) {
    int n = 0;
    for (const auto& d : c.devices) {
        const auto* m = std::get_if<Mosfet>(&d);
        if (m && m->role == DeviceRole::Logic && m->params.polarity == Polarity::N) ++n;
    }
    return n;
}

double ribbon_pitch_nm(const GnrGeometry& g) {
    return 2.0 * g.w_sp_nm + gnr_channel_width_nm(g.n_dimer);
}

GnrFet make_footer_fet(const PgOptions& opts, int n_dimer, int n_rib) {
    GnrGeometry g = opts.gnr;
    g.n_dimer = n_dimer;
    g.n_rib = n_rib;
    g.polarity = Polarity::N;
    return GnrFet::make(g, opts.subband_count, opts.n0, opts.beta_cds, opts.temperature_k);
}

int ribbons_for_width(const GnrGeometry& ref, int n_dimer, double target_nm) {
    GnrGeometry g = ref;
    g.n_dimer = n_dimer;
    const double pitch = ribbon_pitch_nm(g);
    return std::max(1, static_cast<int>(std::ceil(target_nm / pitch)));
}

}  // namespace

GatedCircuit attach_footer(const Circuit& c, const Netlist& nl, const PgStructure& pg,
                           const PgOptions& opts) {
    pg.validate();
    GatedCircuit gc;
    gc.circuit = c;
    gc.structure = pg;
    gc.opts = opts;
    gc.netlist = nl;

    const double total_w = total_nmos_width_nm(c);
    const int nmos_n = module_nmos_count(c);
    gc.circuit.add(Capacitor{kVgnr, kGnd, opts.c_vgnr_per_nmos_f * std::max(1, nmos_n),
                             "vgnr_parasitic"});

    const double target = pg.switch_size_ratio * total_w;
    if (pg.kind != PgKind::NoGating && !(target > 0))
        throw SizingError("power switch width would be non-positive");

    switch (pg.kind) {
        case PgKind::NoGating:
            gc.circuit.add(VoltageSource{kVgnr, 0.0, "vgnr_tie"});
            break;
        case PgKind::MosPg: {
            MosParams ps = opts.nmos;
            ps.v_th += opts.mosps_vth_offset;
            ps.width_nm = target;
            gc.circuit.add(VoltageSource{"SLEEPN", 0.0, "SLEEPN"});
            gc.circuit.add(
                Mosfet{kVgnr, "SLEEPN", kGnd, kGnd, ps, 1.0, DeviceRole::PowerSwitch, "mosps"});
            gc.control_nodes = {"SLEEPN"};
            gc.footer_width_nm = target;
            break;
        }
        case PgKind::GmcpgSs: {
            const int r = ribbons_for_width(opts.gnr, opts.gnr.n_dimer, target);
            GnrFet fet = make_footer_fet(opts, opts.gnr.n_dimer, r);
            gc.circuit.add(VoltageSource{"SLEEPN", 0.0, "SLEEPN"});
            gc.circuit.add(GnrFetDevice{kVgnr, "SLEEPN", kGnd, kGnd, fet,
                                        DeviceRole::PowerSwitch, "gnrps"});
            gc.control_nodes = {"SLEEPN"};
            gc.footer_ribbons = r;
            gc.footer_width_nm = gnr_gate_width_nm(fet.geom);
            break;
        }
        case PgKind::GmcpgNs: {
            // the SS ribbon budget, split evenly; total width preserved
            const int r_total = ribbons_for_width(opts.gnr, opts.gnr.n_dimer, target);
            const int k = std::min(pg.ns_switch_count, r_total);
            for (int i = 0; i < k; ++i) {
                const int share = r_total / k + (i < r_total % k ? 1 : 0);
                const std::string gate = "NS" + std::to_string(i);
                GnrFet fet = make_footer_fet(opts, opts.gnr.n_dimer, share);
                gc.circuit.add(VoltageSource{gate, 0.0, gate});
                gc.circuit.add(GnrFetDevice{kVgnr, gate, kGnd, kGnd, fet,
                                            DeviceRole::PowerSwitch, "gnrps" + std::to_string(i)});
                gc.control_nodes.push_back(gate);
                gc.footer_ribbons += share;
                gc.footer_width_nm += gnr_gate_width_nm(fet.geom);
            }
            break;
        }
        case PgKind::TmGmcpg:
        case PgKind::QmGmcpg: {
            const int r0 = ribbons_for_width(opts.gnr, opts.gnr.n_dimer, target);
            const int r1 = ribbons_for_width(opts.gnr, pg.qm_n1, target / 4.0);
            GnrFet st0 = make_footer_fet(opts, opts.gnr.n_dimer, r0);
            GnrFet st1 = make_footer_fet(opts, pg.qm_n1, r1);
            gc.circuit.add(VoltageSource{"SPS", 0.0, "SPS"});
            gc.circuit.add(VoltageSource{"NPS", 0.0, "NPS"});
            gc.circuit.add(
                GnrFetDevice{kVgnr, "SPS", kGnd, kGnd, st0, DeviceRole::PowerSwitch, "st0"});
            gc.circuit.add(
                GnrFetDevice{kVgnr, "SPS", kGnd, "NPS", st1, DeviceRole::PowerSwitch, "st1"});
            gc.control_nodes = {"SPS", "NPS"};
            gc.footer_ribbons = r0 + r1;
            gc.footer_width_nm = gnr_gate_width_nm(st0.geom) + gnr_gate_width_nm(st1.geom);
            if (pg.kind == PgKind::QmGmcpg) {
                const int r2 = ribbons_for_width(opts.gnr, pg.qm_n2, target / 4.0);
                GnrFet st2 = make_footer_fet(opts, pg.qm_n2, r2);
                gc.circuit.add(VoltageSource{"SLS", 0.0, "SLS"});
                gc.circuit.add(
                    GnrFetDevice{kVgnr, "SPS", kGnd, "SLS", st2, DeviceRole::PowerSwitch, "st2"});
                gc.control_nodes.push_back("SLS");
                gc.footer_ribbons += r2;
                gc.footer_width_nm += gnr_gate_width_nm(st2.geom);
            }
            break;
        }
    }
    return gc;
}

std::map<std::string, double> mode_control_levels(const GatedCircuit& gc, PgMode mode) {
    if (!gc.structure.uses_mode(mode))
        throw std::invalid_argument(std::string("mode ") + pg_mode_name(mode) +
                                    " is not valid for structure " +
                                    pg_kind_name(gc.structure.kind));
    const double v_on = gc.opts.v_switch;
    const double v_bg = gc.opts.back_gate_bias_frac * gc.opts.v_module;
    std::map<std::string, double> levels;
    switch (gc.structure.kind) {
        case PgKind::NoGating:
            break;
        case PgKind::MosPg:
        case PgKind::GmcpgSs:
        case PgKind::GmcpgNs: {
            const double v = mode == PgMode::Active ? v_on : 0.0;
            for (const auto& n : gc.control_nodes) levels[n] = v;
            break;
        }
        case PgKind::TmGmcpg:
        case PgKind::QmGmcpg: {
            const QmControls row = qm_mode_controls(mode);
            row.validate();
            levels["SPS"] = row.sps ? v_on : 0.0;
            levels["NPS"] = row.nps ? v_bg : 0.0;
            if (gc.structure.kind == PgKind::QmGmcpg) levels["SLS"] = row.sls ? v_bg : 0.0;
            break;
        }
    }
    return levels;
}

namespace {

Stimulus static_stimulus(const GatedCircuit& gc, PgMode mode, const std::vector<int>& bits) {
    Stimulus stim;
    const auto& inputs = gc.netlist.inputs;
    for (size_t i = 0; i < inputs.size(); ++i)
        stim.set_constant(inputs[i], (i < bits.size() && bits[i]) ? gc.opts.v_module : 0.0);
    stim.set_constant(kVdd, gc.opts.v_module);
    for (const auto& [node, v] : mode_control_levels(gc, mode)) stim.set_constant(node, v);
    return stim;
}

// Footer sink capability at the given VGNR level with Active controls, A.
double footer_on_current(const GatedCircuit& gc, double v_drain) {
    if (gc.structure.kind == PgKind::NoGating) return 1.0;
    const auto levels = mode_control_levels(gc, PgMode::Active);
    double sum = 0.0;
    for (const auto& d : gc.circuit.devices) {
        if (const auto* m = std::get_if<Mosfet>(&d)) {
            if (m->role != DeviceRole::PowerSwitch) continue;
            MosParams p = m->params;
            p.width_nm *= m->width_mult;
            const double vg = levels.count(m->gate) ? levels.at(m->gate) : 0.0;
            sum += mos_ids(p, BiasPoint{vg, v_drain, 0.0, 0.0});
        } else if (const auto* g = std::get_if<GnrFetDevice>(&d)) {
            const double vg = levels.count(g->gate) ? levels.at(g->gate) : 0.0;
            const double vsub = levels.count(g->substrate) ? levels.at(g->substrate) : 0.0;
            sum += g->fet.ids(BiasPoint{vg, v_drain, 0.0, vsub});
        } else if (const auto* r = std::get_if<Resistor>(&d)) {
            // resistive VGNR-to-ground paths (linearized-switch fixtures)
            const bool a_vgnr = r->node_a == kVgnr, b_vgnr = r->node_b == kVgnr;
            const bool a_gnd = r->node_a == gc.circuit.ground_ref,
                       b_gnd = r->node_b == gc.circuit.ground_ref;
            if ((a_vgnr && b_gnd) || (b_vgnr && a_gnd)) sum += v_drain / r->ohms;
        }
    }
    return std::max(sum, 1e-18);
}

double vgnr_capacitance(const GatedCircuit& gc) {
    double c = 0.0;
    for (const auto& d : gc.circuit.devices) {
        const auto* cap = std::get_if<Capacitor>(&d);
        if (cap && (cap->node_a == kVgnr || cap->node_b == kVgnr)) c += cap->farads;
    }
    return std::max(c, 1e-18);
}

}  // namespace

double measure_leakage(const GatedCircuit& gc, PgMode mode, const std::vector<int>& input_bits,
                       const SimConfig& cfg) {
    const Stimulus stim = static_stimulus(gc, mode, input_bits);
    const DcSolution sol = dc_operating_point(gc.circuit, cfg, &stim);
    const double i_vdd = supply_current(gc.circuit, sol, kVdd);
    return gc.opts.v_module * std::abs(i_vdd);
}

std::vector<std::vector<int>> leakage_input_vectors(int n_inputs, int count, unsigned seed) {
    std::vector<std::vector<int>> vectors;
    vectors.emplace_back(n_inputs, 0);
    if (count > 1) vectors.emplace_back(n_inputs, 1);
    std::mt19937 rng(seed);
    while (static_cast<int>(vectors.size()) < count) {
        std::vector<int> v(n_inputs);
        for (auto& b : v) b = static_cast<int>(rng() & 1u);
        vectors.push_back(std::move(v));
    }
    return vectors;
}

LeakageReport measure_leakage_set(const GatedCircuit& gc, PgMode mode, const SimConfig& cfg) {
    LeakageReport rep;
    const auto vectors = leakage_input_vectors(static_cast<int>(gc.netlist.inputs.size()),
                                               gc.opts.leakage_vector_count, gc.opts.seed);
    double vgnr_sum = 0.0;
    DcSolution prev;
    for (const auto& bits : vectors) {
        const Stimulus stim = static_stimulus(gc, mode, bits);
        const DcSolution sol = dc_operating_point(gc.circuit, cfg, &stim,
                                                  rep.per_vector_w.empty() ? nullptr : &prev);
        const double w = gc.opts.v_module * std::abs(supply_current(gc.circuit, sol, kVdd));
        rep.per_vector_w.push_back(w);
        rep.mean_w += w;
        vgnr_sum += sol.voltage(kVgnr);
        prev = sol;
    }
    rep.mean_w /= static_cast<double>(vectors.size());
    rep.vgnr_v = vgnr_sum / static_cast<double>(vectors.size());
    return rep;
}

double measure_wakeup(const GatedCircuit& gc, PgMode from, const SimConfig& cfg) {
    if (gc.structure.kind == PgKind::NoGating) return 0.0;
    const double threshold = gc.opts.wake_threshold_frac * gc.opts.v_module;

    const std::vector<int> bits(gc.netlist.inputs.size(), 0);
    const Stimulus from_stim = static_stimulus(gc, from, bits);
    const DcSolution start = dc_operating_point(gc.circuit, cfg, &from_stim);
    const double v0 = start.voltage(kVgnr);
    if (v0 <= threshold) return 0.0;

    const double c_vgnr = vgnr_capacitance(gc);
    const double i_on = footer_on_current(gc, 0.5 * v0);
    const double tau = c_vgnr * v0 / i_on;
    const double wake_est = tau * std::max(1.0, std::log(v0 / threshold));
    // snap to a 1-2-5 ladder so nearby estimates land on identical grids
    double window = 12.0 * std::max(tau, wake_est);
    const double decade = std::pow(10.0, std::floor(std::log10(window)));
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (window <= m * decade) {
            window = m * decade;
            break;
        }
    }
    if (window > gc.opts.max_window_s)
        throw TimeoutError("wake-up window estimate exceeds the configured limit");

    SimConfig tcfg = cfg;
    tcfg.t_end = window;
    tcfg.dt = window / gc.opts.transient_steps;

    Stimulus stim = from_stim;
    const auto from_levels = mode_control_levels(gc, from);
    const auto active_levels = mode_control_levels(gc, PgMode::Active);
    const double stagger = gc.structure.kind == PgKind::GmcpgNs ? 0.25 * wake_est : 0.0;
    int idx = 0;
    for (const auto& node : gc.control_nodes) {
        const double t_on = stagger * idx++;
        stim.schedules[node] = {{0.0, from_levels.at(node)},
                                {t_on, from_levels.at(node)},
                                {t_on + tcfg.dt, active_levels.at(node)}};
    }

    int below = 0;
    const auto stop = [&](double, const std::vector<double>& pv) {
        if (pv[0] <= threshold) ++below;
        return below >= 3;
    };
    const TransientResult res = transient(gc.circuit, stim, tcfg, {kVgnr}, stop, &start);

    const Waveform& w = res.probes[0];
    for (size_t i = 0; i + 1 < w.times.size(); ++i) {
        if (w.volts[i] > threshold && w.volts[i + 1] <= threshold) {
            const double a = w.volts[i] - threshold;
            const double b = w.volts[i + 1] - threshold;
            const double frac = a / (a - b);
            return w.times[i] + frac * (w.times[i + 1] - w.times[i]);
        }
    }
    if (!w.volts.empty() && w.volts.front() <= threshold) return 0.0;
    throw TimeoutError("VGNR did not reach the wake threshold within t_end");
}

std::optional<TransitionSpec> find_sensitizable_transition(const Netlist& nl, unsigned seed) {
    std::mt19937 rng(seed);
    const int n = static_cast<int>(nl.inputs.size());
    for (int attempt = 0; attempt < 64; ++attempt) {
        std::vector<int> bits(n);
        if (attempt == 0) std::fill(bits.begin(), bits.end(), 0);
        else
            for (auto& b : bits) b = static_cast<int>(rng() & 1u);
        std::map<std::string, bool> base_in;
        for (int i = 0; i < n; ++i) base_in[nl.inputs[i]] = bits[i] != 0;
        const auto base = nl.evaluate(base_in);
        for (int i = 0; i < n; ++i) {
            auto flipped = base_in;
            flipped[nl.inputs[i]] = !flipped[nl.inputs[i]];
            const auto out = nl.evaluate(flipped);
            for (const auto& po : nl.outputs) {
                if (out.at(po) != base.at(po))
                    return TransitionSpec{bits, nl.inputs[i], po};
            }
        }
    }
    return std::nullopt;
}

ActiveMetrics measure_active_metrics(const GatedCircuit& gc, const TransitionSpec& path,
                                     const SimConfig& cfg) {
    const double v_ref = 0.5 * gc.opts.v_module;

    // stage-time estimate at module drive strength; footer-starved structures
    // are handled by the window retries (the step count is fixed, so each
    // retry coarsens dt in proportion to the measured scale)
    MosParams nm = gc.opts.nmos;
    MosParams pm = gc.opts.pmos;
    const double i_n =
        std::abs(mos_ids(nm, BiasPoint{gc.opts.v_module, gc.opts.v_module, 0.0, 0.0}));
    const double i_p = std::abs(
        mos_ids(pm, BiasPoint{0.0, 0.0, gc.opts.v_module, gc.opts.v_module}));
    const double q_stage = gc.opts.c_load_f * gc.opts.v_module;
    const double t_fall = q_stage / std::max(i_n, 1e-18);
    const double t_rise = q_stage / std::max(i_p, 1e-18);
    const int stages = 3 * std::max(1, gc.netlist.depth());
    double window = 6.0 * stages * 0.5 * (t_fall + t_rise);

    const Stimulus base_stim = static_stimulus(gc, PgMode::Active, path.base_bits);
    const DcSolution active_dc = dc_operating_point(gc.circuit, cfg, &base_stim);

    std::string error;
    for (int attempt = 0; attempt < 6; ++attempt, window *= 4.0) {
        if (window > gc.opts.max_window_s)
            throw NoCrossingError("delay window estimate exceeds the configured limit");
        SimConfig tcfg = cfg;
        tcfg.t_end = window;
        tcfg.dt = window / gc.opts.transient_steps;

        Stimulus stim = static_stimulus(gc, PgMode::Active, path.base_bits);
        int toggle_idx = -1;
        for (size_t i = 0; i < gc.netlist.inputs.size(); ++i)
            if (gc.netlist.inputs[i] == path.toggle_input) toggle_idx = static_cast<int>(i);
        const bool was_high = toggle_idx >= 0 && path.base_bits[toggle_idx];
        const double t_edge = std::max(4.0 * tcfg.dt, 0.02 * window);
        stim.set_step(path.toggle_input, was_high ? gc.opts.v_module : 0.0,
                      was_high ? 0.0 : gc.opts.v_module, t_edge, tcfg.dt);

        bool have_base = false;
        double base_out = 0.0;
        bool crossed = false;
        int settle = 0;
        const auto stop = [&](double, const std::vector<double>& pv) {
            if (!have_base) {
                base_out = pv[1];
                have_base = true;
                return false;
            }
            if (!crossed) {
                crossed = (base_out < v_ref && pv[1] >= v_ref) ||
                          (base_out > v_ref && pv[1] <= v_ref);
            } else if (++settle >= 10) {
                return true;
            }
            return false;
        };

        const std::vector<std::string> probes = {path.toggle_input, path.observed_output, kVgnr};
        TransientResult res;
        try {
            res = transient(gc.circuit, stim, tcfg, probes, stop, &active_dc);
            ActiveMetrics m;
            m.delay_s = measure_delay(res.probes, path.toggle_input, path.observed_output, v_ref);
            double p = 0.0;
            for (double i : res.supply_current_a) p += gc.opts.v_module * i;
            m.active_power_w = p / static_cast<double>(res.supply_current_a.size());
            m.pdp_j = m.active_power_w * m.delay_s;
            m.vgnr_active_v = res.probes[2].volts.front();
            m.probes = std::move(res.probes);
            return m;
        } catch (const NoCrossingError& e) {
            error = e.what();
        }
    }
    throw NoCrossingError(error.empty() ? "output never crossed the delay reference" : error);
}

std::vector<SweepRow> sweep_device_param(SweepParam param, const std::vector<double>& values,
                                         const PgOptions& opts, const SimConfig& cfg) {
    const Netlist module = make_inverter_chain();
    const ExpandOptions ex{opts.nmos, opts.pmos, opts.c_load_f};
    const Circuit expanded = expand_to_transistors(module, ex);

    std::vector<SweepRow> rows(values.size());
    for (size_t vi = 0; vi < values.size(); ++vi) {
        SweepRow& row = rows[vi];
        row.value = values[vi];
        try {
            PgOptions o = opts;
            switch (param) {
                case SweepParam::DimerLines: o.gnr.n_dimer = static_cast<int>(values[vi]); break;
                case SweepParam::RibbonCount: o.gnr.n_rib = static_cast<int>(values[vi]); break;
                case SweepParam::Spacing: o.gnr.w_sp_nm = values[vi]; break;
            }
            o.gnr.validate();

            // footer carries the swept geometry directly (not the ratio rule)
            GatedCircuit gc;
            gc.circuit = expanded;
            gc.structure = PgStructure::make(PgKind::GmcpgSs);
            gc.opts = o;
            gc.netlist = module;
            gc.circuit.add(Capacitor{kVgnr, kGnd,
                                     o.c_vgnr_per_nmos_f * module_nmos_count(expanded),
                                     "vgnr_parasitic"});
            GnrFet fet = GnrFet::make(o.gnr, o.subband_count, o.n0, o.beta_cds, o.temperature_k);
            gc.circuit.add(VoltageSource{"SLEEPN", 0.0, "SLEEPN"});
            gc.circuit.add(GnrFetDevice{kVgnr, "SLEEPN", kGnd, kGnd, fet,
                                        DeviceRole::PowerSwitch, "gnrps"});
            gc.control_nodes = {"SLEEPN"};
            gc.footer_ribbons = o.gnr.n_rib;
            gc.footer_width_nm = gnr_gate_width_nm(o.gnr);

            const std::vector<int> zeros(module.inputs.size(), 0);
            row.leakage_w = measure_leakage(gc, PgMode::Sleep, zeros, cfg);

            try {
                const auto path = find_sensitizable_transition(module, o.seed);
                row.delay_s = measure_active_metrics(gc, *path, cfg).delay_s;
            } catch (const std::exception& e) {
                row.note = e.what();
            }
        } catch (const std::exception& e) {
            row.note = e.what();
        }
    }
    return rows;
}

namespace {

MetricsReport run_cell(const BenchmarkCase& bench, PgKind kind, const PgOptions& opts,
                       const SimConfig& cfg, PgMode rest_mode) {
    MetricsReport rep;
    rep.benchmark = bench.name;
    rep.structure = pg_kind_name(kind);
    rep.fingerprint = opts.fingerprint(cfg);
    try {
        const ExpandOptions ex{opts.nmos, opts.pmos, opts.c_load_f};
        const Circuit expanded = expand_to_transistors(bench.netlist, ex);
        const GatedCircuit gc =
            attach_footer(expanded, bench.netlist, PgStructure::make(kind), opts);

        const PgMode rest = kind == PgKind::NoGating ? PgMode::Active : rest_mode;
        const LeakageReport leak = measure_leakage_set(gc, rest, cfg);
        rep.leakage_w = leak.mean_w;
        rep.vgnr_sleep_v = leak.vgnr_v;

        rep.wakeup_s = kind == PgKind::NoGating ? 0.0 : measure_wakeup(gc, rest, cfg);

        const auto path = find_sensitizable_transition(bench.netlist, opts.seed);
        if (!path) throw NoCrossingError("no sensitizable transition found");
        const ActiveMetrics am = measure_active_metrics(gc, *path, cfg);
        rep.delay_s = am.delay_s;
        rep.active_power_w = am.active_power_w;
        rep.pdp_j = am.pdp_j;
    } catch (const std::exception& e) {
        rep.error = e.what();
    }
    return rep;
}

}  // namespace

std::vector<MetricsReport> compare_structures(const std::vector<BenchmarkCase>& benchmarks,
                                              const std::vector<PgKind>& structures,
                                              const PgOptions& opts, const SimConfig& cfg,
                                              PgMode rest_mode) {
    struct Cell {
        const BenchmarkCase* bench;
        PgKind kind;
    };
    std::vector<Cell> cells;
    for (const auto& b : benchmarks)
        for (PgKind k : structures) cells.push_back(Cell{&b, k});

    std::vector<MetricsReport> out(cells.size());
    std::atomic<size_t> next{0};
    const unsigned workers =
        std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                                        static_cast<unsigned>(cells.size())));
    auto work = [&] {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= cells.size()) return;
            out[i] = run_cell(*cells[i].bench, cells[i].kind, opts, cfg, rest_mode);
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    return out;
}

Netlist make_inverter_chain(int chains, int stages) {
    Netlist nl;
    nl.name = "invchain" + std::to_string(chains) + "x" + std::to_string(stages);
    for (int c = 0; c < chains; ++c) {
        const std::string in = "in" + std::to_string(c);
        nl.inputs.push_back(in);
        std::string prev = in;
        for (int s = 0; s < stages; ++s) {
            const std::string out = s + 1 == stages
                                        ? "out" + std::to_string(c)
                                        : "n" + std::to_string(c) + "_" + std::to_string(s);
            nl.gates.push_back(Gate{out, GateKind::Not, {prev}});
            prev = out;
        }
        nl.outputs.push_back(prev);
    }
    return nl;
}

}  // namespace gnrpg
