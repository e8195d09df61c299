// Acceptance suite: runs every release criterion at its stated tolerance and
// prints one pass/fail line per criterion. Exit status is the failure count.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gnrpg/config.hpp"
#include "gnrpg/reports.hpp"

using namespace gnrpg;

namespace {

struct Criterion {
    int id;
    std::string name;
    double budget_s;
    std::function<bool(std::string&)> run;
};

// ---------------------------------------------------------------- helpers

double now_s() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

bool oracle_eval(const Netlist& nl, const std::string& sig,
                 const std::map<std::string, bool>& in, std::map<std::string, bool>& memo) {
    if (in.count(sig)) return in.at(sig);
    auto it = memo.find(sig);
    if (it != memo.end()) return it->second;
    const Gate& g = nl.gates[nl.driver_index(sig)];
    std::vector<bool> f;
    for (const auto& fi : g.fanins) f.push_back(oracle_eval(nl, fi, in, memo));
    bool v = false;
    switch (g.kind) {
        case GateKind::And: { v = true; for (bool b : f) v = v && b; break; }
        case GateKind::Nand: { v = true; for (bool b : f) v = v && b; v = !v; break; }
        case GateKind::Or: { for (bool b : f) v = v || b; break; }
        case GateKind::Nor: { for (bool b : f) v = v || b; v = !v; break; }
        case GateKind::Not: v = !f[0]; break;
        case GateKind::Buff: v = f[0]; break;
        case GateKind::Xor: { for (bool b : f) v = v != b; break; }
        case GateKind::Xnor: { for (bool b : f) v = v != b; v = !v; break; }
    }
    memo[sig] = v;
    return v;
}

double oracle_channel_residual(const GnrGeometry& g, const GnrCapSet& c,
                               const SubbandSpectrum& sp, const BiasPoint& b, double psi,
                               double n0) {
    const double kt = phys::thermal_voltage(300.0);
    double occ = 0.0;
    for (double e : sp.energies_ev) {
        occ += std::log1p(std::exp((psi - b.v_s - e) / kt));
        occ += std::log1p(std::exp((psi - b.v_d - e) / kt));
        occ -= 2.0 * std::log1p(std::exp(-e / kt));
    }
    const double q_ch = phys::q * n0 * g.n_rib * occ;
    const double q_cap = c.c_g_ch * (b.v_g - psi) + c.c_sub_ch * (b.v_sub - psi) +
                         c.c_ch_d * (b.v_d - psi) + c.c_ch_s * (b.v_s - psi);
    return q_cap - q_ch;
}

double oracle_kcl_residual(const Circuit& c, const DcSolution& sol, double gmin) {
    std::map<std::string, double> sum;
    for (const auto& n : sol.nodes) sum[n] = gmin * sol.voltage(n);
    auto add = [&](const std::string& n, double i) {
        if (n != c.ground_ref) sum[n] += i;
    };
    for (const auto& d : c.devices) {
        if (const auto* m = std::get_if<Mosfet>(&d)) {
            MosParams p = m->params;
            p.width_nm *= m->width_mult;
            const double i = mos_ids(p, BiasPoint{sol.voltage(m->gate), sol.voltage(m->drain),
                                                  sol.voltage(m->source), sol.voltage(m->bulk)});
            add(m->drain, i);
            add(m->source, -i);
        } else if (const auto* g = std::get_if<GnrFetDevice>(&d)) {
            const double i = g->fet.ids(BiasPoint{sol.voltage(g->gate), sol.voltage(g->drain),
                                                  sol.voltage(g->source),
                                                  sol.voltage(g->substrate)});
            add(g->drain, i);
            add(g->source, -i);
        } else if (const auto* r = std::get_if<Resistor>(&d)) {
            const double i = (sol.voltage(r->node_a) - sol.voltage(r->node_b)) / r->ohms;
            add(r->node_a, i);
            add(r->node_b, -i);
        } else if (const auto* cs = std::get_if<CurrentSource>(&d)) {
            add(cs->node, -cs->amps);
        }
    }
    for (const auto& d : c.devices)
        if (const auto* v = std::get_if<VoltageSource>(&d)) sum.erase(v->node);
    double worst = 0.0;
    for (const auto& [n, i] : sum) worst = std::max(worst, std::abs(i));
    return worst;
}

Circuit ungated(const Netlist& nl, const PgOptions& opts) {
    Circuit c = expand_to_transistors(nl, ExpandOptions{opts.nmos, opts.pmos, opts.c_load_f});
    c.add(VoltageSource{kVgnr, 0.0, "vgnr_tie"});
    return c;
}

const MetricsReport* cell(const std::vector<MetricsReport>& reports, const std::string& bench,
                          PgKind kind) {
    for (const auto& r : reports)
        if (r.benchmark == bench && r.structure == pg_kind_name(kind)) return &r;
    return nullptr;
}

// ---------------------------------------------------------------- criteria

bool c1_geometry(std::string& note) {
    const double w_g = gnr_gate_width_nm(GnrGeometry{});
    note = "W_G = " + fmt_short(w_g) + " nm";
    return std::abs(w_g - 33.6) <= 0.05;
}

bool c2_chirality(std::string& note) {
    const std::set<int> paper_semi = {6, 9, 12, 15, 18, 10, 13, 16, 19};
    const std::set<int> paper_metal = {8, 11, 14, 17};
    for (int n = 3; n <= 60; ++n) {
        GnrGeometry g;
        g.n_dimer = n;
        const bool metallic = classify_chirality(n) == Chirality::Metallic;
        const bool gap_zero = subband_energies(g, 4).energies_ev.front() == 0.0;
        if (metallic != gap_zero) {
            note = "tight-binding disagreement at N = " + std::to_string(n);
            return false;
        }
        if (paper_semi.count(n) && metallic) {
            note = "published semiconducting N = " + std::to_string(n) + " classified metallic";
            return false;
        }
        if (paper_metal.count(n) && !metallic) {
            note = "published metallic N = " + std::to_string(n) + " classified semiconducting";
            return false;
        }
    }
    note = "N in [3, 60] consistent with the gap zeros and the published lists";
    return true;
}

bool c3_current_algebra(std::string& note) {
    const auto sp = subband_energies(GnrGeometry{}, 4);
    std::mt19937 rng(101);
    std::uniform_real_distribution<double> u(-0.35, 0.35);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double psi = u(rng), vd = u(rng), vs = u(rng), v = u(rng);
        if (gnr_ids(sp, psi, BiasPoint{0.2, v, v, 0.0}, 6) != 0.0) {
            note = "nonzero current at V_D == V_S";
            return false;
        }
        const double fwd = gnr_ids(sp, psi, BiasPoint{0.2, vd, vs, 0.0}, 6);
        const double rev = gnr_ids(sp, psi, BiasPoint{0.2, vs, vd, 0.0}, 6);
        const double rel =
            std::abs(fwd + rev) / std::max({std::abs(fwd), std::abs(rev), 1e-300});
        worst = std::max(worst, rel);
    }
    note = "worst antisymmetry error " + fmt_short(worst) + " over 1000 biases";
    return worst <= 1e-15;
}

bool c4_channel_potential(std::string& note) {
    const GnrGeometry g;
    const auto sp = subband_energies(g, 4);
    const auto caps = gnr_capacitances(g);
    std::mt19937 rng(202);
    std::uniform_real_distribution<double> u(-0.35, 0.35);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const BiasPoint b{u(rng), u(rng), u(rng), u(rng)};
        const double psi = solve_channel_potential(g, caps, sp, b);
        worst = std::max(worst, std::abs(oracle_channel_residual(g, caps, sp, b, psi, 2.0)));
    }
    if (worst >= 1e-21) {
        note = "worst charge residual " + fmt_short(worst) + " C";
        return false;
    }
    // monotonicity: sign changes of F sampled over a wide potential range
    const BiasPoint b{0.3, 0.25, 0.0, 0.0};
    int sign_changes = 0;
    double prev = oracle_channel_residual(g, caps, sp, b, -2.0, 2.0);
    for (int i = 1; i < 1000; ++i) {
        const double psi = -2.0 + 4.0 * i / 999.0;
        const double f = oracle_channel_residual(g, caps, sp, b, psi, 2.0);
        if ((prev > 0) != (f > 0)) ++sign_changes;
        prev = f;
    }
    note = "worst residual " + fmt_short(worst) + " C, " + std::to_string(sign_changes) +
           " sign change(s)";
    return sign_changes <= 1;
}

bool c5_solver_soundness(std::string& note) {
    const PgOptions opts;
    SimConfig cfg;

    // KCL at converged DC points, re-evaluated independently
    double worst_kcl = 0.0;
    for (const char* path : {"benches/c17.bench", "benches/sel2.bench", "benches/add4.bench"}) {
        const Circuit c = ungated(load_bench_file(path), opts);
        Stimulus stim;
        stim.set_constant(kVdd, 0.7);
        const DcSolution sol = dc_operating_point(c, cfg, &stim);
        worst_kcl = std::max(worst_kcl, oracle_kcl_residual(c, sol, cfg.gmin));
    }
    if (worst_kcl >= 1e-12) {
        note = "worst KCL residual " + fmt_short(worst_kcl) + " A";
        return false;
    }

    // transient vs the analytic RC discharge at one time constant
    Circuit rc;
    rc.add(VoltageSource{"s", 0.35, "src"});
    rc.add(Resistor{"s", "a", 1e6, "r"});
    rc.add(Capacitor{"a", kGnd, 1e-15, "c"});
    SimConfig tcfg = cfg;
    tcfg.dt = 1e-12;
    tcfg.t_end = 2e-9;
    Stimulus stim;
    stim.schedules["s"] = {{0.0, 0.35}, {0.0, 0.35}, {tcfg.dt, 0.0}};
    const TransientResult res = transient(rc, stim, tcfg, {"a"});
    const size_t idx = static_cast<size_t>(std::llround(1e-9 / tcfg.dt));
    const double expect = 0.35 / std::exp(1.0);
    const double rc_err = std::abs(res.probes[0].volts[idx] - expect) / expect;
    if (rc_err >= 0.005) {
        note = "RC error at tau " + fmt_short(100 * rc_err) + "%";
        return false;
    }

    // dt-halving on a 20-inverter chain delay
    const Netlist chain = make_inverter_chain(1, 20);
    const Circuit cc = ungated(chain, opts);
    auto delay_at = [&](double dt) {
        SimConfig c2 = cfg;
        c2.dt = dt;
        c2.t_end = 500e-12;
        Stimulus s2;
        s2.set_constant(kVdd, 0.7);
        s2.set_step("in0", 0.0, 0.7, 10e-12, 1e-12);
        const TransientResult r = transient(cc, s2, c2, {"in0", "out0"});
        return measure_delay(r.probes, "in0", "out0", 0.35);
    };
    const double d1 = delay_at(1e-12);
    const double d2 = delay_at(0.5e-12);
    const double dt_err = std::abs(d1 - d2) / d2;
    note = "KCL " + fmt_short(worst_kcl) + " A, RC " + fmt_short(100 * rc_err) +
           "%, dt-halving " + fmt_short(100 * dt_err) + "%";
    return dt_err < 0.01;
}

bool c6_parser(std::string& note) {
    const Netlist c17 = load_bench_file("benches/c17.bench");
    if (c17.inputs.size() != 5 || c17.outputs.size() != 2 || c17.gates.size() != 6) {
        note = "c17 shape mismatch";
        return false;
    }
    int tables = 0;
    for (const char* path : {"benches/c17.bench", "benches/add4.bench", "benches/sel2.bench",
                             "benches/c432.bench"}) {
        const Netlist nl = load_bench_file(path);
        const Netlist again = parse_bench(serialize_bench(nl), nl.name);
        if (serialize_bench(again) != serialize_bench(nl) || again.inputs != nl.inputs ||
            again.outputs != nl.outputs || again.gates.size() != nl.gates.size()) {
            note = std::string("round trip not identity for ") + path;
            return false;
        }
        if (nl.inputs.size() > 10) continue;
        ++tables;
        const int n = static_cast<int>(nl.inputs.size());
        for (int mask = 0; mask < (1 << n); ++mask) {
            std::map<std::string, bool> in;
            for (int i = 0; i < n; ++i) in[nl.inputs[i]] = (mask >> i) & 1;
            const auto got = nl.evaluate(in);
            std::map<std::string, bool> memo;
            for (const auto& po : nl.outputs) {
                if (got.at(po) != oracle_eval(nl, po, in, memo)) {
                    note = std::string("truth table mismatch in ") + path;
                    return false;
                }
            }
        }
    }
    note = "c17 5/2/6, round trips exact, " + std::to_string(tables) +
           " netlists match their truth tables";
    return true;
}

bool c7_switch_efficiency(std::string& note) {
    const PgOptions opts;
    const GnrFet fet = GnrFet::make(opts.gnr, opts.subband_count, opts.n0, opts.beta_cds);
    MosParams mos = opts.nmos;
    mos.width_nm = gnr_gate_width_nm(opts.gnr);  // matched width
    const double g_on = fet.ids(BiasPoint{0.35, 0.35, 0, 0});
    const double g_off = fet.ids(BiasPoint{0.0, 0.35, 0, 0});
    const double m_on = mos_ids(mos, BiasPoint{0.35, 0.35, 0, 0});
    const double m_off = mos_ids(mos, BiasPoint{0.0, 0.35, 0, 0});
    const double ror = (g_on / g_off) / (m_on / m_off);
    note = "gnr on/off " + fmt_short(g_on / g_off) + ", mos " + fmt_short(m_on / m_off) +
           ", ratio of ratios " + fmt_short(ror);
    return g_on / g_off >= 1e3 && ror >= 10.0;
}

bool c8_fig9_trends(std::string& note) {
    PgOptions opts;
    opts.v_module = opts.v_switch;  // whole gated stack at 0.35 V
    opts.gnr.n_dimer = 15;
    opts.gnr.n_rib = 12;
    opts.gnr.w_sp_nm = 4.0;
    SimConfig cfg;

    const auto dimer = sweep_device_param(SweepParam::DimerLines, {6, 9, 12}, opts, cfg);
    for (size_t i = 0; i + 1 < dimer.size(); ++i) {
        if (!dimer[i].leakage_w || !dimer[i + 1].leakage_w ||
            *dimer[i].leakage_w > *dimer[i + 1].leakage_w) {
            note = "dimer-line leakage not non-decreasing";
            return false;
        }
    }

    const auto spacing = sweep_device_param(SweepParam::Spacing, {4, 6, 8, 10}, opts, cfg);
    double s_min = 1e30, s_max = 0.0;
    for (const auto& r : spacing) {
        if (!r.delay_s) {
            note = "spacing sweep lost a delay cell: " + r.note;
            return false;
        }
        s_min = std::min(s_min, *r.delay_s);
        s_max = std::max(s_max, *r.delay_s);
    }
    if (s_max / s_min >= 1.1) {
        note = "spacing delay variation " + fmt_short(100 * (s_max / s_min - 1)) + "%";
        return false;
    }

    const auto ribbons =
        sweep_device_param(SweepParam::RibbonCount, {6, 20, 60, 100, 140}, opts, cfg);
    double r_min = 1e30, r_max = 0.0, leak_prev = -1.0;
    for (const auto& r : ribbons) {
        if (!r.delay_s || !r.leakage_w) {
            note = "ribbon sweep lost a cell: " + r.note;
            return false;
        }
        r_min = std::min(r_min, *r.delay_s);
        r_max = std::max(r_max, *r.delay_s);
        if (*r.leakage_w <= leak_prev) {
            note = "ribbon leakage not strictly increasing";
            return false;
        }
        leak_prev = *r.leakage_w;
    }
    note = "spacing delay var " + fmt_short(100 * (s_max / s_min - 1)) + "%, ribbon delay var " +
           fmt_short(100 * (r_max / r_min - 1)) + "%, leakage trends hold";
    return r_max / r_min < 1.1;
}

bool c9_table_direction(std::string& note) {
    const PgOptions opts;
    SimConfig cfg;
    RunConfig rc;
    const std::vector<BenchmarkCase> benches = {
        load_benchmark("invchain", rc), load_benchmark("c17", rc), load_benchmark("c432", rc)};
    const std::vector<PgKind> kinds = {PgKind::MosPg, PgKind::GmcpgSs, PgKind::GmcpgNs};
    const std::vector<MetricsReport> g_compare_reports =
        compare_structures(benches, kinds, opts, cfg);

    for (const auto& b : benches) {
        const auto* mos = cell(g_compare_reports, b.name, PgKind::MosPg);
        const auto* ss = cell(g_compare_reports, b.name, PgKind::GmcpgSs);
        const auto* ns = cell(g_compare_reports, b.name, PgKind::GmcpgNs);
        if (!mos || !ss || !ns || !mos->error.empty() || !ss->error.empty() ||
            !ns->error.empty()) {
            note = b.name + " cell failed: " +
                   (mos && !mos->error.empty() ? mos->error
                    : ss && !ss->error.empty() ? ss->error
                    : ns                       ? ns->error
                                               : "missing");
            return false;
        }
        if (!(ss->leakage_w < mos->leakage_w)) {
            note = b.name + ": sleep leakage ordering failed";
            return false;
        }
        if (!(ss->wakeup_s < mos->wakeup_s)) {
            note = b.name + ": wake-up ordering failed";
            return false;
        }
        if (!(ss->delay_s <= mos->delay_s)) {
            note = b.name + ": delay ordering failed";
            return false;
        }
        if (!(ns->leakage_w <= ss->leakage_w)) {
            note = b.name + ": network-switch leakage ordering failed";
            return false;
        }
    }
    const auto* m = cell(g_compare_reports, "invchain", PgKind::MosPg);
    const auto* s = cell(g_compare_reports, "invchain", PgKind::GmcpgSs);
    note = "orderings hold on all three benchmarks (invchain leakage cut " +
           fmt_short(100 * (m->leakage_w - s->leakage_w) / m->leakage_w) + "%)";
    return true;
}

bool c10_mode_machine(std::string& note) {
    if (!(qm_mode_controls(PgMode::Active) == QmControls{0, 0, 1}) ||
        !(qm_mode_controls(PgMode::Nap) == QmControls{1, 0, 0}) ||
        !(qm_mode_controls(PgMode::Slumber) == QmControls{0, 1, 0}) ||
        !(qm_mode_controls(PgMode::Sleep) == QmControls{0, 0, 0})) {
        note = "control table mismatch";
        return false;
    }

    PgOptions opts;
    SimConfig cfg;
    cfg.reltol = 1e-8;  // resolve the slumber/sleep separation
    const Netlist chain = make_inverter_chain(20, 20);
    const Circuit ex =
        expand_to_transistors(chain, ExpandOptions{opts.nmos, opts.pmos, opts.c_load_f});
    const GatedCircuit qm = attach_footer(ex, chain, PgStructure::make(PgKind::QmGmcpg), opts);
    const std::vector<int> zeros(chain.inputs.size(), 0);

    std::map<PgMode, double> vgnr, leak;
    DcSolution warm;
    bool have_warm = false;
    for (PgMode m : {PgMode::Active, PgMode::Nap, PgMode::Slumber, PgMode::Sleep}) {
        Stimulus s;
        for (const auto& in : chain.inputs) s.set_constant(in, 0.0);
        s.set_constant(kVdd, opts.v_module);
        for (const auto& [n, v] : mode_control_levels(qm, m)) s.set_constant(n, v);
        const DcSolution sol =
            dc_operating_point(qm.circuit, cfg, &s, have_warm ? &warm : nullptr);
        vgnr[m] = sol.voltage(kVgnr);
        leak[m] = opts.v_module * std::abs(supply_current(qm.circuit, sol, kVdd));
        warm = sol;
        have_warm = true;
    }

    if (!(vgnr[PgMode::Sleep] > vgnr[PgMode::Slumber] &&
          vgnr[PgMode::Slumber] > vgnr[PgMode::Nap] && vgnr[PgMode::Nap] > vgnr[PgMode::Active] &&
          vgnr[PgMode::Active] < 0.05 * opts.v_module)) {
        note = "VGNR ordering failed: " + fmt_short(vgnr[PgMode::Sleep]) + " / " +
               fmt_short(vgnr[PgMode::Slumber]) + " / " + fmt_short(vgnr[PgMode::Nap]) + " / " +
               fmt_short(vgnr[PgMode::Active]);
        return false;
    }
    if (!(leak[PgMode::Active] > leak[PgMode::Nap] && leak[PgMode::Nap] > leak[PgMode::Slumber] &&
          leak[PgMode::Slumber] > leak[PgMode::Sleep])) {
        note = "leakage ordering failed: " + fmt_sci(leak[PgMode::Active]) + " / " +
               fmt_sci(leak[PgMode::Nap]) + " / " + fmt_sci(leak[PgMode::Slumber]) + " / " +
               fmt_sci(leak[PgMode::Sleep]);
        return false;
    }

    const double wake_nap = measure_wakeup(qm, PgMode::Nap, cfg);
    const double wake_sleep = measure_wakeup(qm, PgMode::Sleep, cfg);
    if (!(wake_nap < wake_sleep)) {
        note = "wake from nap (" + fmt_short(wake_nap) + " s) not below sleep (" +
               fmt_short(wake_sleep) + " s)";
        return false;
    }

    // multi-mode wake-up beats the mos power switch by a wide margin
    const GatedCircuit mos = attach_footer(ex, chain, PgStructure::make(PgKind::MosPg), opts);
    const double wake_mos = measure_wakeup(mos, PgMode::Sleep, cfg);
    note = "table exact; orderings hold; qm sleep wake " + fmt_short(wake_sleep) +
           " s vs mospg " + fmt_short(wake_mos) + " s";
    return wake_sleep <= 0.5 * wake_mos;
}

bool c11_determinism(std::string& note) {
    PgOptions opts;
    SimConfig cfg;
    RunConfig rc;
    const std::vector<BenchmarkCase> benches = {load_benchmark("c17", rc)};
    const std::vector<PgKind> kinds = {PgKind::MosPg, PgKind::GmcpgSs};

    auto render = [&] {
        const auto reports = compare_structures(benches, kinds, opts, cfg);
        std::ostringstream metrics, norm;
        write_metrics_csv(metrics, reports, opts.seed);
        write_normalized_csv(norm, reports, pg_kind_name(PgKind::MosPg), opts.seed);
        return metrics.str() + "\x1e" + norm.str();
    };
    const std::string a = render();
    const std::string b = render();
    note = a == b ? "repeat compare runs are byte-identical (" +
                        std::to_string(a.size()) + " bytes)"
                  : "outputs differ between runs";
    return a == b;
}

}  // namespace

int main() {
    std::vector<Criterion> criteria = {
        {1, "geometry oracle: reference device gate width", 1e-3, c1_geometry},
        {2, "chirality rule vs tight-binding gap zeros", 1.0, c2_chirality},
        {3, "ballistic current algebra (zero bias, antisymmetry)", 1.0, c3_current_algebra},
        {4, "channel-potential residual and monotonicity", 5.0, c4_channel_potential},
        {5, "solver soundness (KCL, RC oracle, dt halving)", 30.0, c5_solver_soundness},
        {6, "bench parser: shape, round trip, truth tables", 10.0, c6_parser},
        {7, "switch efficiency trend at matched width", 5.0, c7_switch_efficiency},
        {8, "device parameter sweep trends", 300.0, c8_fig9_trends},
        {9, "structure comparison direction", 900.0, c9_table_direction},
        {10, "multi-mode machine and orderings", 300.0, c10_mode_machine},
        {11, "deterministic reports", 120.0, c11_determinism},
    };

    int failures = 0;
    for (auto& c : criteria) {
        const double t0 = now_s();
        bool ok = false;
        std::string note;
        try {
            ok = c.run(note);
        } catch (const std::exception& e) {
            note = std::string("exception: ") + e.what();
        }
        const double elapsed = now_s() - t0;
        const bool in_budget = elapsed < c.budget_s;
        const bool pass = ok && in_budget;
        if (!pass) ++failures;
        std::printf("[%s] %2d. %s - %s (%.3f s%s)\n", pass ? "PASS" : "FAIL", c.id,
                    c.name.c_str(), note.c_str(), elapsed,
                    in_budget ? "" : ", OVER BUDGET");
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
                criteria.size());
    return failures;
}
