#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <set>

#include "gnrpg/config.hpp"
#include "gnrpg/reports.hpp"

using namespace gnrpg;

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir = "out";
    unsigned seed = 0;
    bool seed_set = false;
};

RunConfig load_config(const CommonArgs& args) {
    RunConfig rc = args.config_path.empty() ? RunConfig{} : load_run_config(args.config_path);
    if (args.seed_set) rc.pg.seed = args.seed;
    return rc;
}

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "run configuration file (key = value)");
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_option("--seed", args.seed, "seed recorded in every artifact")
        ->each([&args](const std::string&) { args.seed_set = true; });
}

std::ofstream open_out(const std::string& dir, const std::string& name) {
    std::filesystem::create_directories(dir);
    std::ofstream os(dir + "/" + name, std::ios::binary);
    if (!os) throw ConfigError(dir + "/" + name, 0, "cannot open output file");
    return os;
}

// ---------------------------------------------------------------- iv-sweep

int cmd_iv_sweep(const CommonArgs& args) {
    const RunConfig rc = load_config(args);
    const GnrFet gnr = GnrFet::make(rc.pg.gnr, rc.pg.subband_count, rc.pg.n0, rc.pg.beta_cds,
                                    rc.pg.temperature_k);
    MosParams mos = rc.pg.nmos;
    mos.width_nm = gnr_gate_width_nm(rc.pg.gnr);  // matched widths

    const double v_max = rc.pg.v_switch;
    std::vector<double> vgs, vds;
    for (int i = 0; i <= 7; ++i) vgs.push_back(v_max * i / 7.0);
    for (int i = 0; i <= 14; ++i) vds.push_back(v_max * i / 14.0);

    std::vector<IvPoint> grid;
    for (double g : vgs)
        for (double d : vds) {
            grid.push_back({"gnr", g, d, gnr.ids(BiasPoint{g, d, 0.0, 0.0})});
            grid.push_back({"mos", g, d, mos_ids(mos, BiasPoint{g, d, 0.0, 0.0})});
        }

    SimConfig sim = rc.sim;
    auto csv = open_out(args.out_dir, "iv.csv");
    write_iv_csv(csv, grid, rc.pg.fingerprint(sim), rc.pg.seed);
    const std::string meta =
        "seed: " + std::to_string(rc.pg.seed) + "; config: " + rc.pg.fingerprint(sim);

    for (const char* family : {"gnr", "mos"}) {
        std::vector<Series> series;
        for (double g : vgs) {
            Series s;
            s.name = "Vgs=" + fmt_short(g);
            for (const auto& p : grid)
                if (p.family == family && p.v_gs == g) s.points.push_back({p.v_ds, p.i_ds});
            series.push_back(std::move(s));
        }
        auto svg = open_out(args.out_dir, std::string(family) + "_iv.svg");
        svg << svg_line_chart(series, std::string(family) + " drain current", "V_DS (V)",
                              "I_DS (A)", false, meta);
    }
    std::cout << "wrote " << args.out_dir << "/iv.csv and per-family SVG plots ("
              << grid.size() << " grid points)\n";
    return 0;
}

// -------------------------------------------------------------- param-sweep

int cmd_param_sweep(const CommonArgs& args, const std::string& param_name) {
    RunConfig rc = load_config(args);
    // sweep profile: whole gated stack at the switch rail, mid-gap baseline
    // ribbon (N=15) at 4 nm spacing
    rc.pg.v_module = rc.pg.v_switch;
    rc.pg.gnr.n_dimer = 15;
    rc.pg.gnr.n_rib = 12;
    rc.pg.gnr.w_sp_nm = 4.0;

    SweepParam param;
    std::vector<double> values;
    if (param_name == "dimer") {
        param = SweepParam::DimerLines;
        values = {6, 9, 12, 15, 18};
    } else if (param_name == "ribbons") {
        param = SweepParam::RibbonCount;
        values = {6, 20, 60, 100, 140};
    } else if (param_name == "spacing") {
        param = SweepParam::Spacing;
        values = {4, 6, 8, 10};
    } else {
        throw ConfigError("--param", 0, "expected dimer, ribbons or spacing");
    }

    const auto rows = sweep_device_param(param, values, rc.pg, rc.sim);
    auto csv = open_out(args.out_dir, "sweep_" + param_name + ".csv");
    write_sweep_csv(csv, param_name, rows, rc.pg.fingerprint(rc.sim), rc.pg.seed);

    Series delay{"delay_s", {}}, leak{"leakage_w", {}};
    for (const auto& r : rows) {
        if (r.delay_s) delay.points.push_back({r.value, *r.delay_s});
        if (r.leakage_w) leak.points.push_back({r.value, *r.leakage_w});
    }
    const std::string meta =
        "seed: " + std::to_string(rc.pg.seed) + "; config: " + rc.pg.fingerprint(rc.sim);
    auto svg_d = open_out(args.out_dir, "sweep_" + param_name + "_delay.svg");
    svg_d << svg_line_chart({delay}, "delay vs " + param_name, param_name, "delay (s)", false,
                            meta);
    auto svg_l = open_out(args.out_dir, "sweep_" + param_name + "_leakage.svg");
    svg_l << svg_line_chart({leak}, "leakage vs " + param_name, param_name, "leakage (W)", true,
                            meta);

    int absent = 0;
    for (const auto& r : rows)
        if (!r.delay_s || !r.leakage_w) ++absent;
    std::cout << "wrote sweep_" << param_name << ".csv (" << rows.size() << " rows, " << absent
              << " absent cells)\n";
    return 0;
}

// ------------------------------------------------------------- run/compare

std::vector<BenchmarkCase> resolve_benchmarks(const RunConfig& rc, const std::string& which) {
    std::vector<BenchmarkCase> out;
    if (which == "all" || which.empty()) {
        for (const auto& name : rc.benchmarks) out.push_back(load_benchmark(name, rc));
    } else {
        out.push_back(load_benchmark(which, rc));
    }
    return out;
}

std::vector<PgKind> resolve_structures(const RunConfig& rc, const std::string& which) {
    if (which == "all" || which.empty()) return rc.structures;
    const auto k = pg_kind_from_name(which);
    if (!k) throw ConfigError("--structure", 0, "unknown structure `" + which + "`");
    return {*k};
}

int emit_compare(const CommonArgs& args, const RunConfig& rc,
                 const std::vector<BenchmarkCase>& benches, const std::vector<PgKind>& kinds,
                 bool fail_on_cell_error, PgMode rest_mode = PgMode::Sleep) {
    const auto reports = compare_structures(benches, kinds, rc.pg, rc.sim, rest_mode);

    auto csv = open_out(args.out_dir, "metrics.csv");
    write_metrics_csv(csv, reports, rc.pg.seed);
    auto norm = open_out(args.out_dir, "normalized.csv");
    write_normalized_csv(norm, reports, pg_kind_name(PgKind::MosPg), rc.pg.seed);

    // one grouped bar chart per metric
    std::vector<std::string> labels;
    for (const auto& b : benches) labels.push_back(b.name);
    struct M {
        const char* name;
        double MetricsReport::*field;
    };
    for (const M m : {M{"leakage_w", &MetricsReport::leakage_w},
                      M{"delay_s", &MetricsReport::delay_s},
                      M{"wakeup_s", &MetricsReport::wakeup_s},
                      M{"pdp_j", &MetricsReport::pdp_j}}) {
        std::vector<Series> series;
        for (PgKind k : kinds) {
            Series s{pg_kind_name(k), {}};
            for (size_t bi = 0; bi < benches.size(); ++bi) {
                for (const auto& r : reports)
                    if (r.benchmark == benches[bi].name && r.structure == pg_kind_name(k))
                        s.points.push_back({static_cast<double>(bi), r.*(m.field)});
            }
            series.push_back(std::move(s));
        }
        auto svg = open_out(args.out_dir, std::string(m.name) + ".svg");
        svg << svg_bar_chart(labels, series, m.name, m.name, true,
                             "seed: " + std::to_string(rc.pg.seed) +
                                 "; config: " + rc.pg.fingerprint(rc.sim));
    }

    int failures = 0;
    for (const auto& r : reports) {
        if (!r.error.empty()) {
            ++failures;
            std::cerr << r.benchmark << "/" << r.structure << ": " << r.error << "\n";
        }
    }
    std::cout << "wrote metrics.csv + normalized.csv (" << reports.size() << " cells, "
              << failures << " failed)\n";
    return fail_on_cell_error && failures > 0 ? 1 : 0;
}

// ---------------------------------------------------------------- validate

int cmd_validate(const CommonArgs& args) {
    const RunConfig rc = load_config(args);
    int failures = 0;
    auto check = [&](const std::string& name, bool ok) {
        std::cout << (ok ? "[ok]   " : "[FAIL] ") << name << "\n";
        if (!ok) ++failures;
    };
    auto guarded = [&](const std::string& name, auto&& fn) {
        bool ok = false;
        std::string note;
        try {
            ok = fn();
        } catch (const std::exception& e) {
            note = e.what();
        }
        check(note.empty() ? name : name + " (" + note + ")", ok);
    };

    guarded("geometry: reference gate width 33.6 nm", [&] {
        return std::abs(gnr_gate_width_nm(GnrGeometry{}) - 33.6) < 0.05;
    });

    guarded("chirality matches tight-binding gap zeros on N in [3,60]", [&] {
        for (int n = 3; n <= 60; ++n) {
            GnrGeometry g;
            g.n_dimer = n;
            const bool metallic = classify_chirality(n) == Chirality::Metallic;
            if ((subband_energies(g, 4).energies_ev.front() == 0.0) != metallic) return false;
        }
        return true;
    });

    guarded("ballistic current: zero at V_D=V_S, antisymmetric under swap", [&] {
        const auto sp = subband_energies(GnrGeometry{}, 4);
        std::mt19937 rng(rc.pg.seed);
        std::uniform_real_distribution<double> u(-0.35, 0.35);
        for (int i = 0; i < 200; ++i) {
            const double psi = u(rng), vd = u(rng), vs = u(rng);
            if (gnr_ids(sp, psi, BiasPoint{0.2, vd, vd, 0.0}, 6) != 0.0) return false;
            const double f = gnr_ids(sp, psi, BiasPoint{0.2, vd, vs, 0.0}, 6);
            const double r = gnr_ids(sp, psi, BiasPoint{0.2, vs, vd, 0.0}, 6);
            if (std::abs(f + r) > 1e-15 * std::max({std::abs(f), std::abs(r), 1e-300}))
                return false;
        }
        return true;
    });

    guarded("channel potential: residual < 1e-21 C, flat band at zero bias", [&] {
        const GnrGeometry g;
        const auto sp = subband_energies(g, rc.pg.subband_count);
        const auto caps = gnr_capacitances(g, rc.pg.beta_cds);
        if (std::abs(solve_channel_potential(g, caps, sp, BiasPoint{})) > 1e-9) return false;
        std::mt19937 rng(rc.pg.seed + 1);
        std::uniform_real_distribution<double> u(-0.35, 0.35);
        for (int i = 0; i < 25; ++i) {
            const BiasPoint b{u(rng), u(rng), u(rng), u(rng)};
            const double psi = solve_channel_potential(g, caps, sp, b, rc.pg.n0);
            const double kt = phys::thermal_voltage(300.0);
            double occ = 0.0;
            for (double e : sp.energies_ev)
                occ += std::log1p(std::exp((psi - b.v_s - e) / kt)) +
                       std::log1p(std::exp((psi - b.v_d - e) / kt)) -
                       2.0 * std::log1p(std::exp(-e / kt));
            const double q_ch = phys::q * rc.pg.n0 * g.n_rib * occ;
            const double q_cap = caps.c_g_ch * (b.v_g - psi) + caps.c_sub_ch * (b.v_sub - psi) +
                                 caps.c_ch_d * (b.v_d - psi) + caps.c_ch_s * (b.v_s - psi);
            if (std::abs(q_cap - q_ch) >= 1e-21) return false;
        }
        return true;
    });

    guarded("switch efficiency: gnr/mos on-off ratio-of-ratios >= 10", [&] {
        const GnrFet fet = GnrFet::make(rc.pg.gnr, rc.pg.subband_count, rc.pg.n0, rc.pg.beta_cds);
        const double g_ratio = fet.ids(BiasPoint{0.35, 0.35, 0, 0}) /
                               fet.ids(BiasPoint{0.0, 0.35, 0, 0});
        const double m_ratio = mos_ids(rc.pg.nmos, BiasPoint{0.35, 0.35, 0, 0}) /
                               mos_ids(rc.pg.nmos, BiasPoint{0.0, 0.35, 0, 0});
        return g_ratio >= 1e3 && g_ratio / m_ratio >= 10.0;
    });

    guarded("parser: c17 counts, round trip, truth tables on small benches", [&] {
        const Netlist c17 = load_bench_file(rc.bench_dir + "/c17.bench");
        if (c17.inputs.size() != 5 || c17.outputs.size() != 2 || c17.gates.size() != 6)
            return false;
        for (const auto& entry : std::filesystem::directory_iterator(rc.bench_dir)) {
            if (entry.path().extension() != ".bench") continue;
            const Netlist nl = load_bench_file(entry.path().string());
            const Netlist again = parse_bench(serialize_bench(nl), nl.name);
            if (serialize_bench(again) != serialize_bench(nl)) return false;
            if (nl.inputs.size() <= 10) {
                const int n = static_cast<int>(nl.inputs.size());
                for (int mask = 0; mask < (1 << n); ++mask) {
                    std::map<std::string, bool> in;
                    for (int i = 0; i < n; ++i) in[nl.inputs[i]] = (mask >> i) & 1;
                    nl.evaluate(in);  // throws on inconsistency
                }
            }
        }
        return true;
    });

    guarded("expansion: c17 is 24 transistors with VGNR-rooted pull-downs", [&] {
        const Netlist c17 = load_bench_file(rc.bench_dir + "/c17.bench");
        const Circuit c =
            expand_to_transistors(c17, ExpandOptions{rc.pg.nmos, rc.pg.pmos, rc.pg.c_load_f});
        if (c.transistor_count() != 24) return false;
        for (const auto& d : c.devices) {
            const auto* m = std::get_if<Mosfet>(&d);
            if (m && m->params.polarity == Polarity::N && m->gate == m->source) return false;
        }
        return true;
    });

    guarded("dc solve: KCL residual below abstol on c17", [&] {
        const Netlist c17 = load_bench_file(rc.bench_dir + "/c17.bench");
        Circuit c =
            expand_to_transistors(c17, ExpandOptions{rc.pg.nmos, rc.pg.pmos, rc.pg.c_load_f});
        c.add(VoltageSource{kVgnr, 0.0, "tie"});
        Stimulus stim;
        stim.set_constant(kVdd, rc.pg.v_module);
        const DcSolution sol = dc_operating_point(c, rc.sim, &stim);
        return sol.max_residual_a < rc.sim.abstol;
    });

    guarded("transient: rc discharge matches the analytic oracle", [&] {
        Circuit c;
        c.add(VoltageSource{"s", 0.35, "src"});
        c.add(Resistor{"s", "a", 1e6, "r"});
        c.add(Capacitor{"a", kGnd, 1e-15, "c"});
        SimConfig cfg = rc.sim;
        cfg.dt = 1e-12;
        cfg.t_end = 2e-9;
        Stimulus stim;
        stim.schedules["s"] = {{0.0, 0.35}, {0.0, 0.35}, {cfg.dt, 0.0}};
        const TransientResult res = transient(c, stim, cfg, {"a"});
        const size_t idx = static_cast<size_t>(std::llround(1e-9 / cfg.dt));
        return std::abs(res.probes[0].volts[idx] - 0.35 / std::exp(1.0)) <
               0.005 * (0.35 / std::exp(1.0));
    });

    guarded("mode machine: table rows are a bijection", [&] {
        std::set<std::string> seen;
        for (PgMode m : {PgMode::Active, PgMode::Nap, PgMode::Slumber, PgMode::Sleep}) {
            const QmControls row = qm_mode_controls(m);
            row.validate();
            seen.insert(std::to_string(row.nps) + std::to_string(row.sls) +
                        std::to_string(row.sps));
        }
        return seen.size() == 4 && qm_mode_controls(PgMode::Active) == QmControls{0, 0, 1};
    });

    guarded("determinism: repeated compare on c17 is byte-identical", [&] {
        const Netlist c17 = load_bench_file(rc.bench_dir + "/c17.bench");
        const std::vector<BenchmarkCase> benches = {{"c17", c17}};
        const std::vector<PgKind> kinds = {PgKind::GmcpgSs};
        const auto a = compare_structures(benches, kinds, rc.pg, rc.sim);
        const auto b = compare_structures(benches, kinds, rc.pg, rc.sim);
        std::ostringstream sa, sb;
        write_metrics_csv(sa, a, rc.pg.seed);
        write_metrics_csv(sb, b, rc.pg.seed);
        return sa.str() == sb.str() && a[0].error.empty() &&
               a[0].pdp_j == a[0].active_power_w * a[0].delay_s;
    });

    std::cout << (failures == 0 ? "all checks passed\n"
                                : std::to_string(failures) + " check(s) failed\n");
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"gnr power-gating simulation toolkit"};
    app.require_subcommand(1);

    CommonArgs args;
    std::string param_name = "dimer";
    std::string bench_sel = "all";
    std::string structure_sel = "all";
    std::string mode_name = "sleep";

    CLI::App* iv = app.add_subcommand("iv-sweep", "device I-V characterization grids");
    add_common(iv, args);

    CLI::App* ps = app.add_subcommand("param-sweep", "footer device parameter sweeps");
    add_common(ps, args);
    ps->add_option("--param", param_name, "dimer | ribbons | spacing");

    CLI::App* run = app.add_subcommand("run", "one benchmark x structure measurement");
    add_common(run, args);
    run->add_option("--bench", bench_sel, "benchmark name");
    run->add_option("--structure", structure_sel, "structure kind");
    run->add_option("--mode", mode_name, "rest mode for the leakage column");
    bool want_waveforms = false;
    run->add_flag("--waveforms", want_waveforms, "also write the delay-probe waveforms");

    CLI::App* cmp = app.add_subcommand("compare", "cross product of benchmarks and structures");
    add_common(cmp, args);
    cmp->add_option("--bench", bench_sel, "benchmark name or `all`");
    cmp->add_option("--structure", structure_sel, "structure kind or `all`");

    CLI::App* val = app.add_subcommand("validate", "run the invariant checklist");
    add_common(val, args);

    try {
        app.parse(argc, argv);
        if (iv->parsed()) return cmd_iv_sweep(args);
        if (ps->parsed()) return cmd_param_sweep(args, param_name);
        if (run->parsed()) {
            const RunConfig rc = load_config(args);
            const auto benches = resolve_benchmarks(
                rc, bench_sel == "all" ? rc.benchmarks.front() : bench_sel);
            const auto kinds = resolve_structures(
                rc, structure_sel == "all" ? std::string(pg_kind_name(rc.structures.front()))
                                           : structure_sel);
            const auto mode = pg_mode_from_name(mode_name);
            if (!mode) throw ConfigError("--mode", 0, "unknown mode `" + mode_name + "`");
            const int code =
                emit_compare(args, rc, benches, kinds, /*fail_on_cell_error=*/true, *mode);
            if (code == 0 && want_waveforms) {
                const auto& b = benches.front();
                const Circuit ex = expand_to_transistors(
                    b.netlist, ExpandOptions{rc.pg.nmos, rc.pg.pmos, rc.pg.c_load_f});
                const GatedCircuit gc =
                    attach_footer(ex, b.netlist, PgStructure::make(kinds.front()), rc.pg);
                const auto path = find_sensitizable_transition(b.netlist, rc.pg.seed);
                if (path) {
                    const ActiveMetrics am = measure_active_metrics(gc, *path, rc.sim);
                    auto wf = open_out(args.out_dir, "waveforms.csv");
                    wf << "# gnrpg delay-probe waveforms\n";
                    wf << "# seed: " << rc.pg.seed << "\n";
                    wf << "# config: " << rc.pg.fingerprint(rc.sim) << "\n";
                    write_waveforms_csv(wf, am.probes);
                }
            }
            return code;
        }
        if (cmp->parsed()) {
            const RunConfig rc = load_config(args);
            return emit_compare(args, rc, resolve_benchmarks(rc, bench_sel),
                                resolve_structures(rc, structure_sel),
                                /*fail_on_cell_error=*/false);
        }
        if (val->parsed()) return cmd_validate(args);
        return 2;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const BenchParseError& e) {
        std::cerr << "bench parse error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
