#include "gnrpg/circuit_sim.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <unordered_map>

namespace gnrpg {

void SimConfig::validate() const {
    if (abstol <= 0 || reltol <= 0 || dt <= 0 || t_end <= 0)
        throw std::invalid_argument("SimConfig: abstol, reltol, dt, t_end must be > 0");
    if (max_newton_iters < 1) throw std::invalid_argument("SimConfig: max_newton_iters < 1");
}

void Stimulus::set_constant(const std::string& node, double volts) {
    schedules[node] = {{0.0, volts}};
}

void Stimulus::set_step(const std::string& node, double v0, double v1, double t_edge,
                        double t_rise) {
    schedules[node] = {{0.0, v0}, {t_edge, v0}, {t_edge + t_rise, v1}};
}

double Stimulus::value(const std::string& node, double t, double fallback) const {
    auto it = schedules.find(node);
    if (it == schedules.end()) return fallback;
    const auto& pts = it->second;
    if (pts.empty()) return fallback;
    if (t <= pts.front().first) return pts.front().second;
    if (t >= pts.back().first) return pts.back().second;
    for (size_t i = 1; i < pts.size(); ++i) {
        if (t <= pts[i].first) {
            const auto [t0, v0] = pts[i - 1];
            const auto [t1, v1] = pts[i];
            if (t1 == t0) return v1;
            return v0 + (v1 - v0) * (t - t0) / (t1 - t0);
        }
    }
    return pts.back().second;
}

double DcSolution::voltage(const std::string& node) const {
    for (size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i] == node) return volts[i];
    return 0.0;  // ground or unknown
}

namespace {

constexpr double kNewtonVoltLimit = 0.3;  // V, per-iteration update clamp

struct TransistorSlot {
    bool is_gnr = false;
    // node ids (-1 = ground)
    int drain = -1, gate = -1, source = -1, bulk = -1;
    MosParams mos;   // width already multiplied
    const GnrFet* gnr = nullptr;
};

struct TwoTerminalSlot {
    int a = -1, b = -1;
    double value = 0.0;  // conductance (resistor) or farads (capacitor)
};

struct SourceSlot {
    int node = -1;
    double volts = 0.0;
    std::string name;
};

struct CurrentSlot {
    int node = -1;
    double amps = 0.0;
};

class NodalSystem {
public:
    NodalSystem(const Circuit& c, const SimConfig& cfg) : circuit_(c), cfg_(cfg) {
        cfg.validate();
        gmin_now_ = cfg.gmin;
        const int n = static_cast<int>(c.nodes.size());
        for (int i = 0; i < n; ++i) index_[c.nodes[i]] = i;

        std::vector<char> fixed(n, 0);
        for (const auto& dev : c.devices) {
            if (const auto* v = std::get_if<VoltageSource>(&dev)) {
                const int id = node_id(v->node);
                if (id >= 0) {
                    if (fixed[id])
                        throw DcFailure("node " + v->node + " has multiple voltage sources",
                                        v->node, 0.0);
                    fixed[id] = 1;
                    sources_.push_back(SourceSlot{id, v->volts, v->node});
                }
            }
        }

        unknown_of_.assign(n, -1);
        for (int i = 0; i < n; ++i)
            if (!fixed[i]) {
                unknown_of_[i] = static_cast<int>(unknowns_.size());
                unknowns_.push_back(i);
            }

        for (const auto& dev : c.devices) {
            if (const auto* m = std::get_if<Mosfet>(&dev)) {
                TransistorSlot t;
                t.is_gnr = false;
                t.drain = node_id(m->drain);
                t.gate = node_id(m->gate);
                t.source = node_id(m->source);
                t.bulk = node_id(m->bulk);
                t.mos = m->params;
                t.mos.width_nm *= m->width_mult;
                transistors_.push_back(t);
            } else if (const auto* g = std::get_if<GnrFetDevice>(&dev)) {
                TransistorSlot t;
                t.is_gnr = true;
                t.drain = node_id(g->drain);
                t.gate = node_id(g->gate);
                t.source = node_id(g->source);
                t.bulk = node_id(g->substrate);
                t.gnr = &g->fet;
                transistors_.push_back(t);
            } else if (const auto* r = std::get_if<Resistor>(&dev)) {
                resistors_.push_back(TwoTerminalSlot{node_id(r->node_a), node_id(r->node_b),
                                                     1.0 / r->ohms});
            } else if (const auto* cap = std::get_if<Capacitor>(&dev)) {
                caps_.push_back(TwoTerminalSlot{node_id(cap->node_a), node_id(cap->node_b),
                                                cap->farads});
            } else if (const auto* is = std::get_if<CurrentSource>(&dev)) {
                currents_.push_back(CurrentSlot{node_id(is->node), is->amps});
            }
        }
    }

    int node_id(const std::string& name) const {
        if (name == circuit_.ground_ref) return -1;
        return index_.at(name);
    }

    int n_unknowns() const { return static_cast<int>(unknowns_.size()); }
    const std::vector<SourceSlot>& sources() const { return sources_; }

    void apply_sources(std::vector<double>& volt, const Stimulus* stim, double t,
                       double scale = 1.0) const {
        for (const auto& s : sources_) {
            const double v = stim ? stim->value(s.name, t, s.volts) : s.volts;
            volt[s.node] = scale * v;
        }
    }

    double at(const std::vector<double>& volt, int id) const { return id < 0 ? 0.0 : volt[id]; }

    double transistor_current(const TransistorSlot& t, const std::vector<double>& volt) const {
        const BiasPoint b{at(volt, t.gate), at(volt, t.drain), at(volt, t.source),
                          at(volt, t.bulk)};
        return t.is_gnr ? t.gnr->ids(b) : mos_ids(t.mos, b);
    }

    // Static (non-capacitive) KCL currents out of each unknown node.
    void residual_static(const std::vector<double>& volt, Eigen::VectorXd& f) const {
        f.setZero();
        auto add = [&](int id, double i) {
            const int u = id < 0 ? -1 : unknown_of_[id];
            if (u >= 0) f[u] += i;
        };
        for (const auto& t : transistors_) {
            const double i = transistor_current(t, volt);
            add(t.drain, i);
            add(t.source, -i);
        }
        for (const auto& r : resistors_) {
            const double i = (at(volt, r.a) - at(volt, r.b)) * r.value;
            add(r.a, i);
            add(r.b, -i);
        }
        for (const auto& cs : currents_) add(cs.node, -cs.amps);
        for (size_t k = 0; k < unknowns_.size(); ++k)
            f[k] += gmin_now_ * volt[unknowns_[k]];
    }

    // Jacobian of residual_static by per-device central finite differences.
    void jacobian_static(const std::vector<double>& volt, Eigen::MatrixXd& j) const {
        j.setZero();
        std::vector<double>& v = scratch_;
        v = volt;
        auto stamp = [&](int row_id, int col_id, double g) {
            const int r = row_id < 0 ? -1 : unknown_of_[row_id];
            const int c = col_id < 0 ? -1 : unknown_of_[col_id];
            if (r >= 0 && c >= 0) j(r, c) += g;
        };
        const double h = cfg_.fd_step;
        for (const auto& t : transistors_) {
            const int pins[4] = {t.gate, t.drain, t.source, t.bulk};
            const int npins = t.is_gnr ? 4 : 3;
            for (int p = 0; p < npins; ++p) {
                const int pin = pins[p];
                if (pin < 0 || unknown_of_[pin] < 0) continue;
                const double save = v[pin];
                v[pin] = save + h;
                const double ip = transistor_current(t, v);
                v[pin] = save - h;
                const double im = transistor_current(t, v);
                v[pin] = save;
                const double g = (ip - im) / (2.0 * h);
                stamp(t.drain, pin, g);
                stamp(t.source, pin, -g);
            }
        }
        for (const auto& r : resistors_) {
            stamp(r.a, r.a, r.value);
            stamp(r.a, r.b, -r.value);
            stamp(r.b, r.b, r.value);
            stamp(r.b, r.a, -r.value);
        }
        for (size_t k = 0; k < unknowns_.size(); ++k) j(k, k) += gmin_now_;
    }

    // Capacitor companion contributions for one implicit step:
    //   residual += a * C * ((v - v_prev) across the cap)
    void residual_caps(const std::vector<double>& volt, const std::vector<double>& prev,
                       double a, Eigen::VectorXd& f) const {
        auto add = [&](int id, double i) {
            const int u = id < 0 ? -1 : unknown_of_[id];
            if (u >= 0) f[u] += i;
        };
        for (const auto& c : caps_) {
            const double dv = (at(volt, c.a) - at(volt, c.b)) - (at(prev, c.a) - at(prev, c.b));
            const double i = a * c.value * dv;
            add(c.a, i);
            add(c.b, -i);
        }
    }

    void jacobian_caps(double a, Eigen::MatrixXd& j) const {
        auto stamp = [&](int row_id, int col_id, double g) {
            const int r = row_id < 0 ? -1 : unknown_of_[row_id];
            const int c = col_id < 0 ? -1 : unknown_of_[col_id];
            if (r >= 0 && c >= 0) j(r, c) += g;
        };
        for (const auto& c : caps_) {
            const double g = a * c.value;
            stamp(c.a, c.a, g);
            stamp(c.a, c.b, -g);
            stamp(c.b, c.b, g);
            stamp(c.b, c.a, -g);
        }
    }

    // Current delivered by the source on `node` into the circuit: the sum of
    // static device currents out of that node (plus cap companion currents in
    // a transient step).
    double source_draw(int node, const std::vector<double>& volt,
                       const std::vector<double>* prev = nullptr, double a = 0.0) const {
        double sum = 0.0;
        for (const auto& t : transistors_) {
            if (t.drain != node && t.source != node) continue;
            const double i = transistor_current(t, volt);
            if (t.drain == node) sum += i;
            if (t.source == node) sum -= i;
        }
        for (const auto& r : resistors_) {
            if (r.a != node && r.b != node) continue;
            const double i = (at(volt, r.a) - at(volt, r.b)) * r.value;
            if (r.a == node) sum += i;
            if (r.b == node) sum -= i;
        }
        for (const auto& cs : currents_)
            if (cs.node == node) sum -= cs.amps;
        if (prev) {
            for (const auto& c : caps_) {
                if (c.a != node && c.b != node) continue;
                const double dv =
                    (at(volt, c.a) - at(volt, c.b)) - (at(*prev, c.a) - at(*prev, c.b));
                const double i = a * c.value * dv;
                if (c.a == node) sum += i;
                if (c.b == node) sum -= i;
            }
        }
        return sum;
    }

    // Newton solve of residual_static (+ optional cap companions) in place.
    // The step is truncated direction-preserving to kNewtonVoltLimit and
    // backtracked (halving) while it would grow the residual. Returns
    // converged; max_resid/iters report the final state.
    bool newton(std::vector<double>& volt, const std::vector<double>* prev, double a_cap,
                const Eigen::VectorXd* f_extra, double& max_resid, int& iters,
                int* worst_unknown = nullptr) const {
        const int n = n_unknowns();
        if (n == 0) {
            max_resid = 0.0;
            iters = 0;
            return true;
        }
        Eigen::VectorXd f(n), f_try(n), rhs(n);
        Eigen::MatrixXd j(n, n);
        Eigen::PartialPivLU<Eigen::MatrixXd> lu;
        bool have_lu = false;
        bool last_step_small = false;
        std::vector<double> trial;

        const auto eval = [&](const std::vector<double>& v, Eigen::VectorXd& out) {
            residual_static(v, out);
            if (prev) residual_caps(v, *prev, a_cap, out);
            if (f_extra) out += *f_extra;
        };

        eval(volt, f);
        for (iters = 0; iters < cfg_.max_newton_iters; ++iters) {
            int worst = 0;
            max_resid = f.cwiseAbs().maxCoeff(&worst);
            if (worst_unknown) *worst_unknown = worst;
            if (!std::isfinite(max_resid)) return false;
            if (max_resid < cfg_.abstol && (iters == 0 || last_step_small)) return true;

            const bool refactor = !have_lu || prev == nullptr || iters >= 6;
            if (refactor) {
                jacobian_static(volt, j);
                if (prev) jacobian_caps(a_cap, j);
                lu.compute(j);
                have_lu = true;
            }
            rhs = lu.solve(-f);
            if (rhs.allFinite() && refactor) {
                // one step of iterative refinement; the sleep-state systems are
                // stiff enough that raw LU roundoff stalls Newton otherwise
                rhs += lu.solve(-f - j * rhs);
            }
            if (!rhs.allFinite()) {
                if (!refactor) { have_lu = false; --iters; continue; }
                return false;
            }

            // per-node voltage limiting: saturate large components instead of
            // scaling the whole direction (high-gain chains otherwise freeze
            // every upstream node), then backtrack while the residual grows
            for (int k = 0; k < n; ++k)
                rhs[k] = std::clamp(rhs[k], -kNewtonVoltLimit, kNewtonVoltLimit);

            double alpha = 1.0;
            double best_alpha = 0.0;
            double best_r = std::numeric_limits<double>::infinity();
            for (int bt = 0; bt < 9; ++bt, alpha *= 0.5) {
                trial = volt;
                for (int k = 0; k < n; ++k) trial[unknowns_[k]] += alpha * rhs[k];
                eval(trial, f_try);
                const double r = f_try.cwiseAbs().maxCoeff();
                if (std::isfinite(r) && r < best_r) {
                    best_r = r;
                    best_alpha = alpha;
                }
                if (std::isfinite(r) && r < max_resid) break;
            }
            if (!std::isfinite(best_r)) return false;
            if (best_alpha != alpha) {
                trial = volt;
                for (int k = 0; k < n; ++k) trial[unknowns_[k]] += best_alpha * rhs[k];
                eval(trial, f_try);
            }

            last_step_small = true;
            for (int k = 0; k < n; ++k) {
                const double d = best_alpha * rhs[k];
                if (std::abs(d) > cfg_.reltol * std::abs(volt[unknowns_[k]]) + 1e-9)
                    last_step_small = false;
            }
            volt = trial;
            f = f_try;
            max_resid = best_r;
        }
        return false;
    }

    void set_gmin(double g) const { gmin_now_ = g; }

    std::string unknown_name(int u) const { return circuit_.nodes[unknowns_[u]]; }

    DcSolution pack(const std::vector<double>& volt, double max_resid, int iters) const {
        DcSolution sol;
        sol.nodes = circuit_.nodes;
        sol.volts = volt;
        sol.max_residual_a = max_resid;
        sol.newton_iters = iters;
        return sol;
    }

    const Circuit& circuit_;
    const SimConfig& cfg_;
    std::unordered_map<std::string, int> index_;
    std::vector<int> unknown_of_;
    std::vector<int> unknowns_;
    std::vector<TransistorSlot> transistors_;
    std::vector<TwoTerminalSlot> resistors_;
    std::vector<TwoTerminalSlot> caps_;
    std::vector<SourceSlot> sources_;
    std::vector<CurrentSlot> currents_;
    mutable std::vector<double> scratch_;
    mutable double gmin_now_ = 0.0;
};

DcSolution dc_solve(const NodalSystem& sys, const Circuit& c, const SimConfig& cfg,
                    const Stimulus* stim, double t, const DcSolution* warm = nullptr) {
    std::vector<double> volt(c.nodes.size(), 0.0);
    double max_resid = 0.0;
    int iters = 0;
    int worst = 0;

    if (warm && warm->volts.size() == volt.size() && warm->nodes == c.nodes) {
        volt = warm->volts;
        sys.apply_sources(volt, stim, t);
        if (sys.newton(volt, nullptr, 0.0, nullptr, max_resid, iters, &worst))
            return sys.pack(volt, max_resid, iters);
        std::fill(volt.begin(), volt.end(), 0.0);
    }

    sys.apply_sources(volt, stim, t);
    if (sys.newton(volt, nullptr, 0.0, nullptr, max_resid, iters, &worst))
        return sys.pack(volt, max_resid, iters);

    // source-stepping fallback: ramp all sources 0 -> nominal in 10 stages
    std::fill(volt.begin(), volt.end(), 0.0);
    bool ok = true;
    for (int stage = 1; stage <= 10 && ok; ++stage) {
        sys.apply_sources(volt, stim, t, stage / 10.0);
        ok = sys.newton(volt, nullptr, 0.0, nullptr, max_resid, iters, &worst);
    }
    if (ok) return sys.pack(volt, max_resid, iters);

    // gmin stepping: continuation from a strongly shunted system down to the
    // configured value, warm-starting each rung; occasional rung failures are
    // tolerated (the next rung re-enters Newton from the best state so far)
    std::fill(volt.begin(), volt.end(), 0.0);
    sys.apply_sources(volt, stim, t);
    int misses = 0;
    for (double g = 1e-3; g > cfg.gmin && g > 1e-14; g *= std::sqrt(0.1)) {
        sys.set_gmin(g);
        if (!sys.newton(volt, nullptr, 0.0, nullptr, max_resid, iters, &worst)) ++misses;
        if (misses > 6) break;
    }
    sys.set_gmin(cfg.gmin);
    if (misses <= 6 && sys.newton(volt, nullptr, 0.0, nullptr, max_resid, iters, &worst))
        return sys.pack(volt, max_resid, iters);

    // pseudo-transient: back-Euler relaxation toward the operating point with
    // geometrically growing steps; the capacitor companions keep the chain
    // gains tame until the state is near equilibrium
    std::fill(volt.begin(), volt.end(), 0.0);
    sys.apply_sources(volt, stim, t);
    sys.set_gmin(cfg.gmin);
    std::vector<double> prior;
    double dt_pt = 1e-12;
    for (int step = 0; step < 600 && dt_pt < 10.0; ++step) {
        prior = volt;
        double r = 0.0;
        int it = 0;
        if (!sys.newton(volt, &prior, 1.0 / dt_pt, nullptr, r, it, &worst)) {
            volt = prior;
            dt_pt *= 0.25;
            if (dt_pt < 1e-16) break;
            continue;
        }
        dt_pt *= 1.8;
    }
    if (sys.newton(volt, nullptr, 0.0, nullptr, max_resid, iters, &worst))
        return sys.pack(volt, max_resid, iters);

    throw DcFailure("dc operating point failed (worst node " + sys.unknown_name(worst) + ")",
                    sys.unknown_name(worst), max_resid);
}

}  // namespace

DcSolution dc_operating_point(const Circuit& c, const SimConfig& cfg, const Stimulus* stim,
                              const DcSolution* warm_start) {
    NodalSystem sys(c, cfg);
    if (sys.sources().empty())
        throw DcFailure("circuit has no voltage source tying it to ground", c.ground_ref, 0.0);
    return dc_solve(sys, c, cfg, stim, 0.0, warm_start);
}

TransientResult transient(const Circuit& c, const Stimulus& stim, const SimConfig& cfg,
                          const std::vector<std::string>& probes,
                          const std::function<bool(double, const std::vector<double>&)>& stop,
                          const DcSolution* warm_start) {
    NodalSystem sys(c, cfg);
    const int n_steps = static_cast<int>(std::llround(cfg.t_end / cfg.dt));

    std::vector<int> probe_ids;
    probe_ids.reserve(probes.size());
    for (const auto& p : probes) probe_ids.push_back(sys.node_id(p));

    int vdd_id = -1;
    if (c.has_node(kVdd)) vdd_id = sys.node_id(kVdd);

    DcSolution init = dc_solve(sys, c, cfg, &stim, 0.0, warm_start);
    std::vector<double> volt = init.volts;
    std::vector<double> prev = volt;

    TransientResult res;
    res.probes.resize(probes.size());
    for (size_t i = 0; i < probes.size(); ++i) res.probes[i].node = probes[i];

    const bool trap = cfg.integration == Integration::Trapezoidal;
    const double a_cap = trap ? 2.0 / cfg.dt : 1.0 / cfg.dt;

    Eigen::VectorXd f_prev(sys.n_unknowns());
    std::vector<double> probe_vals(probes.size());

    auto record = [&](double t, const std::vector<double>& v) {
        for (size_t i = 0; i < probe_ids.size(); ++i) {
            const double pv = probe_ids[i] < 0 ? 0.0 : v[probe_ids[i]];
            res.probes[i].times.push_back(t);
            res.probes[i].volts.push_back(pv);
            probe_vals[i] = pv;
        }
        if (vdd_id >= 0)
            res.supply_current_a.push_back(
                sys.source_draw(vdd_id, v, t > 0 ? &prev : nullptr, a_cap));
        res.t_stop = t;
    };

    record(0.0, volt);
    if (stop && stop(0.0, probe_vals)) {
        res.stopped_early = true;
        return res;
    }

    for (int step = 1; step <= n_steps; ++step) {
        const double t = step * cfg.dt;
        prev = volt;
        if (trap) sys.residual_static(prev, f_prev);
        sys.apply_sources(volt, &stim, t);

        double max_resid = 0.0;
        int iters = 0;
        if (!sys.newton(volt, &prev, a_cap, trap ? &f_prev : nullptr, max_resid, iters))
            throw TransientFailure("transient step did not converge at t=" + std::to_string(t),
                                   t);
        record(t, volt);
        if (stop && stop(t, probe_vals)) {
            res.stopped_early = true;
            break;
        }
    }
    return res;
}

namespace {

// first index i such that the segment [i, i+1] crosses ref; -1 if none
double first_crossing(const Waveform& w, double ref, double t_min) {
    for (size_t i = 0; i + 1 < w.times.size(); ++i) {
        if (w.times[i + 1] < t_min) continue;
        const double a = w.volts[i] - ref;
        const double b = w.volts[i + 1] - ref;
        const bool crosses = (a < 0 && b >= 0) || (a > 0 && b <= 0);
        if (!crosses) continue;
        const double frac = (a == b) ? 0.0 : a / (a - b);
        const double t = w.times[i] + frac * (w.times[i + 1] - w.times[i]);
        if (t >= t_min) return t;
    }
    return -1.0;
}

}  // namespace

double measure_delay(const Waveform& in, const Waveform& out, double v_ref) {
    const double t_in = first_crossing(in, v_ref, 0.0);
    if (t_in < 0)
        throw NoCrossingError("input waveform " + in.node + " never crosses reference");
    // both are "first crossing after the stimulus edge"; the waveforms hold
    // their DC baselines until the edge, so searching from t = 0 is safe
    const double t_out = first_crossing(out, v_ref, 0.0);
    if (t_out < 0)
        throw NoCrossingError("output waveform " + out.node + " never crosses reference");
    return t_out - t_in;
}

double measure_delay(const std::vector<Waveform>& wfs, const std::string& in_node,
                     const std::string& out_node, double v_ref) {
    const Waveform* in = nullptr;
    const Waveform* out = nullptr;
    for (const auto& w : wfs) {
        if (w.node == in_node) in = &w;
        if (w.node == out_node) out = &w;
    }
    if (!in || !out) throw NoCrossingError("probe waveform missing for delay measurement");
    return measure_delay(*in, *out, v_ref);
}

double supply_current(const Circuit& c, const DcSolution& sol, const std::string& source_node) {
    SimConfig cfg;
    NodalSystem sys(c, cfg);
    return sys.source_draw(sys.node_id(source_node), sol.volts);
}

void write_waveforms_csv(std::ostream& os, const std::vector<Waveform>& wfs) {
    if (wfs.empty()) return;
    os << "time_s";
    for (const auto& w : wfs) os << "," << w.node;
    os << "\n";
    char buf[32];
    for (size_t i = 0; i < wfs[0].times.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.9e", wfs[0].times[i]);
        os << buf;
        for (const auto& w : wfs) {
            std::snprintf(buf, sizeof buf, "%.9e", w.volts[i]);
            os << "," << buf;
        }
        os << "\n";
    }
}

}  // namespace gnrpg
