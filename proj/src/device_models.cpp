#include "gnrpg/device_models.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace gnrpg {

namespace {

// ln(1 + e^x) without overflow for large x
double softplus(double x) {
    if (x > 34.0) return x + std::exp(-x);
    return std::log1p(std::exp(x));
}

}  // namespace

void GnrGeometry::validate() const {
    if (n_dimer < 3) throw InvalidGeometryError("n_dimer must be >= 3");
    if (n_rib < 1) throw InvalidGeometryError("n_rib must be >= 1");
    if (w_sp_nm < 0) throw InvalidGeometryError("w_sp_nm must be >= 0");
    if (l_ch_nm <= 0 || l_res_nm <= 0 || t_ox_top_nm <= 0 || t_ox_sub_nm <= 0)
        throw InvalidGeometryError("lengths must be > 0");
    if (f_dop <= 0 || f_dop >= 1) throw InvalidGeometryError("f_dop must be in (0, 1)");
    const double w_ch = gnr_channel_width_nm(n_dimer);
    const double w_g = gnr_gate_width_nm(*this);
    if (w_ch <= 0 || w_g <= 0) throw InvalidGeometryError("derived widths must be > 0");
    if ((n_rib > 1 || w_sp_nm > 0) && !(w_g > w_ch))
        throw InvalidGeometryError("W_G must exceed W_CH");
}

double gnr_channel_width_nm(int n_dimer) {
    if (n_dimer < 3) throw InvalidGeometryError("n_dimer must be >= 3");
    return (n_dimer + 1) * std::sqrt(3.0) * phys::d_cc_nm / 2.0;
}

double gnr_gate_width_nm(const GnrGeometry& geom) {
    return (2.0 * geom.w_sp_nm + gnr_channel_width_nm(geom.n_dimer)) * geom.n_rib;
}

Chirality classify_chirality(int n_dimer) {
    if (n_dimer < 3) throw InvalidGeometryError("n_dimer must be >= 3");
    return n_dimer % 3 == 2 ? Chirality::Metallic : Chirality::Semiconducting;
}

SubbandSpectrum subband_energies(const GnrGeometry& geom, int count) {
    geom.validate();
    const int n = geom.n_dimer;
    std::vector<double> all;
    all.reserve(n);
    for (int p = 1; p <= n; ++p) {
        // |1 + 2 cos(p pi / (N+1))| vanishes exactly at p = 2(N+1)/3
        if (3 * p == 2 * (n + 1)) {
            all.push_back(0.0);
        } else {
            const double c = std::cos(p * M_PI / (n + 1));
            all.push_back(phys::t_hop_ev * std::abs(1.0 + 2.0 * c));
        }
    }
    std::sort(all.begin(), all.end());
    const int keep = std::min(count < 1 ? 1 : count, n);
    all.resize(keep);
    return SubbandSpectrum{std::move(all), phys::t_hop_ev};
}

GnrCapSet gnr_capacitances(const GnrGeometry& geom, double beta_cds) {
    geom.validate();
    const double area_m2 = gnr_gate_width_nm(geom) * 1e-9 * geom.l_ch_nm * 1e-9;
    const double c_g = phys::eps_ox * phys::eps0 * area_m2 / (geom.t_ox_top_nm * 1e-9);
    const double c_sub = phys::eps_ox * phys::eps0 * area_m2 / (geom.t_ox_sub_nm * 1e-9);
    return GnrCapSet{c_g, c_sub, beta_cds * c_g, beta_cds * c_g};
}

namespace {

// Excess channel charge relative to the flat-band equilibrium filling, C.
double channel_charge(const SubbandSpectrum& spectrum, int n_rib, double n0, double kt_ev,
                      double psi, double v_s, double v_d) {
    double occ = 0.0;
    for (double e : spectrum.energies_ev) {
        occ += softplus((psi - v_s - e) / kt_ev);
        occ += softplus((psi - v_d - e) / kt_ev);
        occ -= 2.0 * softplus(-e / kt_ev);
    }
    return phys::q * n0 * n_rib * occ;
}

double cap_charge(const GnrCapSet& caps, const BiasPoint& b, double psi) {
    return caps.c_g_ch * (b.v_g - psi) + caps.c_sub_ch * (b.v_sub - psi) +
           caps.c_ch_d * (b.v_d - psi) + caps.c_ch_s * (b.v_s - psi);
}

}  // namespace

double solve_channel_potential(const GnrGeometry& geom, const GnrCapSet& caps,
                               const SubbandSpectrum& spectrum, const BiasPoint& bias,
                               double n0, double temperature_k) {
    const double kt_ev = phys::thermal_voltage(temperature_k);
    // internal target far below the 1e-21 C contract, so the root is precise
    // enough for the circuit solver's finite-difference device Jacobians
    const double tol_c = 1e-28;
    const double contract_c = 1e-21;
    const auto f = [&](double psi) {
        return cap_charge(caps, bias, psi) -
               channel_charge(spectrum, geom.n_rib, n0, kt_ev, psi, bias.v_s, bias.v_d);
    };

    double lo = std::min(bias.v_s, bias.v_d) - 2.0;
    double hi = bias.v_g + 2.0;
    if (hi <= lo) hi = lo + 4.0;
    double flo = f(lo);
    double fhi = f(hi);
    // F is strictly decreasing; widen if the stated bracket misses the root
    for (int i = 0; i < 8 && flo < 0.0; ++i) { lo -= 2.0; flo = f(lo); }
    for (int i = 0; i < 8 && fhi > 0.0; ++i) { hi += 2.0; fhi = f(hi); }
    if (flo < 0.0 || fhi > 0.0)
        throw SolverFailure("channel potential: failed to bracket root");

    double mid = 0.5 * (lo + hi);
    double fmid = f(mid);
    for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
        if (fmid == 0.0) break;
        if (fmid > 0.0) lo = mid; else hi = mid;
        mid = 0.5 * (lo + hi);
        fmid = f(mid);
    }

    // Newton polish on the bisection result
    for (int it = 0; it < 8 && std::abs(fmid) > tol_c; ++it) {
        const double step = 1e-7;
        const double df = (f(mid + step) - f(mid - step)) / (2.0 * step);
        if (df == 0.0) break;
        const double next = mid - fmid / df;
        if (!std::isfinite(next)) break;
        const double fnext = f(next);
        if (std::abs(fnext) >= std::abs(fmid)) break;
        mid = next;
        fmid = fnext;
    }

    if (std::abs(fmid) >= contract_c)
        throw SolverFailure("channel potential: no convergence after 200 bisection steps");
    return mid;
}

double gnr_ids(const SubbandSpectrum& spectrum, double psi_ch, const BiasPoint& bias,
               int n_rib, double temperature_k) {
    const double kt_ev = phys::thermal_voltage(temperature_k);
    const double scale = phys::landauer_current_scale(temperature_k);
    double sum = 0.0;
    for (double e : spectrum.energies_ev) {
        const double src = softplus((psi_ch - bias.v_s - e) / kt_ev);
        const double drn = softplus((psi_ch - bias.v_d - e) / kt_ev);
        sum += src - drn;
    }
    return n_rib * scale * sum;
}

double mos_ids(const MosParams& params, const BiasPoint& bias) {
    double vg = bias.v_g, vd = bias.v_d, vs = bias.v_s;
    double vth = params.v_th;
    double sign = 1.0;
    if (params.polarity == Polarity::P) {
        vg = -vg; vd = -vd; vs = -vs; vth = -vth;
        sign = -1.0;
    }
    // source-referenced from the lower terminal: I(vd, vs) = -I(vs, vd)
    if (vd < vs) {
        std::swap(vd, vs);
        sign = -sign;
    }
    const double vgs = vg - vs;
    const double vds = vd - vs;
    const double n2pt = 2.0 * params.ideality * params.phi_t;
    double x = (vgs - vth) / n2pt;
    double sp = x > 34.0 ? x : std::log1p(std::exp(x));
    const double drive = sp * sp;
    const double drain = -std::expm1(-vds / params.phi_t);
    return sign * params.i_spec * (params.width_nm / params.length_nm) * drive * drain;
}

double calibrate_mos_i_spec(const MosParams& p, double v_on, double i_on) {
    MosParams probe = p;
    probe.polarity = Polarity::N;
    probe.v_th = std::abs(p.v_th);
    probe.i_spec = 1.0;
    const double raw = mos_ids(probe, BiasPoint{v_on, v_on, 0.0, 0.0});
    return i_on / raw;
}

GnrFet GnrFet::make(const GnrGeometry& geom, int subband_count, double n0, double beta_cds,
                    double temperature_k) {
    geom.validate();
    GnrFet fet;
    fet.geom = geom;
    fet.spectrum = subband_energies(geom, subband_count);
    fet.caps = gnr_capacitances(geom, beta_cds);
    fet.n0 = n0;
    fet.temperature_k = temperature_k;
    return fet;
}

double GnrFet::channel_potential(const BiasPoint& bias) const {
    BiasPoint b = bias;
    if (geom.polarity == Polarity::P) b = BiasPoint{-b.v_g, -b.v_d, -b.v_s, -b.v_sub};
    return solve_channel_potential(geom, caps, spectrum, b, n0, temperature_k);
}

double GnrFet::ids(const BiasPoint& bias) const {
    BiasPoint b = bias;
    double sign = 1.0;
    if (geom.polarity == Polarity::P) {
        b = BiasPoint{-b.v_g, -b.v_d, -b.v_s, -b.v_sub};
        sign = -1.0;
    }
    const double psi = solve_channel_potential(geom, caps, spectrum, b, n0, temperature_k);
    return sign * gnr_ids(spectrum, psi, b, geom.n_rib, temperature_k);
}

MosParams default_nmos(double width_nm, double ideality, double v_on_cal, double i_on_cal) {
    MosParams p;
    p.polarity = Polarity::N;
    p.v_th = 0.47965;
    p.t_ox_nm = 0.95;
    p.width_nm = width_nm;
    p.length_nm = 16.0;
    p.ideality = ideality;
    MosParams ref = p;
    ref.width_nm = 33.6;
    p.i_spec = calibrate_mos_i_spec(ref, v_on_cal, i_on_cal);
    return p;
}

MosParams default_pmos(double width_nm, double ideality, double v_on_cal, double i_on_cal) {
    MosParams p;
    p.polarity = Polarity::P;
    p.v_th = -0.43121;
    p.t_ox_nm = 1.0;
    p.width_nm = width_nm;
    p.length_nm = 16.0;
    p.ideality = ideality;
    MosParams ref = p;
    ref.width_nm = 33.6;
    p.i_spec = calibrate_mos_i_spec(ref, v_on_cal, i_on_cal);
    return p;
}

GnrGeometry parse_gnr_config(const std::string& text, const std::string& path) {
    GnrGeometry geom;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            if (line.find_first_not_of(" \t\r") != std::string::npos)
                throw ConfigError(path, lineno, "expected `key = value`");
            continue;
        }
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        try {
            if (key == "n_dimer") geom.n_dimer = std::stoi(val);
            else if (key == "n_rib") geom.n_rib = std::stoi(val);
            else if (key == "w_sp_nm") geom.w_sp_nm = std::stod(val);
            else if (key == "l_ch_nm") geom.l_ch_nm = std::stod(val);
            else if (key == "l_res_nm") geom.l_res_nm = std::stod(val);
            else if (key == "t_ox_top_nm") geom.t_ox_top_nm = std::stod(val);
            else if (key == "t_ox_sub_nm") geom.t_ox_sub_nm = std::stod(val);
            else if (key == "f_dop") geom.f_dop = std::stod(val);
            else if (key == "polarity") {
                if (val == "N") geom.polarity = Polarity::N;
                else if (val == "P") geom.polarity = Polarity::P;
                else throw ConfigError(path, lineno, "polarity must be N or P");
            } else {
                throw ConfigError(path, lineno, "unknown key `" + key + "`");
            }
        } catch (const std::invalid_argument&) {
            throw ConfigError(path, lineno, "bad value for `" + key + "`");
        } catch (const std::out_of_range&) {
            throw ConfigError(path, lineno, "bad value for `" + key + "`");
        }
    }
    geom.validate();
    return geom;
}

GnrGeometry load_gnr_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path, 0, "cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_gnr_config(ss.str(), path);
}

}  // namespace gnrpg
