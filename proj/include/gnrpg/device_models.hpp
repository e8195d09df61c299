#pragma once

#include <string>
#include <vector>

#include "gnrpg/constants.hpp"
#include "gnrpg/errors.hpp"

namespace gnrpg {

enum class Polarity { N, P };
enum class Chirality { Metallic, Semiconducting };

/// Physical/chirality parameters of one GNRFET instance. Defaults are the
/// reference 16 nm device (armchair ribbon, N = 12 dimer lines, 6 ribbons).
struct GnrGeometry {
    int n_dimer = 12;          // dimer lines across the ribbon width
    int n_rib = 6;             // parallel ribbons under one gate
    double w_sp_nm = 2.0;      // spacing between ribbon edges
    double l_ch_nm = 16.0;     // channel length
    double l_res_nm = 16.0;    // doped reservoir length
    double t_ox_top_nm = 0.95; // top-gate oxide thickness
    double t_ox_sub_nm = 20.0; // channel-to-substrate oxide thickness
    double f_dop = 0.001;      // reservoir doping fraction
    Polarity polarity = Polarity::N;

    // Throws InvalidGeometryError. w_sp_nm == 0 is accepted only as the
    // degenerate single-ribbon case (W_G == W_CH).
    void validate() const;
};

/// Subband edge energies of an armchair ribbon, ascending. energies_ev[0] is
/// exactly 0 iff the ribbon is metallic (n_dimer == 2 mod 3).
struct SubbandSpectrum {
    std::vector<double> energies_ev;
    double hopping_ev = phys::t_hop_ev;
};

/// The four electrostatic coupling capacitors of the channel.
struct GnrCapSet {
    double c_g_ch;    // gate-to-channel, F
    double c_sub_ch;  // substrate-to-channel, F
    double c_ch_d;    // channel-to-drain, F
    double c_ch_s;    // channel-to-source, F
};

/// Unified interpolated short-channel MOSFET card with a subthreshold
/// exponential. i_spec is calibrated via calibrate_mos_i_spec so that a
/// width/length device meets a stated on-current at nominal bias.
struct MosParams {
    Polarity polarity = Polarity::N;
    double v_th = 0.47965;       // V (signed; negative for P)
    double t_ox_nm = 0.95;
    double width_nm = 33.6;
    double length_nm = 16.0;
    double ideality = 2.0;       // subthreshold ideality n >= 1
    double i_spec = 0.0;         // A, per-square prefactor
    double phi_t = phys::thermal_voltage(phys::room_temp_k);  // V
};

struct BiasPoint {
    double v_g = 0.0;
    double v_d = 0.0;
    double v_s = 0.0;
    double v_sub = 0.0;
};

// W_CH = (N + 1) * sqrt(3) * d_cc / 2. Throws InvalidGeometryError for N < 3.
double gnr_channel_width_nm(int n_dimer);

// W_G = (2 * W_SP + W_CH) * n_rib
double gnr_gate_width_nm(const GnrGeometry& geom);

// Metallic iff n_dimer == 2 (mod 3); agrees with subband_energies gap zeros.
Chirality classify_chirality(int n_dimer);

// The `count` lowest subband edges e_p = |t| * |1 + 2 cos(p pi / (N+1))|,
// p = 1..N, ascending. count is clamped to N.
SubbandSpectrum subband_energies(const GnrGeometry& geom, int count);

// Parallel-plate estimates from the gate area; c_ch_d = c_ch_s = beta * c_g_ch.
GnrCapSet gnr_capacitances(const GnrGeometry& geom, double beta_cds = 0.05);

// Self-consistent channel potential: root of F(psi) = Q_cap(psi) - Q_ch(psi),
// |F| < 1e-21 C. Q_ch is the excess channel charge relative to the flat-band
// equilibrium filling (so psi = 0 exactly at zero bias), using the same
// ln(1+exp) occupancy kernel as the current formula with a per-ribbon,
// per-subband carrier-count scale n0. F is strictly decreasing in psi;
// bisection over [min(V_S,V_D)-2, V_G+2] followed by Newton polish.
// Throws SolverFailure if 200 bisection steps do not reach tolerance.
double solve_channel_potential(const GnrGeometry& geom, const GnrCapSet& caps,
                               const SubbandSpectrum& spectrum, const BiasPoint& bias,
                               double n0 = 2.0, double temperature_k = phys::room_temp_k);

// Landauer-style ballistic drain current, N-type form:
//   I = n_rib * (2qkT/h) * sum_a [ln(1+e^((q(psi-V_S)-e_a)/kT))
//                               - ln(1+e^((q(psi-V_D)-e_a)/kT))]
// The prefactor uses the Planck constant h (quantum-of-conductance form).
double gnr_ids(const SubbandSpectrum& spectrum, double psi_ch, const BiasPoint& bias,
               int n_rib, double temperature_k = phys::room_temp_k);

// I_D = i_spec * (W/L) * ln^2(1 + e^((V_GS - v_th)/(2 n phi_t))) * (1 - e^(-V_DS/phi_t)),
// evaluated source-referenced from the lower terminal so I(vd, vs) = -I(vs, vd);
// P polarity by electron-hole symmetry (negate voltages and result).
double mos_ids(const MosParams& params, const BiasPoint& bias);

// Returns i_spec such that an n-type card `p` at width_nm/length_nm carries
// i_on amperes at V_GS = V_DS = v_on.
double calibrate_mos_i_spec(const MosParams& p, double v_on, double i_on);

/// A ready-to-simulate GNRFET: geometry plus the derived spectrum and caps.
/// ids() nests the channel-potential solve; P polarity is handled by the
/// electron-hole symmetry transformation around the N-type evaluation.
struct GnrFet {
    GnrGeometry geom;
    SubbandSpectrum spectrum;
    GnrCapSet caps;
    double n0 = 2.0;
    double temperature_k = phys::room_temp_k;

    static GnrFet make(const GnrGeometry& geom, int subband_count = 4, double n0 = 2.0,
                       double beta_cds = 0.05, double temperature_k = phys::room_temp_k);

    double channel_potential(const BiasPoint& bias) const;
    double ids(const BiasPoint& bias) const;
};

// Reference MOS cards for the 16 nm flow. NMOS: v_th = 0.47965 V, t_ox = 0.95 nm;
// PMOS: v_th = -0.43121 V, t_ox = 1 nm. i_spec calibrated so a 33.6/16 nm
// device carries i_on_cal at |V_GS| = |V_DS| = v_on_cal.
MosParams default_nmos(double width_nm = 33.6, double ideality = 2.0,
                       double v_on_cal = 0.7, double i_on_cal = 10e-6);
MosParams default_pmos(double width_nm = 67.2, double ideality = 2.0,
                       double v_on_cal = 0.7, double i_on_cal = 10e-6);

// Device parameter file: `key = value` lines, '#' comments. Keys: n_dimer,
// n_rib, w_sp_nm, l_ch_nm, l_res_nm, t_ox_top_nm, t_ox_sub_nm, f_dop,
// polarity (N|P). Missing keys keep the reference defaults.
GnrGeometry parse_gnr_config(const std::string& text, const std::string& path = "<config>");
GnrGeometry load_gnr_config(const std::string& path);

}  // namespace gnrpg
