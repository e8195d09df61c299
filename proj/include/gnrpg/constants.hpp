#pragma once

namespace gnrpg::phys {

constexpr double q      = 1.602176634e-19;   // electron charge, C
constexpr double k_b    = 1.380649e-23;      // Boltzmann constant, J/K
constexpr double h      = 6.62607015e-34;    // Planck constant, J s
constexpr double eps0   = 8.8541878128e-12;  // vacuum permittivity, F/m
constexpr double eps_ox = 3.9;               // SiO2 relative permittivity

constexpr double d_cc_nm     = 0.142;        // carbon-carbon bond length, nm
constexpr double t_hop_ev    = 2.7;          // nearest-neighbor hopping energy, eV
constexpr double room_temp_k = 300.0;

// kT/q in volts
inline constexpr double thermal_voltage(double kelvin) { return k_b * kelvin / q; }

// 2qkT/h, the Landauer current scale per ribbon, A
inline constexpr double landauer_current_scale(double kelvin) {
    return 2.0 * q * k_b * kelvin / h;
}

}  // namespace gnrpg::phys
