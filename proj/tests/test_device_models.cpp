#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "gnrpg/device_models.hpp"

using namespace gnrpg;

namespace {

GnrGeometry table3() { return GnrGeometry{}; }

// independent evaluation of the tight-binding subband formula, all p
double min_subband_ev(int n) {
    double best = 1e30;
    for (int p = 1; p <= n; ++p)
        best = std::min(best, phys::t_hop_ev * std::abs(1.0 + 2.0 * std::cos(p * M_PI / (n + 1))));
    return best;
}

// independent occupancy kernel for the charge-residual oracle
double oracle_channel_charge(const SubbandSpectrum& sp, int n_rib, double n0, double psi,
                             double vs, double vd) {
    const double kt = phys::thermal_voltage(300.0);
    double occ = 0.0;
    for (double e : sp.energies_ev) {
        occ += std::log1p(std::exp((psi - vs - e) / kt));
        occ += std::log1p(std::exp((psi - vd - e) / kt));
        occ -= 2.0 * std::log1p(std::exp(-e / kt));
    }
    return phys::q * n0 * n_rib * occ;
}

double oracle_residual(const GnrGeometry& g, const GnrCapSet& c, const SubbandSpectrum& sp,
                       const BiasPoint& b, double psi, double n0) {
    const double q_cap = c.c_g_ch * (b.v_g - psi) + c.c_sub_ch * (b.v_sub - psi) +
                         c.c_ch_d * (b.v_d - psi) + c.c_ch_s * (b.v_s - psi);
    return q_cap - oracle_channel_charge(sp, g.n_rib, n0, psi, b.v_s, b.v_d);
}

}  // namespace

TEST_CASE("channel width from dimer count") {
    // direct arithmetic with d_cc = 0.142 nm
    CHECK(gnr_channel_width_nm(12) == doctest::Approx(13.0 * std::sqrt(3.0) * 0.142 / 2.0));
    CHECK(gnr_channel_width_nm(12) == doctest::Approx(1.5988).epsilon(0.001));
    CHECK(gnr_channel_width_nm(3) == doctest::Approx(4.0 * std::sqrt(3.0) * 0.142 / 2.0));
    CHECK(gnr_channel_width_nm(3) == doctest::Approx(0.4919).epsilon(0.001));
    CHECK_THROWS_AS(gnr_channel_width_nm(2), InvalidGeometryError);
}

TEST_CASE("gate width") {
    GnrGeometry g = table3();
    CHECK(gnr_gate_width_nm(g) == doctest::Approx(33.6).epsilon(0.05 / 33.6));

    GnrGeometry degenerate = g;
    degenerate.n_rib = 1;
    degenerate.w_sp_nm = 0.0;
    CHECK(gnr_gate_width_nm(degenerate) == doctest::Approx(gnr_channel_width_nm(12)));

    GnrGeometry fig9 = g;
    fig9.n_rib = 12;
    fig9.w_sp_nm = 4.0;
    CHECK(gnr_gate_width_nm(fig9) == doctest::Approx(115.2).epsilon(0.1 / 115.2));
}

TEST_CASE("gate width scales linearly in ribbon count") {
    GnrGeometry g = table3();
    for (int k : {1, 2, 3, 5, 8}) {
        GnrGeometry a = g, b = g;
        a.n_rib = k;
        b.n_rib = 2 * k;
        CHECK(gnr_gate_width_nm(b) == doctest::Approx(2.0 * gnr_gate_width_nm(a)));
    }
}

TEST_CASE("geometry validation") {
    GnrGeometry g = table3();
    CHECK_NOTHROW(g.validate());
    g.f_dop = 0.0;
    CHECK_THROWS_AS(g.validate(), InvalidGeometryError);
    g = table3();
    g.n_dimer = 2;
    CHECK_THROWS_AS(g.validate(), InvalidGeometryError);
    g = table3();
    g.l_ch_nm = -1;
    CHECK_THROWS_AS(g.validate(), InvalidGeometryError);
}

TEST_CASE("chirality classification matches the published lists") {
    for (int n : {8, 11, 14, 17}) CHECK(classify_chirality(n) == Chirality::Metallic);
    for (int n : {6, 9, 12, 15, 18, 10, 13, 16, 19})
        CHECK(classify_chirality(n) == Chirality::Semiconducting);
    CHECK_THROWS_AS(classify_chirality(2), InvalidGeometryError);
}

TEST_CASE("subband energies agree with the tight-binding gap zeros") {
    for (int n = 3; n <= 60; ++n) {
        GnrGeometry g = table3();
        g.n_dimer = n;
        const auto sp = subband_energies(g, 4);
        REQUIRE(!sp.energies_ev.empty());
        CHECK(std::is_sorted(sp.energies_ev.begin(), sp.energies_ev.end()));
        CHECK(sp.energies_ev.front() >= 0.0);
        // dual oracle: direct formula minimum over all p
        CHECK(sp.energies_ev.front() == doctest::Approx(min_subband_ev(n)).epsilon(1e-12));
        const bool metallic = classify_chirality(n) == Chirality::Metallic;
        CHECK((sp.energies_ev.front() == 0.0) == metallic);
    }
}

TEST_CASE("subband examples") {
    GnrGeometry g = table3();
    g.n_dimer = 14;
    CHECK(subband_energies(g, 4).energies_ev.front() == 0.0);  // p=10 gives 1+2cos(2pi/3)=0
    g.n_dimer = 12;
    CHECK(subband_energies(g, 4).energies_ev.front() > 0.0);
    g.n_dimer = 13;
    CHECK(subband_energies(g, 4).energies_ev.front() > 0.0);
}

TEST_CASE("coupling capacitances") {
    GnrGeometry g = table3();
    const auto c = gnr_capacitances(g);
    CHECK(c.c_g_ch > 0);
    CHECK(c.c_sub_ch > 0);
    CHECK(c.c_ch_d > 0);
    CHECK(c.c_ch_s > 0);

    // parallel-plate proportionality
    GnrGeometry thin = g;
    thin.t_ox_top_nm = g.t_ox_top_nm / 2.0;
    CHECK(gnr_capacitances(thin).c_g_ch == doctest::Approx(2.0 * c.c_g_ch));

    // ratio fixed by the two oxide thicknesses
    CHECK(c.c_sub_ch / c.c_g_ch == doctest::Approx(0.95 / 20.0).epsilon(1e-4));

    // direct arithmetic oracle for the gate capacitor
    const double w_g = gnr_gate_width_nm(g) * 1e-9;
    const double expect = 3.9 * phys::eps0 * (w_g * 16e-9) / 0.95e-9;
    CHECK(c.c_g_ch == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("channel potential at zero bias is zero") {
    GnrGeometry g = table3();
    const auto sp = subband_energies(g, 4);
    const auto caps = gnr_capacitances(g);
    const double psi = solve_channel_potential(g, caps, sp, BiasPoint{0, 0, 0, 0});
    CHECK(std::abs(psi) < 1e-9);
}

TEST_CASE("channel potential rises with gate voltage") {
    GnrGeometry g = table3();
    const auto sp = subband_energies(g, 4);
    const auto caps = gnr_capacitances(g);
    const double lo = solve_channel_potential(g, caps, sp, BiasPoint{0.10, 0, 0, 0});
    const double hi = solve_channel_potential(g, caps, sp, BiasPoint{0.35, 0, 0, 0});
    CHECK(hi > lo);
}

TEST_CASE("channel potential residual below 1e-21 C on random biases") {
    GnrGeometry g = table3();
    const auto sp = subband_energies(g, 4);
    const auto caps = gnr_capacitances(g);
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-0.35, 0.35);
    for (int i = 0; i < 100; ++i) {
        const BiasPoint b{u(rng), u(rng), u(rng), u(rng)};
        const double psi = solve_channel_potential(g, caps, sp, b);
        CHECK(std::abs(oracle_residual(g, caps, sp, b, psi, 2.0)) < 1e-21);
    }
}

TEST_CASE("charge balance F is monotone in psi") {
    GnrGeometry g = table3();
    const auto sp = subband_energies(g, 4);
    const auto caps = gnr_capacitances(g);
    const BiasPoint b{0.3, 0.25, 0.0, 0.0};
    int sign_changes = 0;
    double prev = oracle_residual(g, caps, sp, b, -2.0, 2.0);
    for (int i = 1; i < 1000; ++i) {
        const double psi = -2.0 + 4.0 * i / 999.0;
        const double f = oracle_residual(g, caps, sp, b, psi, 2.0);
        if ((prev > 0) != (f > 0)) ++sign_changes;
        prev = f;
    }
    CHECK(sign_changes <= 1);
}

TEST_CASE("ballistic current vanishes at V_D == V_S") {
    GnrGeometry g = table3();
    const auto sp = subband_energies(g, 4);
    for (double v : {-0.3, 0.0, 0.2, 0.35}) {
        CHECK(gnr_ids(sp, 0.17, BiasPoint{0.35, v, v, 0.0}, g.n_rib) == 0.0);
    }
}

TEST_CASE("ballistic current is antisymmetric under terminal swap") {
    GnrGeometry g = table3();
    const auto sp = subband_energies(g, 4);
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-0.35, 0.35);
    for (int i = 0; i < 1000; ++i) {
        const double psi = u(rng), vd = u(rng), vs = u(rng), vg = u(rng);
        const double fwd = gnr_ids(sp, psi, BiasPoint{vg, vd, vs, 0.0}, g.n_rib);
        const double rev = gnr_ids(sp, psi, BiasPoint{vg, vs, vd, 0.0}, g.n_rib);
        const double scale = std::max({std::abs(fwd), std::abs(rev), 1e-300});
        CHECK(std::abs(fwd + rev) / scale <= 1e-15);
    }
}

TEST_CASE("reference device on/off ratio") {
    const GnrFet fet = GnrFet::make(table3());
    const double i_on = fet.ids(BiasPoint{0.35, 0.35, 0.0, 0.0});
    const double i_off = fet.ids(BiasPoint{0.0, 0.35, 0.0, 0.0});
    CHECK(i_on > 0);
    CHECK(i_off > 0);
    CHECK(i_on / i_off >= 1e3);

    // ratio-of-ratios against the matched-width MOSFET
    const MosParams nmos = default_nmos();
    const double m_on = mos_ids(nmos, BiasPoint{0.35, 0.35, 0.0, 0.0});
    const double m_off = mos_ids(nmos, BiasPoint{0.0, 0.35, 0.0, 0.0});
    CHECK((i_on / i_off) / (m_on / m_off) >= 10.0);
}

TEST_CASE("gnr transconductance is positive over the operating range") {
    const GnrFet fet = GnrFet::make(table3());
    for (double vg = 0.0; vg <= 0.35 - 1e-3 + 1e-12; vg += 0.05) {
        const double lo = fet.ids(BiasPoint{vg, 0.35, 0.0, 0.0});
        const double hi = fet.ids(BiasPoint{vg + 1e-3, 0.35, 0.0, 0.0});
        CHECK(hi > lo);
    }
}

TEST_CASE("p-type device mirrors the n-type") {
    GnrGeometry g = table3();
    g.polarity = Polarity::P;
    const GnrFet p = GnrFet::make(g);
    const GnrFet n = GnrFet::make(table3());
    const double ip = p.ids(BiasPoint{-0.35, -0.35, 0.0, 0.0});
    const double in = n.ids(BiasPoint{0.35, 0.35, 0.0, 0.0});
    CHECK(ip == doctest::Approx(-in));
}

TEST_CASE("mos model basics") {
    const MosParams nmos = default_nmos();
    CHECK(mos_ids(nmos, BiasPoint{0.5, 0.0, 0.0, 0.0}) == 0.0);  // V_DS = 0

    // calibration target: 10 uA at 0.7/0.7 for the 33.6/16 device
    CHECK(mos_ids(nmos, BiasPoint{0.7, 0.7, 0.0, 0.0}) == doctest::Approx(10e-6).epsilon(1e-9));

    // subthreshold leakage: positive but far below the on-current
    const double off = mos_ids(nmos, BiasPoint{0.0, 0.7, 0.0, 0.0});
    const double on = mos_ids(nmos, BiasPoint{0.7, 0.7, 0.0, 0.0});
    CHECK(off > 0.0);
    CHECK(off < 1e-3 * on);

    // monotone in V_GS
    const double a = mos_ids(nmos, BiasPoint{0.3, 0.7, 0.0, 0.0});
    const double b = mos_ids(nmos, BiasPoint{0.5, 0.7, 0.0, 0.0});
    const double c = mos_ids(nmos, BiasPoint{0.7, 0.7, 0.0, 0.0});
    CHECK(c > b);
    CHECK(b > a);

    // drain-source exchange antisymmetry
    const double fwd = mos_ids(nmos, BiasPoint{0.5, 0.6, 0.1, 0.0});
    const double rev = mos_ids(nmos, BiasPoint{0.5, 0.1, 0.6, 0.0});
    CHECK(fwd == doctest::Approx(-rev));

    // p-type symmetry
    const MosParams pmos = default_pmos();
    const double ip = mos_ids(pmos, BiasPoint{0.0, 0.0, 0.7, 0.0});
    CHECK(ip < 0.0);  // current flows source->drain (pull-up)
}

TEST_CASE("device config parsing") {
    const std::string text =
        "# reference device\n"
        "n_dimer = 12\n"
        "n_rib = 6\n"
        "w_sp_nm = 2\n"
        "t_ox_top_nm = 0.95\n"
        "t_ox_sub_nm = 20\n"
        "f_dop = 0.001\n";
    const GnrGeometry g = parse_gnr_config(text);
    CHECK(g.n_dimer == 12);
    CHECK(g.n_rib == 6);
    CHECK(gnr_gate_width_nm(g) == doctest::Approx(33.6).epsilon(0.002));

    CHECK_THROWS_AS(parse_gnr_config("n_dimer = twelve\n"), ConfigError);
    CHECK_THROWS_AS(parse_gnr_config("mystery = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_gnr_config("just some words\n"), ConfigError);
}
