#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <random>

#include "opo/cavity.hpp"

using namespace opo;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

CavityGeometry empty_cavity(double R1, double R2, double L) {
    CavityGeometry g;
    g.R1 = R1;
    g.R2 = R2;
    g.L = L;
    return g;
}

// Generalised Laguerre polynomial by its three-term recurrence.
double laguerre(int p, int l, double x) {
    if (p == 0) return 1.0;
    double a = 1.0, b = 1.0 + l - x;
    for (int k = 1; k < p; ++k) {
        const double c = ((2 * k + 1 + l - x) * b - (k + l) * a) / (k + 1);
        a = b;
        b = c;
    }
    return b;
}

// Composite Simpson on a fixed grid, independent of the adaptive integrator.
double overlap_oracle(int f, int l, double rho) {
    const int p = (f - l) / 2;
    const double a = 1.0 + 1.0 / (2 * rho * rho);
    const double pref = std::exp(std::lgamma(p + 1.0) - std::lgamma((f + l) / 2 + 1.0)) / rho;
    const int n = 20000;
    const double hi = 14.0, h = hi / n;
    double s = 0;
    for (int i = 0; i <= n; ++i) {
        const double u = i * h, L = laguerre(p, l, u * u);
        const double v = std::exp(-a * u * u) * std::pow(u, 2 * l + 1) * L * L;
        s += v * (i == 0 || i == n ? 1 : (i % 2 ? 4 : 2));
    }
    return pref * s * h / 3;
}

}  // namespace

TEST_CASE("geometry g-parameters and stability") {
    const auto r = analyze_geometry(empty_cavity(2e-2, 2e-2, 1e-2));
    CHECK(r.g1 == doctest::Approx(0.5));
    CHECK(r.g2 == doctest::Approx(0.5));
    CHECK(r.stable);
    const auto plane = analyze_geometry(empty_cavity(kInf, kInf, 1e-2));
    CHECK(plane.g1 * plane.g2 == doctest::Approx(1.0));
    CHECK_FALSE(plane.stable);
}

TEST_CASE("confocal free spectral range and Gouy phase") {
    const auto r = analyze_geometry(empty_cavity(5e-3, 5e-3, 5e-3));
    CHECK(r.fsr == doctest::Approx(phys::pi * phys::c / 5e-3));
    CHECK(r.fsr == doctest::Approx(1.9e11).epsilon(0.01));
    CHECK(r.gouy == doctest::Approx(phys::pi).epsilon(1e-12));
}

TEST_CASE("ABCD determinant and trace over random geometries") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int i = 0; i < 500; ++i) {
        CavityGeometry g;
        g.L = 1e-2 * (1 + U(rng) * 0.5);
        g.lc = 0.3 * g.L * (1 + U(rng));
        g.nc = 1.0 + std::abs(U(rng));
        auto radius = [&] { const double u = U(rng); return (u < 0 ? -1 : 1) * (5e-3 + 0.1 * std::abs(u)); };
        g.R1 = std::abs(U(rng)) > 0.1 ? radius() : kInf;
        g.R2 = radius();
        const auto r = analyze_geometry(g);
        CHECK(std::abs(r.abcd.determinant() - 1.0) < 1e-12);
        const double half = 0.5 * r.abcd.trace();
        CHECK(half == doctest::Approx(2 * r.g1 * r.g2 - 1).epsilon(1e-9));
        CHECK(r.stable == (half > -1 && half < 1));
    }
}

TEST_CASE("geometry invariants are enforced") {
    CavityGeometry g = empty_cavity(1, 1, -1);
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);
    g.L = 1e-2;
    g.lc = 2e-2;
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);
    g.lc = 0;
    g.nc = 0.5;
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);
}

TEST_CASE("resonance frequencies in the confocal, planar and concentric limits") {
    const auto conf = empty_cavity(5e-3, 5e-3, 5e-3);
    const double fsr = analyze_geometry(conf).fsr;
    CHECK(resonance_frequency(conf, 10, 1) == doctest::Approx(fsr * 11.0));
    CHECK(resonance_frequency(conf, 10, 0) == doctest::Approx(resonance_frequency(conf, 9, 2)));
    const auto planar = empty_cavity(1e6, 1e6, 5e-3);
    CHECK(resonance_frequency(planar, 10, 3) == doctest::Approx(fsr * 10.0).epsilon(1e-4));
    const auto conc = empty_cavity(2.5e-3, 2.5e-3, 5e-3);
    CHECK(resonance_frequency(conc, 10, 3) == doctest::Approx(fsr * 14.0).epsilon(1e-12));
    CHECK_THROWS(resonance_frequency(empty_cavity(1e-3, 1e-3, 5e-3), 1, 0));
}

TEST_CASE("confocal Gaussian mode geometry") {
    const auto m = gaussian_mode_geometry(empty_cavity(5e-3, 5e-3, 5e-3), 532e-9);
    CHECK(m.w0 == doctest::Approx(20.6e-6).epsilon(0.005));
    CHECK(std::abs(m.zR) == doctest::Approx(2.5e-3));
    CHECK(m.z1_eff == doctest::Approx(2.5e-3));
    CHECK(m.w(m.zR) == doctest::Approx(std::sqrt(2.0) * m.w0));
    CHECK(m.psi(0.0) == doctest::Approx(0.0));
    const auto sym = gaussian_mode_geometry(empty_cavity(2e-2, 2e-2, 1e-2), 1e-6);
    CHECK(sym.z1_eff == doctest::Approx(5e-3));
    CHECK_THROWS_AS(gaussian_mode_geometry(empty_cavity(kInf, kInf, 1e-2), 1e-6), std::domain_error);
}

TEST_CASE("mode amplitude special values") {
    ModeSpec hg;
    hg.k = 2 * phys::pi / 1e-6;
    hg.w0 = 30e-6;
    const auto a = mode_amplitude(hg, 0, 0, 0);
    CHECK(a.real() == doctest::Approx(1.0 / (hg.w0 * std::sqrt(phys::pi / 2))));
    CHECK(std::abs(a.imag()) < 1e-9 * std::abs(a));
    ModeSpec lg = hg;
    lg.basis = ModeBasis::LG;
    lg.i1 = 0;
    lg.i2 = 1;
    CHECK(std::abs(mode_amplitude(lg, 0, 0, 1e-3)) == 0.0);
    ModeSpec hlg = hg;
    hlg.basis = ModeBasis::HLG;
    hlg.i1 = 1;
    hlg.i2 = 0;
    hlg.parity = HlgParity::Sin;
    CHECK(std::abs(mode_amplitude(hlg, 1e-5, 2e-5, 0)) == 0.0);
    hlg.parity = HlgParity::Cos;
    ModeSpec lg10 = hg;
    lg10.basis = ModeBasis::LG;
    lg10.i1 = 1;
    const auto u = mode_amplitude(hlg, 1e-5, 2e-5, 1e-4), v = mode_amplitude(lg10, 1e-5, 2e-5, 1e-4);
    CHECK(std::abs(u - v) < 1e-9 * std::abs(v));
    ModeSpec bad = hg;
    bad.i1 = -1;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    CHECK(lg10.family() == 2);
}

TEST_CASE("transverse modes are orthonormal for families up to 4") {
    const double w0 = 1.0, k = 50.0, zR = k * w0 * w0 / 2;
    std::vector<ModeSpec> modes;
    for (int f = 0; f <= 4; ++f) {
        for (int m = 0; m <= f; ++m) {
            ModeSpec s;
            s.basis = ModeBasis::HG;
            s.i1 = m;
            s.i2 = f - m;
            s.k = k;
            s.w0 = w0;
            modes.push_back(s);
        }
        for (int l = -f; l <= f; l += 2) {
            ModeSpec s;
            s.basis = ModeBasis::LG;
            s.i1 = (f - std::abs(l)) / 2;
            s.i2 = l;
            s.k = k;
            s.w0 = w0;
            modes.push_back(s);
        }
    }
    const int n = 161;
    for (double z : {0.0, 0.4 * zR, 1.7 * zR}) {
        const double half = 7.0 * w0 * std::sqrt(1 + (z / zR) * (z / zR)), h = 2 * half / (n - 1);
        std::vector<std::vector<std::complex<double>>> vals(modes.size(), std::vector<std::complex<double>>(n * n));
        for (std::size_t a = 0; a < modes.size(); ++a)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    vals[a][i * n + j] = mode_amplitude(modes[a], -half + i * h, -half + j * h, z);
        // Only compare modes within one basis; HG and LG of one family span the same space.
        for (std::size_t a = 0; a < modes.size(); ++a)
            for (std::size_t b = a; b < modes.size(); ++b) {
                if (modes[a].basis != modes[b].basis) continue;
                std::complex<double> s = 0;
                for (int q = 0; q < n * n; ++q) s += std::conj(vals[a][q]) * vals[b][q];
                s *= h * h;
                CHECK(std::abs(s - (a == b ? 1.0 : 0.0)) < 1e-6);
            }
    }
}

TEST_CASE("family couplings") {
    for (int f = 0; f <= 5; ++f) {
        const auto c = family_couplings(f, 1 / std::sqrt(2.0));
        CHECK(c.r.back() == 1.0);
        CHECK(c.R_th == doctest::Approx(1.0));
        for (std::size_t j = 1; j < c.r.size(); ++j) CHECK(c.r[j - 1] < c.r[j]);
        const auto far = family_couplings(f, 50.0);
        CHECK(far.r.front() > 0.95);
    }
    for (int l : {2, 0}) {
        const double a = family_overlap(2, l, 1 / std::sqrt(2.0)), b = overlap_oracle(2, l, 1 / std::sqrt(2.0));
        CHECK(std::abs(a - b) < 1e-6 * std::abs(b));
    }
    const auto f2 = family_couplings(2, 1 / std::sqrt(2.0));
    CHECK(std::abs(f2.r[0] - overlap_oracle(2, 2, 1 / std::sqrt(2.0)) / overlap_oracle(2, 0, 1 / std::sqrt(2.0))) < 1e-6);
    CHECK_THROWS_AS(family_overlap(2, 1, 1.0), std::invalid_argument);
}

TEST_CASE("physical rates") {
    CHECK(cavity_decay_rate(0.01, 5e-3) == doctest::Approx(1.5e8).epsilon(1e-3));
    CHECK_THROWS_AS(cavity_decay_rate(1.0, 5e-3), std::invalid_argument);
    PhysicalParams p;
    p.chi2 = 2.5e-12;
    p.lambda0 = 1064e-9;
    p.geom = empty_cavity(5e-3, 5e-3, 5e-3);
    p.geom.nc = 2;
    p.geom.lc = 5e-4;
    p.geom.Ts = 0.01;
    p.geom.Tp = 0.1;
    p.P = 0;
    const double wc = 2 * phys::pi * phys::c / p.lambda0;
    const auto r = physical_rates(p, wc);
    CHECK(r.E == 0.0);
    CHECK(r.sigma == 0.0);
    CHECK(r.g == doctest::Approx(4e-6).epsilon(0.15));
    CHECK(r.kappa == doctest::Approx(10.0));
    p.P = 1.0;
    const auto s = physical_rates(p, wc);
    CHECK(s.E == doctest::Approx(std::sqrt(2 * s.gamma_p / (phys::hbar * wc))));
    CHECK(s.sigma == doctest::Approx(s.chi * s.E / (s.gamma_p * s.gamma_s)));
}

TEST_CASE("polarization ellipse") {
    auto e = ellipse_params(0, phys::pi / 4);
    CHECK(e.chi == doctest::Approx(0.0));
    CHECK(e.e == doctest::Approx(1.0));
    CHECK(std::abs(e.beta) == doctest::Approx(phys::pi / 4));
    e = ellipse_params(phys::pi / 4, phys::pi / 4);
    CHECK(std::abs(e.chi) == doctest::Approx(phys::pi / 4));
    CHECK(e.e == doctest::Approx(0.0).epsilon(1e-7));
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(0, 1);
    for (int i = 0; i < 200; ++i) {
        const auto q = ellipse_params(phys::pi * U(rng), 0.5 * phys::pi * U(rng));
        CHECK(q.a * q.a + q.b * q.b == doctest::Approx(1.0));
        CHECK(std::abs(q.beta) <= phys::pi / 2);
        CHECK(std::abs(q.chi) <= phys::pi / 4 + 1e-15);
        if (i % 10 == 0) CHECK(ellipse_params(0, 0.5 * phys::pi * U(rng)).e == doctest::Approx(1.0));
    }
    CHECK_THROWS_AS(ellipse_params(-0.1, 0), std::invalid_argument);
}
