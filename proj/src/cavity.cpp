#include "opo/cavity.hpp"

#include <cmath>
#include <stdexcept>

#include <boost/math/special_functions/hermite.hpp>
#include <boost/math/special_functions/laguerre.hpp>

#include "opo/numeric.hpp"

namespace opo {

using std::sqrt;

void CavityGeometry::validate() const {
    if (!(L > 0)) throw std::invalid_argument("cavity: L must be positive");
    if (!(lc >= 0 && lc <= L)) throw std::invalid_argument("cavity: l_c must lie in [0, L]");
    if (!(nc >= 1)) throw std::invalid_argument("cavity: n_c must be >= 1");
    if (!(Ts >= 0 && Ts <= 1 && Tp >= 0 && Tp <= 1))
        throw std::invalid_argument("cavity: transmittivities must lie in [0, 1]");
    if (!(L_eff() > 0) || !(L_opt() > 0))
        throw std::invalid_argument("cavity: non-positive effective or optical length");
    if (R1 == 0 || R2 == 0) throw std::invalid_argument("cavity: zero mirror radius");
}

static double gouy_phase(double g1, double g2) {
    double p = g1 * g2;
    if (p < 0 || p > 1) return std::nan("");
    double s = g2 < 0 ? -1.0 : 1.0;
    return 2.0 * std::acos(s * sqrt(p));
}

GeometryReport analyze_geometry(const CavityGeometry& geom) {
    geom.validate();
    const double Le = geom.L_eff();
    GeometryReport r;
    r.g1 = 1.0 - Le / geom.R1;
    r.g2 = 1.0 - Le / geom.R2;
    const double g1 = r.g1, g2 = r.g2;
    r.abcd << 2 * g2 - 1, 2 * g2 * Le,
              2 * (2 * g1 * g2 - g2 - g1) / Le, 4 * g1 * g2 - 2 * g2 - 1;
    r.stable = g1 * g2 > 0 && g1 * g2 < 1;
    r.gouy = gouy_phase(g1, g2);
    r.fsr = phys::pi * phys::c / geom.L_opt();
    return r;
}

double resonance_frequency(const CavityGeometry& geom, int q, int f) {
    if (q < 1 || f < 0) throw std::invalid_argument("resonance_frequency: need q >= 1, f >= 0");
    GeometryReport r = analyze_geometry(geom);
    double p = r.g1 * r.g2;
    if (p < 0 || p > 1) throw std::domain_error("resonance_frequency: unstable cavity");
    return r.fsr * (q + (1.0 + f) * r.gouy / (2 * phys::pi));
}

double GaussianModeGeometry::w(double z) const { return w0 * sqrt(1 + z * z / (zR * zR)); }

double GaussianModeGeometry::R(double z) const {
    if (z == 0) return std::numeric_limits<double>::infinity();
    return z * (1 + zR * zR / (z * z));
}

double GaussianModeGeometry::psi(double z) const { return -std::atan(z / zR); }

std::complex<double> GaussianModeGeometry::q(double z) const { return {z, -zR}; }

GaussianModeGeometry gaussian_mode_geometry(const CavityGeometry& geom, double lambda) {
    if (!(lambda > 0)) throw std::invalid_argument("gaussian_mode_geometry: lambda must be positive");
    GeometryReport r = analyze_geometry(geom);
    const double g1 = r.g1, g2 = r.g2, Le = geom.L_eff();
    GaussianModeGeometry m;
    m.lambda = lambda;
    m.k = 2 * phys::pi / lambda;
    if (std::abs(g1 - g2) < 1e-14) {
        const double g = g1;
        if (!(g > -1 && g < 1)) throw std::domain_error("gaussian_mode_geometry: unstable cavity");
        m.w0 = sqrt(lambda * Le / phys::pi) * std::pow((1 + g) / (4 * (1 - g)), 0.25);
        m.z1_eff = Le / 2;
    } else {
        const double p = g1 * g2;
        if (!(p > 0 && p < 1)) throw std::domain_error("gaussian_mode_geometry: g1 g2 outside (0, 1)");
        const double den = g1 + g2 - 2 * p;
        m.w0 = sqrt(lambda * Le / phys::pi) * std::pow(p * (1 - p) / (den * den), 0.25);
        m.z1_eff = Le * (1 - g1) * std::abs(g2) / std::abs(den);
    }
    m.zR = m.k * m.w0 * m.w0 / 2;
    return m;
}

int ModeSpec::family() const {
    return basis == ModeBasis::HG ? i1 + i2 : 2 * i1 + std::abs(i2);
}

void ModeSpec::validate() const {
    if (!(k > 0) || !(w0 > 0)) throw std::invalid_argument("mode: k and w0 must be positive");
    switch (basis) {
    case ModeBasis::HG:
        if (i1 < 0 || i2 < 0) throw std::invalid_argument("mode: HG indices must be >= 0");
        break;
    case ModeBasis::LG:
        if (i1 < 0) throw std::invalid_argument("mode: LG p must be >= 0");
        break;
    case ModeBasis::HLG:
        if (i1 < 0 || i2 < 0) throw std::invalid_argument("mode: HLG p, l must be >= 0");
        break;
    }
}

static std::complex<double> lg_amplitude(int p, int l, double r, double phi, double w,
                                         double gauss_env_phase, double psi) {
    const int al = std::abs(l);
    const double norm = sqrt(2.0 / phys::pi *
                             std::exp(std::lgamma(p + 1.0) - std::lgamma(p + al + 1.0))) / w;
    const double s = sqrt(2.0) * r / w;
    const double radial = norm * std::pow(s, al) *
                          boost::math::laguerre(unsigned(p), unsigned(al), s * s);
    return radial * std::polar(1.0, (1.0 + 2 * p + al) * psi + l * phi) *
           gauss_env_phase;
}

std::complex<double> mode_amplitude(const ModeSpec& mode, double x, double y, double z) {
    mode.validate();
    const double zR = mode.k * mode.w0 * mode.w0 / 2;
    const double zz = z - mode.waist_position;
    const double w = mode.w0 * sqrt(1 + zz * zz / (zR * zR));
    const double psi = -std::atan(zz / zR);
    const double r2 = x * x + y * y;
    const std::complex<double> q(zz, -zR);
    const std::complex<double> env =
        std::exp(std::complex<double>(0, 1) * mode.k * r2 / (2.0 * q));

    switch (mode.basis) {
    case ModeBasis::HG: {
        const int m = mode.i1, n = mode.i2;
        const double lognorm = 0.5 * ((m + n - 1) * std::log(2.0) + std::log(phys::pi) +
                                      std::lgamma(m + 1.0) + std::lgamma(n + 1.0));
        const double amp = std::exp(-lognorm) / w *
                           boost::math::hermite(unsigned(m), sqrt(2.0) * x / w) *
                           boost::math::hermite(unsigned(n), sqrt(2.0) * y / w);
        return amp * env * std::polar(1.0, (1.0 + m + n) * psi);
    }
    case ModeBasis::LG:
        return lg_amplitude(mode.i1, mode.i2, sqrt(r2), std::atan2(y, x), w, 1.0, psi) * env;
    case ModeBasis::HLG: {
        const int p = mode.i1, l = mode.i2;
        const double r = sqrt(r2), phi = std::atan2(y, x);
        if (l == 0)
            return mode.parity == HlgParity::Cos ? lg_amplitude(p, 0, r, phi, w, 1.0, psi) * env
                                                 : std::complex<double>(0.0);
        auto a = lg_amplitude(p, l, r, phi, w, 1.0, psi);
        auto b = lg_amplitude(p, -l, r, phi, w, 1.0, psi);
        if (mode.parity == HlgParity::Cos) return (a + b) / sqrt(2.0) * env;
        return (a - b) / (sqrt(2.0) * std::complex<double>(0, 1)) * env;
    }
    }
    return 0.0;
}

double family_overlap(int f, int l, double rho) {
    if (f < 0 || l < 0 || l > f || (f - l) % 2 != 0)
        throw std::invalid_argument("family_overlap: need 0 <= l <= f with f - l even");
    if (!(rho > 0)) throw std::invalid_argument("family_overlap: rho must be positive");
    const int p = (f - l) / 2;
    const double a = 1.0 + 1.0 / (2 * rho * rho);
    const double pref = std::exp(std::lgamma(p + 1.0) - std::lgamma((f + l) / 2 + 1.0)) / rho;
    auto integrand = [&](double u) {
        const double L = boost::math::laguerre(unsigned(p), unsigned(l), u * u);
        return std::exp(-a * u * u) * std::pow(u, 2 * l + 1) * L * L;
    };
    // Gaussian envelope makes the tail beyond u = 12 negligible for a >= 1.
    const double upper = 12.0 / std::min(1.0, sqrt(a));
    return pref * integrate(integrand, 0.0, upper, 1e-11);
}

FamilyCouplings family_couplings(int f, double rho) {
    if (f < 0) throw std::invalid_argument("family_couplings: f must be >= 0");
    FamilyCouplings out;
    out.f = f;
    for (int l = f; l >= 0; l -= 2) out.l.push_back(l);
    for (int l : out.l) out.I.push_back(family_overlap(f, l, rho));
    const double I0 = out.I.back();
    for (double I : out.I) out.r.push_back(I / I0);
    const double I0ref = family_overlap(f, out.l.back(), 1.0 / sqrt(2.0));
    out.R_th = (I0ref * I0ref) / (I0 * I0);
    return out;
}

double cavity_decay_rate(double T, double L_opt) {
    if (!(T > 0 && T < 1)) throw std::invalid_argument("cavity_decay_rate: T must lie in (0, 1)");
    if (!(L_opt > 0)) throw std::invalid_argument("cavity_decay_rate: L_opt must be positive");
    return phys::c * T / (4 * L_opt);
}

PhysicalRates physical_rates(const PhysicalParams& p, double omega_c) {
    p.geom.validate();
    if (!(p.chi2 > 0) || !(p.lambda0 > 0) || !(p.P >= 0) || !(omega_c > 0))
        throw std::invalid_argument("physical_rates: parameters must be positive");
    PhysicalRates out;
    const double Lopt = p.geom.L_opt(), nc = p.geom.nc;
    out.gamma_s = cavity_decay_rate(p.geom.Ts, Lopt);
    out.gamma_p = cavity_decay_rate(p.geom.Tp, Lopt);
    out.kappa = out.gamma_p / out.gamma_s;

    double ws;
    try {
        ws = gaussian_mode_geometry(p.geom, p.lambda0).w0;
    } catch (const std::domain_error&) {
        ws = sqrt(p.lambda0 * p.geom.L_eff() / (2 * phys::pi));
    }
    const double w0 = 2 * phys::pi * phys::c / p.lambda0;
    out.chi = 3 * (p.geom.lc / ws) * p.chi2 *
              sqrt(phys::hbar * w0 * w0 * w0 /
                   (8 * std::pow(phys::pi, 3) * phys::eps0 * std::pow(nc * Lopt, 3)));
    out.g = out.chi / sqrt(out.gamma_p * out.gamma_s);
    out.E = sqrt(2 * out.gamma_p * p.P / (phys::hbar * omega_c));
    out.sigma = out.chi * out.E / (out.gamma_p * out.gamma_s);
    return out;
}

double confocal_g_closed_form(const PhysicalParams& p) {
    const auto& g = p.geom;
    return 12 * p.chi2 * g.lc / (p.lambda0 * p.lambda0) *
           sqrt(2 * phys::pi * phys::hbar * phys::c /
                (g.L_eff() * g.L_opt() * g.Tp * g.Ts * phys::eps0 * g.nc));
}

EllipseParams ellipse_params(double theta, double phi) {
    if (theta < 0 || theta > phys::pi || phi < 0 || phi > phys::pi / 2)
        throw std::invalid_argument("ellipse_params: theta in [0, pi], phi in [0, pi/2]");
    EllipseParams e;
    e.beta = 0.5 * std::atan2(std::sin(2 * phi) * std::cos(2 * theta), std::cos(2 * phi));
    e.chi = 0.5 * std::asin(std::clamp(std::sin(2 * phi) * std::sin(2 * theta), -1.0, 1.0));
    const double t2 = std::pow(std::tan(e.chi), 2);
    e.a = sqrt(1 / (1 + t2));
    e.b = sqrt(t2 / (1 + t2));
    e.e = sqrt(std::max(0.0, 1 - t2));
    return e;
}

}  // namespace opo
