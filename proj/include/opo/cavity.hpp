#pragma once

#include <complex>
#include <limits>
#include <vector>

#include <Eigen/Dense>

namespace opo {

namespace phys {
constexpr double c = 299792458.0;
constexpr double hbar = 1.054571817e-34;
constexpr double eps0 = 8.8541878128e-12;
constexpr double pi = 3.14159265358979323846;
}  // namespace phys

// Two-mirror resonator with an optional crystal slab. Use
// std::numeric_limits<double>::infinity() for a plane mirror.
struct CavityGeometry {
    double R1 = std::numeric_limits<double>::infinity();
    double R2 = std::numeric_limits<double>::infinity();
    double L = 0.0;
    double lc = 0.0;
    double nc = 1.0;
    double Ts = 0.01;
    double Tp = 0.01;

    double L_eff() const { return L - (1.0 - 1.0 / nc) * lc; }
    double L_opt() const { return L + (nc - 1.0) * lc; }
    // Throws std::invalid_argument when an invariant is violated.
    void validate() const;
};

struct GeometryReport {
    Eigen::Matrix2d abcd;
    double g1 = 0, g2 = 0;
    bool stable = false;
    double gouy = 0;  // round-trip Gouy phase zeta
    double fsr = 0;   // rad/s
};

GeometryReport analyze_geometry(const CavityGeometry& geom);

// omega_qf = fsr * (q + (1 + f) zeta / 2pi). Accepts 0 <= g1 g2 <= 1 so the
// planar and concentric limits can be evaluated.
double resonance_frequency(const CavityGeometry& geom, int q, int f);

struct GaussianModeGeometry {
    double lambda = 0, k = 0;
    double w0 = 0;
    double z1_eff = 0;  // waist distance from mirror 1 (effective length units)
    double zR = 0;

    double w(double z) const;
    double R(double z) const;  // infinite at the waist
    double psi(double z) const;
    std::complex<double> q(double z) const;
};

GaussianModeGeometry gaussian_mode_geometry(const CavityGeometry& geom, double lambda);

enum class ModeBasis { HG, LG, HLG };
enum class HlgParity { Cos, Sin };

// HG: (i1, i2) = (m, n); LG: (p, l); HLG: (p, l) with parity.
struct ModeSpec {
    ModeBasis basis = ModeBasis::HG;
    int i1 = 0, i2 = 0;
    HlgParity parity = HlgParity::Cos;
    double k = 0;
    double w0 = 0;
    double waist_position = 0;

    int family() const;
    void validate() const;
};

std::complex<double> mode_amplitude(const ModeSpec& mode, double x, double y, double z);

struct FamilyCouplings {
    int f = 0;
    std::vector<int> l;     // f, f-2, ..., l0
    std::vector<double> I;  // overlap integrals I_l(rho)
    std::vector<double> r;  // I_l / I_l0
    double R_th = 1.0;
};

double family_overlap(int f, int l, double rho);
FamilyCouplings family_couplings(int f, double rho);

struct PhysicalParams {
    double chi2 = 0;     // m/V
    double P = 0;        // pump power, W
    double lambda0 = 0;  // signal wavelength, m
    CavityGeometry geom;
};

struct PhysicalRates {
    double gamma_s = 0, gamma_p = 0;  // 1/s
    double kappa = 0;                 // gamma_p / gamma_s
    double chi = 0;                   // 1/s
    double E = 0;                     // pump injection, 1/s
    double g = 0;
    double sigma = 0;
};

// gamma = c T / (4 L_opt).
double cavity_decay_rate(double T, double L_opt);

PhysicalRates physical_rates(const PhysicalParams& p, double omega_c);

// Literal evaluation of the closed-form expression for g quoted for a
// symmetric confocal cavity; kept for comparison with physical_rates().
double confocal_g_closed_form(const PhysicalParams& p);

struct EllipseParams {
    double beta = 0, chi = 0, e = 0, a = 0, b = 0;
};

EllipseParams ellipse_params(double theta, double phi);

}  // namespace opo
