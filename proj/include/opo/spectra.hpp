#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "opo/models.hpp"

namespace opo {

// Linear fluctuation equations d(db) = L db dt + B dW about a stable fixed
// point, with N = B B^T (real unit noises, strength g folded in).
struct LinearizedSystem {
    Eigen::MatrixXcd L;
    Eigen::MatrixXcd N;
    double g = 1.0;
    // Zero modes split off from the spectrum: right vectors R (columns) and
    // left vectors Lz with Lz^T R = 1. Empty when nothing is projected.
    Eigen::MatrixXcd zero_right;
    Eigen::MatrixXcd zero_left;
};

struct SpectrumValue {
    double V = 0.0;
    bool divergent = false;  // V is +inf because (i Omega - L) is singular
};

// Builds the system at a classical fixed point. With adiabatic = true the
// pump (doubled indices 0, 1) is eliminated by a Schur complement; with
// project_zero_modes = true the symmetry (Goldstone) modes are split off.
LinearizedSystem linearize(const ModelConfig& cfg, const Eigen::VectorXcd& classical,
                           bool adiabatic = false, bool project_zero_modes = true,
                           double g = 1.0);

// Quadrature row for the combination b_q = sum_j a_j b_j:
// u[2j] = e^{-i phi} a_j, u[2j+1] = e^{i phi} conj(a_j).
Eigen::VectorXcd quadrature_row(int dim, const std::vector<std::pair<int, cd>>& combo, double phi);

// F = (i W - L)^-1 N (-i W - L^T)^-1 and V = 1 + (2/g^2) Re[u^T F u].
// Throws std::domain_error when the (projected) system is not strictly stable.
SpectrumValue linear_spectrum(const LinearizedSystem& sys, const Eigen::VectorXcd& u, double omega);

enum class SpectrumCase {
    DopoBelow,
    DopoAbove,
    OpoBelowJoint,
    TwinBeams,
    TwoChannel,
    TtmDopo,
    InjectedDark,
    Family
};

std::string to_string(SpectrumCase c);
SpectrumCase spectrum_case_from_string(const std::string& s);

// Quadrature labels accepted per case:
//   DopoBelow, DopoAbove, TwoChannel (mode 2), InjectedDark (y mode): X, Y
//   OpoBelowJoint: X-, Y+ (squeezed), X+, Y- (anti-squeezed)
//   TwinBeams: X-
//   TtmDopo: Xb, Yb, Xd, Yd
//   Family: X, Y of the cos or sin combination of mode l
std::vector<std::string> case_quadratures(SpectrumCase c);

struct CaseParams {
    double sigma = 0.5;
    double kappa = 1.0;  // used by the engine set-up only
    double r = 0.5;      // TwoChannel chi2/chi1
    // InjectedDark: the one-mode solution of (sigma, phi_i, Ii) fixes I0 = |beta_0|^2
    double phi_i = 0.0;
    double Ii = 0.0;
    // Family: f, r_l (ordered f, f-2, ..., l0 with r_l0 = 1), l and the HLG parity
    int f = 2;
    std::vector<double> r_l;
    int l = 2;
    bool sin_parity = false;
};

// Closed-form V_out. Throws std::domain_error out of each formula's domain.
double closed_form_spectrum(SpectrumCase c, const CaseParams& p, const std::string& quad, double omega);

// Pump intensity |beta_0|^2 of the stable one-mode injected solution with the
// largest I_x.
double injected_pump_intensity(double sigma, double phi_i, double Ii);

// Engine set-up reproducing a closed-form case.
struct CaseSetup {
    LinearizedSystem sys;
    Eigen::VectorXcd u;
    std::string method;  // "engine-full" or "engine-adiabatic"
};
CaseSetup case_setup(SpectrumCase c, const CaseParams& p, const std::string& quad);

// Fixed local-oscillator detection of the 2tmDOPO TEM01 mode (small-d
// expansion as printed). Throws std::domain_error for sigma <= 1, T <= 0 or
// Omega = 0 with a non-zero cos(phi) weight (the S0 term diverges there).
double fixed_lo_spectrum(double sigma, double d, double phi, double omega, double T);

struct OptimalDetection {
    double T_opt = 0.0;
    double V_opt = 0.0;         // 1 / T_opt
    double V_at_T_opt = 0.0;    // fixed_lo_spectrum(phi = pi/2, Omega = 0, T_opt)
};
OptimalDetection optimal_detection_time(double sigma, double d);

struct OrientationDiffusion {
    double g = 0.0, sigma = 0.0;
    double d = 0.0;  // g^2 / 4
    double D = 0.0;  // d / (sigma - 1)
};
OrientationDiffusion orientation_diffusion(double g, double sigma);

struct OrientationStats {
    double V_theta = 0.0;
    double d = 0.0, D = 0.0;
    double sin_corr = 0.0;  // <sin theta(t1) sin theta(t2)>
    double cos_corr = 0.0;  // <cos theta(t1) cos theta(t2)>
};
OrientationStats orientation_statistics(double g, double sigma, double tau, double tau1, double tau2);

}  // namespace opo
