#pragma once

#include <complex>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "opo/models.hpp"

namespace opo {

enum class BranchLabel { Off, On, OneMode, TwoMode, Symmetric, Asymmetric };
enum class Bifurcation { None, TurningPoint, Pitchfork, Hopf };

std::string to_string(BranchLabel b);
std::string to_string(Bifurcation b);

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct SteadyBranch {
    BranchLabel label = BranchLabel::Off;
    Eigen::VectorXcd state;  // classical amplitudes (unstarred components)
    double domain_lo = 0.0;  // existence interval in the model's natural parameter
    double domain_hi = std::numeric_limits<double>::infinity();
    double free_phase = kNaN;  // orientation theta for continuous families
    std::string note;
};

struct StabilityReport {
    Eigen::MatrixXcd matrix;
    Eigen::VectorXcd eigenvalues;
    Eigen::MatrixXcd eigenvectors;
    bool stable = false;
    std::vector<int> zero_modes;  // symmetry (Goldstone) modes excluded from the verdict
    Bifurcation bifurcation = Bifurcation::None;
    double max_re = 0.0;  // largest real part excluding zero modes
};

// Closed-form branches. InjectedTtmDopo and ActiveLockClassical route
// through injected_one_mode / injected_two_mode / active_lock.
std::vector<SteadyBranch> analytic_steady(const ModelConfig& cfg, double theta = 0.0);

// Doubled-space generators of continuous symmetries at a classical state.
std::vector<Eigen::VectorXcd> symmetry_generators(const ModelConfig& cfg,
                                                  const Eigen::VectorXcd& classical);

// Throws std::domain_error when the state is not a fixed point (residual > 1e-8).
StabilityReport stability_matrix(const ModelConfig& cfg, const Eigen::VectorXcd& classical);

struct InjectedOneMode {
    std::vector<SteadyBranch> branches;  // one per admissible quintic root
    std::vector<double> Ix;              // intensities of the returned branches
    std::vector<bool> stable;
    double I_TP1 = kNaN;                 // I_x at the lower turning point (sigma > 1)
    double Ix_TP2 = kNaN, Ii_TP2 = kNaN; // local maximum of I_i(I_x) on (0, I_TP1)
    double Ix_PB = kNaN, Ii_PB = kNaN;   // pitchfork (two-mode solution born)
};

// I_i(I_x) on the one-mode branch.
double injected_intensity(double sigma, double phi_i, double Ix);
// Quintic coefficients in X = 1 + I_x / 2 (ascending).
std::vector<double> injected_quintic(double sigma, double phi_i, double Ii);
// Classical one-mode state (b0, bx, by = 0) at intensity I_x.
Eigen::VectorXcd injected_one_mode_state(double sigma, double phi_i, double Ix, double Ii);

InjectedOneMode injected_one_mode(double sigma, double phi_i, double Ii, double kappa = 1.0);

// Throws std::domain_error when I_y < 0 (below the pitchfork).
SteadyBranch injected_two_mode(double sigma, double phi_i, double Ii, int sign = +1);

struct ActiveLockResult {
    std::vector<SteadyBranch> branches;  // symmetric solutions, one per positive root
    std::vector<double> I;
    std::vector<bool> stable;
    double I_minus = kNaN, I_plus = kNaN;
    double I_PB = kNaN;
    double I_HB = kNaN, omega_HB = kNaN;
};

// Cubic coefficients (ascending) of I^3 + 2(1-s)I^2 + ((1-s)^2 + D^2) I - inj.
std::vector<double> active_lock_cubic(double sigma, double delta, double inj);
double active_lock_injection(double sigma, double delta, double I);
Eigen::VectorXcd active_lock_state(double sigma, double delta, double I);
ActiveLockResult active_lock(double sigma, double delta, double inj);

struct ScanPoint {
    double param = 0;
    double control = 0;  // physical control parameter at this point
    Eigen::VectorXcd state;
    double max_re = 0;
    bool stable = false;
    std::string branch;
};

struct ScanEvent {
    Bifurcation type = Bifurcation::None;
    double param = 0;
    double control = 0;
    std::string branch;
};

struct ScanTable {
    std::string parameter;
    std::vector<ScanPoint> points;
    std::vector<ScanEvent> events;
    std::vector<std::pair<double, double>> gaps;
};

// Supported parameters:
//   "sigma"   all kinds with closed-form branches (control = sigma)
//   "Ix"      InjectedTtmDopo one-mode branch parametrised by I_x (control = I_i)
//   "I"       ActiveLockClassical symmetric branch parametrised by I (control = script-I)
ScanTable bifurcation_scan(const ModelConfig& cfg, const std::string& parameter, double lo,
                           double hi, int n);

}  // namespace opo
