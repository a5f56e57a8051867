#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace opo {

using cd = std::complex<double>;

class leakage_error : public std::runtime_error {
public:
    leakage_error(const std::string& msg, double top) : std::runtime_error(msg), top_population(top) {}
    double top_population;
};

class step_size_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Density matrix on a tensor product of truncated Fock spaces (mode 0 is the
// most significant factor).
struct TruncatedDensityMatrix {
    std::vector<int> dims;
    Eigen::MatrixXcd rho;

    int total_dim() const;
    void validate(double herm_tol = 1e-10, double trace_tol = 1e-8, double eig_tol = 1e-8) const;
    double min_eigenvalue() const;
};

// Product of Fock states |n_0, n_1, ...>.
TruncatedDensityMatrix fock_state(const std::vector<int>& dims, const std::vector<int>& n);
// Single-mode coherent state |alpha> truncated and renormalised.
TruncatedDensityMatrix coherent_state(int dim, cd alpha);

// Annihilation operator of one mode embedded in the product space.
Eigen::MatrixXcd annihilation(const std::vector<int>& dims, int mode);

// drho/dt = [X, rho] + sum_j gamma_j (2 c_j rho c_j^+ - c_j^+ c_j rho - rho c_j^+ c_j)
// where X is anti-Hermitian (X = -iH).
struct LindbladSpec {
    std::vector<int> dims;
    Eigen::MatrixXcd X;
    std::vector<Eigen::MatrixXcd> jumps;
    std::vector<double> rates;

    Eigen::MatrixXcd apply(const Eigen::MatrixXcd& rho) const;
    // Max absolute row sum of the effective non-Hermitian generator.
    double max_rate() const;
    double min_rate() const;
};

enum class FockModel { MasterExample, Dopo };

struct FockConfig {
    FockModel model = FockModel::MasterExample;
    // MasterExample: X = -i omega a+a + kappa (a+^2 - a^2) + E (a+ - a), loss gamma
    double gamma = 1.0, kappa = 0.0, E = 0.0, omega = 0.0;
    // Dopo: X = (chi/2)(a_p a_s+^2 - a_p+ a_s^2) + E_p (a_p+ - a_p), gamma_s = 1,
    // gamma_p = kappa, chi = g sqrt(kappa), E_p = sigma kappa / chi
    double g = 0.5, sigma = 0.0;
    std::vector<int> truncation{20};  // n_max per mode (Dopo: {pump, signal})
};

LindbladSpec build_lindblad(const FockConfig& cfg);

// Fixed-step RK4 with Hermitian re-symmetrisation after every step. Throws
// std::invalid_argument when dt * max_rate >= 0.1 and step_size_error when the
// trace drifts by more than 1e-6.
TruncatedDensityMatrix evolve(const LindbladSpec& spec, const TruncatedDensityMatrix& rho0,
                              double t_end, double dt);

// Long-time integration: at least 10 / min_rate, continued until
// ||drho/dt||_max < tol. dt <= 0 picks 0.09 / max_rate. Throws leakage_error when the top Fock level of any
// mode holds more than leak_tol.
TruncatedDensityMatrix steady_state(const LindbladSpec& spec, double dt = 0.0, double tol = 1e-11,
                                    double t_max = 1e4, double leak_tol = 1e-8);

// Population of the highest retained Fock level of a mode.
double top_population(const TruncatedDensityMatrix& rho, int mode);

// Tr[rho a+^m a^n] for one mode.
cd normal_ordered_moment(const TruncatedDensityMatrix& rho, int mode, int m, int n);

}  // namespace opo
