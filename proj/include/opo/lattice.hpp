#pragma once

#include <array>
#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace opo {

using cd = std::complex<double>;

class physicality_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class DetuningSign { Positive, Negative };  // nu = -i or nu = 1

struct LatticeSpec {
    int M = 3;                  // sites per axis
    double xi = 1.0;
    double Gamma0 = 1.0;
    double d0_over_X0 = 10.0;
    DetuningSign detuning = DetuningSign::Positive;
    // Keep only gamma = Re Gamma (drop the dephasing Lambda).
    bool dissipative_only = false;

    void validate() const;
    int sites() const { return M * M * M; }
    std::array<int, 3> site(int idx) const;
};

struct MarkovCoupling {
    cd Gamma;
    double gamma = 0.0;   // Re Gamma
    double Lambda = 0.0;  // Im Gamma
};

// Coupling at Euclidean lattice distance |j - l| (k_L = 0).
MarkovCoupling markov_couplings(const LatticeSpec& spec, double distance);
MarkovCoupling markov_couplings(const LatticeSpec& spec, const std::array<int, 3>& separation);

// Matrix G_{jl} = Gamma_{j-l} over all sites (respects dissipative_only).
Eigen::MatrixXcd coupling_matrix(const LatticeSpec& spec);

enum class LatticeInitial { Mott, Superfluid };

// Coherence matrix c_{jl} = <a_j^+ a_l> of a Mott state (N = M^3, one per
// site) or N atoms in the zero-momentum mode.
Eigen::MatrixXcd initial_coherences(const LatticeSpec& spec, LatticeInitial kind, double N);

struct LatticeSeries {
    std::vector<double> t, n_T, R;
};

// Exact boson coherence equations dc/dt = -(G^+ c + c G) on the given time
// grid (RK4 with internal sub-steps).
LatticeSeries evolve_bosons(const LatticeSpec& spec, const Eigen::MatrixXcd& c0,
                            const std::vector<double>& t_grid);
LatticeSeries evolve_bosons(const LatticeSpec& spec, LatticeInitial kind, double N,
                            const std::vector<double>& t_grid);

// Semiclassical hard-core equations from a Mott state. Throws
// physicality_error if some |s_j| exceeds 1 + 1e-6.
LatticeSeries evolve_hardcore(const LatticeSpec& spec, const std::vector<double>& t_grid);

// -4 M^3 Gamma0^2 [1 - (1/M^3) sum_j sum_{m != j} sinc^2(|j - m| / xi)]
double initial_rate_derivative(const LatticeSpec& spec);

// xi at which initial_rate_derivative changes sign (bisection in log xi).
double critical_xi(int M, double xi_lo = 1e-2, double xi_hi = 1e2);

// Closed-form n_T laws.
double n_total_independent(double N, double Gamma0, double t);
double n_total_superfluid(double N, int M, double Gamma0, double t);
double n_total_mott(double N, int M, double Gamma0, double t);

}  // namespace opo
