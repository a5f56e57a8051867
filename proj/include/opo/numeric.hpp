#pragma once

#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace opo {

using cd = std::complex<double>;

// Raised when an iterative numerical routine cannot reach its tolerance.
class numeric_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Roots of sum_k c[k] x^k (ascending order). Companion matrix eigenvalues
// followed by one Newton polish per root.
std::vector<cd> poly_roots(const std::vector<double>& coeffs);

cd poly_eval(const std::vector<double>& coeffs, cd x);

// Accept a root as real when |Im| < tol * (1 + |Re|).
bool is_real_root(cd z, double tol = 1e-9);

// Adaptive Gauss-Kronrod quadrature on [a, b]; throws numeric_error when the
// error estimate stays above rel_tol * |I|.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-10);

// Composite Gauss-Legendre rule with a fixed number of panels; used as an
// independent cross-check of integrate().
double integrate_fixed(const std::function<double(double)>& f, double a, double b,
                       int panels);

// Central-difference Jacobian of a map R^n -> R^m.
Eigen::MatrixXd numeric_jacobian(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& x, double h = 1e-6);

Eigen::VectorXcd eigenvalues(const Eigen::MatrixXcd& m);

// Golden-section minimisation on a bracket.
double golden_min(const std::function<double(double)>& f, double a, double b,
                  double tol = 1e-12);

// Bisection for a sign change of f on [a, b].
double bisect(const std::function<double(double)>& f, double a, double b,
              double tol = 1e-13);

}  // namespace opo
