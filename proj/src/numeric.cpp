#include "opo/numeric.hpp"

#include <cmath>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace opo {

cd poly_eval(const std::vector<double>& c, cd x) {
    cd v = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * x + *it;
    return v;
}

static cd poly_deriv(const std::vector<double>& c, cd x) {
    cd v = 0.0;
    for (std::size_t k = c.size() - 1; k >= 1; --k) {
        v = v * x + double(k) * c[k];
        if (k == 1) break;
    }
    return v;
}

std::vector<cd> poly_roots(const std::vector<double>& coeffs) {
    std::vector<double> c = coeffs;
    while (!c.empty() && c.back() == 0.0) c.pop_back();
    if (c.size() < 2) return {};
    const int n = int(c.size()) - 1;
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) comp(i, n - 1) = -c[i] / c[n];
    Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
    std::vector<cd> roots;
    roots.reserve(n);
    for (int i = 0; i < n; ++i) {
        cd z = es.eigenvalues()(i);
        cd d = poly_deriv(c, z);
        if (std::abs(d) > 0.0) {
            cd z1 = z - poly_eval(c, z) / d;
            if (std::isfinite(z1.real()) && std::isfinite(z1.imag()) &&
                std::abs(poly_eval(c, z1)) <= std::abs(poly_eval(c, z)))
                z = z1;
        }
        roots.push_back(z);
    }
    return roots;
}

bool is_real_root(cd z, double tol) {
    return std::abs(z.imag()) < tol * (1.0 + std::abs(z.real()));
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol) {
    double err = 0.0;
    double val = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        f, a, b, 25, rel_tol, &err);
    if (!std::isfinite(val) || err > 10.0 * rel_tol * std::max(std::abs(val), 1e-300))
        throw numeric_error("integrate: quadrature did not converge");
    return val;
}

double integrate_fixed(const std::function<double(double)>& f, double a, double b,
                       int panels) {
    if (panels < 1) throw std::invalid_argument("integrate_fixed: panels < 1");
    const double h = (b - a) / panels;
    double s = 0.0;
    for (int i = 0; i < panels; ++i) {
        double lo = a + i * h;
        s += boost::math::quadrature::gauss<double, 20>::integrate(f, lo, lo + h);
    }
    return s;
}

Eigen::MatrixXd numeric_jacobian(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& x, double h) {
    Eigen::VectorXd f0 = f(x);
    Eigen::MatrixXd J(f0.size(), x.size());
    for (int j = 0; j < x.size(); ++j) {
        Eigen::VectorXd xp = x, xm = x;
        xp(j) += h;
        xm(j) -= h;
        J.col(j) = (f(xp) - f(xm)) / (2.0 * h);
    }
    return J;
}

Eigen::VectorXcd eigenvalues(const Eigen::MatrixXcd& m) {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m, false);
    return es.eigenvalues();
}

double golden_min(const std::function<double(double)>& f, double a, double b,
                  double tol) {
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - r * (b - a), d = a + r * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < 500 && std::abs(b - a) > tol * (1.0 + std::abs(a)); ++it) {
        if (fc < fd) {
            b = d; d = c; fd = fc;
            c = b - r * (b - a); fc = f(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + r * (b - a); fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

double bisect(const std::function<double(double)>& f, double a, double b, double tol) {
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa > 0) == (fb > 0)) throw numeric_error("bisect: no sign change on bracket");
    for (int it = 0; it < 300 && std::abs(b - a) > tol * (1.0 + std::abs(a)); ++it) {
        double m = 0.5 * (a + b);
        double fm = f(m);
        if (fm == 0.0) return m;
        if ((fm > 0) == (fa > 0)) { a = m; fa = fm; } else { b = m; fb = fm; }
    }
    return 0.5 * (a + b);
}

}  // namespace opo
