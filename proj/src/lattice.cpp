#include "opo/lattice.hpp"

#include <cmath>
#include <string>

namespace opo {

namespace {

double sinc(double x) { return x == 0 ? 1.0 : std::sin(x) / x; }

double distance(const LatticeSpec& s, int a, int b) {
    const auto p = s.site(a), q = s.site(b);
    const double dx = p[0] - q[0], dy = p[1] - q[1], dz = p[2] - q[2];
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

// Sub-step count keeping h * spectral radius <= 0.02.
long substeps(double dt, double rate) { return std::max(1L, long(std::ceil(dt * rate / 0.02))); }

double spectral_radius(const Eigen::MatrixXcd& G) {
    return G.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

void LatticeSpec::validate() const {
    if (M < 1) throw std::invalid_argument("lattice: M must be >= 1");
    if (!(xi > 0)) throw std::invalid_argument("lattice: xi must be > 0");
    if (!(Gamma0 > 0)) throw std::invalid_argument("lattice: Gamma0 must be > 0");
    if (!(d0_over_X0 > 0)) throw std::invalid_argument("lattice: d0/X0 must be > 0");
}

std::array<int, 3> LatticeSpec::site(int idx) const {
    return {idx / (M * M), (idx / M) % M, idx % M};
}

MarkovCoupling markov_couplings(const LatticeSpec& s, double d) {
    s.validate();
    if (!(d >= 0)) throw std::invalid_argument("markov_couplings: distance must be >= 0");
    MarkovCoupling c;
    if (d == 0) {
        c.Gamma = s.Gamma0;
    } else {
        const cd nu = s.detuning == DetuningSign::Positive ? cd(0, -1) : cd(1, 0);
        const cd br = 1.0 - std::erf(0.5 * s.d0_over_X0 * d) - std::exp(-nu * d / s.xi);
        c.Gamma = cd(0, 1) * (s.Gamma0 * s.xi / d) * br;
        // Re part in closed form avoids cancellation at small d / xi
        if (s.detuning == DetuningSign::Positive) c.Gamma.real(s.Gamma0 * sinc(d / s.xi));
    }
    if (s.dissipative_only) c.Gamma.imag(0.0);
    c.gamma = c.Gamma.real();
    c.Lambda = c.Gamma.imag();
    return c;
}

MarkovCoupling markov_couplings(const LatticeSpec& s, const std::array<int, 3>& r) {
    return markov_couplings(s, std::sqrt(double(r[0]) * r[0] + double(r[1]) * r[1] + double(r[2]) * r[2]));
}

Eigen::MatrixXcd coupling_matrix(const LatticeSpec& s) {
    s.validate();
    const int n = s.sites();
    Eigen::MatrixXcd G(n, n);
    for (int j = 0; j < n; ++j)
        for (int l = j; l < n; ++l) G(j, l) = G(l, j) = markov_couplings(s, distance(s, j, l)).Gamma;
    return G;
}

Eigen::MatrixXcd initial_coherences(const LatticeSpec& s, LatticeInitial kind, double N) {
    s.validate();
    const int n = s.sites();
    if (!(N >= 0)) throw std::invalid_argument("initial_coherences: N must be >= 0");
    if (kind == LatticeInitial::Mott) {
        if (std::abs(N - n) > 1e-12) throw std::invalid_argument("initial_coherences: Mott state has N = M^3");
        return Eigen::MatrixXcd::Identity(n, n);
    }
    // f_0 = M^{-3/2} sum_j a_j, N quanta: <a_j^+ a_l> = N / M^3
    return Eigen::MatrixXcd::Constant(n, n, N / n);
}

LatticeSeries evolve_bosons(const LatticeSpec& s, const Eigen::MatrixXcd& c0, const std::vector<double>& tg) {
    s.validate();
    const int n = s.sites();
    if (n > 216) throw std::invalid_argument("evolve_bosons: M^3 must be <= 216");
    if (c0.rows() != n || c0.cols() != n) throw std::invalid_argument("evolve_bosons: c0 shape mismatch");
    const Eigen::MatrixXcd G = coupling_matrix(s), Gh = G.adjoint();
    const double rho = 2 * spectral_radius(G);
    auto rhs = [&](const Eigen::MatrixXcd& c) -> Eigen::MatrixXcd { return -(Gh * c + c * G); };
    auto rate = [&](const Eigen::MatrixXcd& c) { return rhs(c).trace().real() * -1.0; };

    LatticeSeries out;
    Eigen::MatrixXcd c = c0;
    double t = tg.empty() ? 0.0 : tg.front();
    for (double target : tg) {
        if (target < t) throw std::invalid_argument("evolve_bosons: time grid must be non-decreasing");
        const long k = substeps(target - t, rho);
        const double h = (target - t) / k;
        for (long i = 0; i < k && h > 0; ++i) {
            const Eigen::MatrixXcd k1 = rhs(c);
            const Eigen::MatrixXcd k2 = rhs(c + 0.5 * h * k1);
            const Eigen::MatrixXcd k3 = rhs(c + 0.5 * h * k2);
            const Eigen::MatrixXcd k4 = rhs(c + h * k3);
            c += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
        }
        t = target;
        if ((c - c.adjoint()).cwiseAbs().maxCoeff() > 1e-8 * std::max(1.0, c.cwiseAbs().maxCoeff()))
            throw std::runtime_error("evolve_bosons: Hermiticity drift above 1e-8");
        c = 0.5 * (c + c.adjoint()).eval();
        out.t.push_back(t);
        out.n_T.push_back(c.trace().real());
        out.R.push_back(rate(c));
    }
    return out;
}

LatticeSeries evolve_bosons(const LatticeSpec& s, LatticeInitial kind, double N, const std::vector<double>& tg) {
    return evolve_bosons(s, initial_coherences(s, kind, N), tg);
}

LatticeSeries evolve_hardcore(const LatticeSpec& s, const std::vector<double>& tg) {
    s.validate();
    const int n = s.sites();
    if (n > 216) throw std::invalid_argument("evolve_hardcore: M^3 must be <= 216");
    const Eigen::MatrixXcd G = coupling_matrix(s), Gc = G.conjugate();
    const double G0 = s.Gamma0;
    const double rho = 4 * G0 + 2 * spectral_radius(G);

    struct St {
        Eigen::MatrixXcd c;
        Eigen::VectorXd sz;
    };
    // c_jl' = -4 G0 c_jl + sum_m G_{l-m} c_jm s_l + G*_{j-m} c_ml s_j
    // s_j'  = -2 sum_l (G_{j-l} c_jl + G*_{j-l} c_lj)
    auto rhs = [&](const St& x) {
        St d;
        const Eigen::MatrixXcd cG = x.c * G;    // (c G)_jl = sum_m c_jm G_ml
        const Eigen::MatrixXcd Gc_c = Gc * x.c; // sum_m G*_jm c_ml
        d.c = -4 * G0 * x.c + cG * x.sz.asDiagonal() + x.sz.asDiagonal() * Gc_c;
        d.sz.resize(n);
        for (int j = 0; j < n; ++j) {
            cd acc = 0.0;
            for (int l = 0; l < n; ++l) acc += G(j, l) * x.c(j, l) + Gc(j, l) * x.c(l, j);
            d.sz(j) = -2 * acc.real();
        }
        return d;
    };
    auto axpy = [](const St& a, double h, const St& b) {
        return St{a.c + h * b.c, a.sz + h * b.sz};
    };
    auto rate = [&](const St& x) { return -0.5 * rhs(x).sz.sum(); };

    St x{Eigen::MatrixXcd::Identity(n, n), Eigen::VectorXd::Ones(n)};
    LatticeSeries out;
    double t = tg.empty() ? 0.0 : tg.front();
    for (double target : tg) {
        if (target < t) throw std::invalid_argument("evolve_hardcore: time grid must be non-decreasing");
        const long k = substeps(target - t, rho);
        const double h = (target - t) / k;
        for (long i = 0; i < k && h > 0; ++i) {
            const St k1 = rhs(x);
            const St k2 = rhs(axpy(x, 0.5 * h, k1));
            const St k3 = rhs(axpy(x, 0.5 * h, k2));
            const St k4 = rhs(axpy(x, h, k3));
            x.c += h / 6 * (k1.c + 2 * k2.c + 2 * k3.c + k4.c);
            x.sz += h / 6 * (k1.sz + 2 * k2.sz + 2 * k3.sz + k4.sz);
        }
        t = target;
        if (x.sz.cwiseAbs().maxCoeff() > 1 + 1e-6)
            throw physicality_error("evolve_hardcore: |s_j| exceeds 1 at t = " + std::to_string(t));
        out.t.push_back(t);
        out.n_T.push_back(0.5 * (n + x.sz.sum()));
        out.R.push_back(rate(x));
    }
    return out;
}

double initial_rate_derivative(const LatticeSpec& s) {
    s.validate();
    const int n = s.sites();
    double sum = 0.0;
    for (int j = 0; j < n; ++j)
        for (int m = 0; m < n; ++m)
            if (m != j) {
                const double x = sinc(distance(s, j, m) / s.xi);
                sum += x * x;
            }
    return -4.0 * n * s.Gamma0 * s.Gamma0 * (1 - sum / n);
}

double critical_xi(int M, double lo, double hi) {
    LatticeSpec s;
    s.M = M;
    auto f = [&](double lx) {
        s.xi = std::exp(lx);
        return initial_rate_derivative(s);
    };
    double a = std::log(lo), b = std::log(hi);
    if (f(a) * f(b) > 0) throw std::domain_error("critical_xi: no sign change in the bracket");
    for (int it = 0; it < 200 && b - a > 1e-14; ++it) {
        const double m = 0.5 * (a + b);
        if (f(a) * f(m) <= 0) b = m;
        else a = m;
    }
    return std::exp(0.5 * (a + b));
}

double n_total_independent(double N, double G0, double t) { return N * std::exp(-2 * G0 * t); }

double n_total_superfluid(double N, int M, double G0, double t) {
    return N * std::exp(-2.0 * M * M * M * G0 * t);
}

double n_total_mott(double N, int M, double G0, double t) {
    const double n = double(M) * M * M;
    return (N - N / n) + N / n * std::exp(-2 * n * G0 * t);
}

}  // namespace opo
