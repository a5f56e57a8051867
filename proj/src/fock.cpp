#include "opo/fock.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Sparse>

namespace opo {

int TruncatedDensityMatrix::total_dim() const {
    return std::accumulate(dims.begin(), dims.end(), 1, std::multiplies<int>());
}

double TruncatedDensityMatrix::min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

void TruncatedDensityMatrix::validate(double herm_tol, double trace_tol, double eig_tol) const {
    const int n = total_dim();
    if (n > 4096) throw std::invalid_argument("density matrix: total dimension exceeds 4096");
    if (rho.rows() != n || rho.cols() != n) throw std::invalid_argument("density matrix: shape mismatch");
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > herm_tol)
        throw std::invalid_argument("density matrix: not Hermitian");
    if (std::abs(rho.trace() - 1.0) > trace_tol) throw std::invalid_argument("density matrix: trace != 1");
    if (min_eigenvalue() < -eig_tol) throw std::invalid_argument("density matrix: negative eigenvalue");
}

static int product(const std::vector<int>& dims) {
    int n = 1;
    for (int d : dims) {
        if (d < 1) throw std::invalid_argument("fock: mode dimensions must be >= 1");
        n *= d;
    }
    return n;
}

TruncatedDensityMatrix fock_state(const std::vector<int>& dims, const std::vector<int>& n) {
    if (n.size() != dims.size()) throw std::invalid_argument("fock_state: one occupation per mode");
    int idx = 0;
    for (std::size_t j = 0; j < dims.size(); ++j) {
        if (n[j] < 0 || n[j] >= dims[j]) throw std::invalid_argument("fock_state: occupation outside truncation");
        idx = idx * dims[j] + n[j];
    }
    TruncatedDensityMatrix r;
    r.dims = dims;
    const int N = product(dims);
    r.rho = Eigen::MatrixXcd::Zero(N, N);
    r.rho(idx, idx) = 1.0;
    return r;
}

TruncatedDensityMatrix coherent_state(int dim, cd alpha) {
    Eigen::VectorXcd v(dim);
    cd c = 1.0;
    for (int n = 0; n < dim; ++n) {
        if (n > 0) c *= alpha / std::sqrt(double(n));
        v(n) = c;
    }
    v.normalize();
    TruncatedDensityMatrix r;
    r.dims = {dim};
    r.rho = v * v.adjoint();
    return r;
}

Eigen::MatrixXcd annihilation(const std::vector<int>& dims, int mode) {
    if (mode < 0 || mode >= int(dims.size())) throw std::out_of_range("annihilation: bad mode");
    const int N = product(dims);
    int inner = 1;
    for (std::size_t j = mode + 1; j < dims.size(); ++j) inner *= dims[j];
    const int d = dims[mode];
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(N, N);
    for (int i = 0; i < N; ++i) {
        const int n = (i / inner) % d;
        if (n > 0) a(i - inner, i) = std::sqrt(double(n));
    }
    return a;
}

namespace {

// Sparse copy of the generator pieces, built once per integration.
struct Generator {
    Eigen::SparseMatrix<cd> K, Kadj;
    std::vector<Eigen::SparseMatrix<cd>> c, cadj;
    std::vector<double> rates;

    explicit Generator(const LindbladSpec& s) : rates(s.rates) {
        if (s.jumps.size() != s.rates.size()) throw std::invalid_argument("lindblad: one rate per jump operator");
        for (double r : s.rates)
            if (!(r >= 0)) throw std::invalid_argument("lindblad: rates must be >= 0");
        Eigen::MatrixXcd k = s.X;
        for (std::size_t j = 0; j < s.jumps.size(); ++j) k -= s.rates[j] * s.jumps[j].adjoint() * s.jumps[j];
        K = k.sparseView(0.0, 0.0);
        Kadj = K.adjoint();
        for (const auto& j : s.jumps) {
            c.push_back(j.sparseView(0.0, 0.0));
            cadj.push_back(c.back().adjoint());
        }
    }

    Eigen::MatrixXcd operator()(const Eigen::MatrixXcd& rho) const {
        Eigen::MatrixXcd out = K * rho;
        out += (Kadj.transpose() * rho.transpose()).transpose();
        for (std::size_t j = 0; j < c.size(); ++j) {
            if (rates[j] == 0) continue;
            const Eigen::MatrixXcd cr = c[j] * rho;
            out += 2 * rates[j] * (cadj[j].transpose() * cr.transpose()).transpose();
        }
        return out;
    }
};

}  // namespace

Eigen::MatrixXcd LindbladSpec::apply(const Eigen::MatrixXcd& rho) const {
    return Generator(*this)(rho);
}

double LindbladSpec::max_rate() const {
    Eigen::MatrixXcd K = X;
    for (std::size_t j = 0; j < jumps.size(); ++j) K -= rates[j] * jumps[j].adjoint() * jumps[j];
    return K.cwiseAbs().rowwise().sum().maxCoeff();
}

double LindbladSpec::min_rate() const {
    double m = std::numeric_limits<double>::infinity();
    for (double r : rates)
        if (r > 0) m = std::min(m, r);
    return m;
}

LindbladSpec build_lindblad(const FockConfig& cfg) {
    LindbladSpec s;
    const cd I(0, 1);
    if (cfg.model == FockModel::MasterExample) {
        if (cfg.truncation.size() != 1) throw std::invalid_argument("build_lindblad: one truncation for MasterExample");
        if (!(cfg.gamma >= 0)) throw std::invalid_argument("build_lindblad: rates must be >= 0");
        s.dims = {cfg.truncation[0] + 1};
        const Eigen::MatrixXcd a = annihilation(s.dims, 0), ad = a.adjoint();
        s.X = -I * cfg.omega * ad * a + cfg.kappa * (ad * ad - a * a) + cfg.E * (ad - a);
        s.jumps = {a};
        s.rates = {cfg.gamma};
    } else {
        if (cfg.truncation.size() != 2) throw std::invalid_argument("build_lindblad: truncations {pump, signal} for Dopo");
        if (!(cfg.kappa > 0) || !(cfg.g > 0) || !(cfg.sigma >= 0))
            throw std::invalid_argument("build_lindblad: Dopo needs kappa > 0, g > 0, sigma >= 0");
        s.dims = {cfg.truncation[0] + 1, cfg.truncation[1] + 1};
        const Eigen::MatrixXcd ap = annihilation(s.dims, 0), as = annihilation(s.dims, 1);
        const double chi = cfg.g * std::sqrt(cfg.kappa);
        const double Ep = cfg.sigma * cfg.kappa / chi;
        s.X = 0.5 * chi * (ap * as.adjoint() * as.adjoint() - ap.adjoint() * as * as) +
              Ep * (ap.adjoint() - ap);
        s.jumps = {ap, as};
        s.rates = {cfg.kappa, 1.0};
    }
    return s;
}

static void rk4(const Generator& s, Eigen::MatrixXcd& r, double dt) {
    const Eigen::MatrixXcd k1 = s(r);
    const Eigen::MatrixXcd k2 = s(r + 0.5 * dt * k1);
    const Eigen::MatrixXcd k3 = s(r + 0.5 * dt * k2);
    const Eigen::MatrixXcd k4 = s(r + dt * k3);
    r += dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    r = 0.5 * (r + r.adjoint()).eval();
}

TruncatedDensityMatrix evolve(const LindbladSpec& spec, const TruncatedDensityMatrix& rho0, double t_end,
                              double dt) {
    if (rho0.dims != spec.dims) throw std::invalid_argument("evolve: state and generator dimensions differ");
    if (!(dt > 0) || !(t_end >= 0)) throw std::invalid_argument("evolve: need dt > 0 and t_end >= 0");
    if (dt * spec.max_rate() >= 0.1) throw std::invalid_argument("evolve: dt * max rate must be < 0.1");
    const Generator gen(spec);
    TruncatedDensityMatrix out = rho0;
    const cd tr0 = rho0.rho.trace();
    const long steps = std::lround(t_end / dt);
    const double h = steps > 0 ? t_end / steps : 0.0;
    for (long k = 0; k < steps; ++k) {
        rk4(gen, out.rho, h);
        if ((k & 63) == 63 && std::abs(out.rho.trace() - tr0) > 1e-6)
            throw step_size_error("evolve: trace drift exceeds 1e-6");
    }
    if (std::abs(out.rho.trace() - tr0) > 1e-6) throw step_size_error("evolve: trace drift exceeds 1e-6");
    return out;
}

double top_population(const TruncatedDensityMatrix& r, int mode) {
    const Eigen::MatrixXcd a = annihilation(r.dims, mode);
    const int d = r.dims[mode];
    int inner = 1;
    for (std::size_t j = mode + 1; j < r.dims.size(); ++j) inner *= r.dims[j];
    double p = 0;
    for (int i = 0; i < r.rho.rows(); ++i)
        if ((i / inner) % d == d - 1) p += r.rho(i, i).real();
    return p;
}

TruncatedDensityMatrix steady_state(const LindbladSpec& spec, double dt, double tol, double t_max,
                                    double leak_tol) {
    std::vector<int> zeros(spec.dims.size(), 0);
    TruncatedDensityMatrix r = fock_state(spec.dims, zeros);
    if (dt <= 0) dt = 0.09 / spec.max_rate();
    const double t_min = 10.0 / spec.min_rate();
    double t = 0;
    const double chunk = std::max(1.0, t_min / 10);
    while (true) {
        r = evolve(spec, r, chunk, dt);
        t += chunk;
        if (t >= t_min && spec.apply(r.rho).cwiseAbs().maxCoeff() < tol) break;
        if (t >= t_max) throw step_size_error("steady_state: not converged by t_max");
    }
    for (int m = 0; m < int(spec.dims.size()); ++m) {
        const double top = top_population(r, m);
        if (top > leak_tol)
            throw leakage_error("steady_state: top Fock level of mode " + std::to_string(m) +
                                    " holds " + std::to_string(top),
                                top);
    }
    return r;
}

cd normal_ordered_moment(const TruncatedDensityMatrix& r, int mode, int m, int n) {
    if (m < 0 || n < 0) throw std::invalid_argument("normal_ordered_moment: powers must be >= 0");
    const Eigen::MatrixXcd a = annihilation(r.dims, mode);
    const int N = r.rho.rows();
    Eigen::MatrixXcd op = Eigen::MatrixXcd::Identity(N, N);
    for (int k = 0; k < m; ++k) op = op * a.adjoint();
    for (int k = 0; k < n; ++k) op = op * a;
    return (r.rho * op).trace();
}

}  // namespace opo
