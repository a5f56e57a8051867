#include "opo/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "opo/steady.hpp"

namespace opo {

namespace {
constexpr double PI = 3.14159265358979323846;
const double RT2 = std::sqrt(2.0);
const cd I1(0.0, 1.0);
const double INF = std::numeric_limits<double>::infinity();

void require(bool ok, const std::string& msg) {
    if (!ok) throw std::domain_error(msg);
}
}  // namespace

LinearizedSystem linearize(const ModelConfig& cfg, const Eigen::VectorXcd& classical,
                           bool adiabatic, bool project_zero_modes, double g) {
    cfg.validate();
    if (!(g > 0)) throw std::invalid_argument("linearize: g must be > 0");
    const double res = classical_rhs(cfg, classical).norm();
    require(res <= 1e-8, "linearize: state is not a fixed point (residual " + std::to_string(res) + ")");
    ModelConfig c0 = cfg;
    c0.g = 0.0;
    ModelConfig cg = cfg;
    cg.g = g;
    const Eigen::VectorXcd d = to_doubled(classical);
    Eigen::MatrixXcd L = drift_jacobian(c0, d);
    Eigen::MatrixXcd B = langevin_rhs(cg, d).noise;
    std::vector<Eigen::VectorXcd> gens =
        project_zero_modes ? symmetry_generators(cfg, classical) : std::vector<Eigen::VectorXcd>{};

    if (adiabatic) {
        if (cfg.kind == ModelKind::DopoAdiabatic || cfg.kind == ModelKind::ActiveLockClassical)
            throw std::invalid_argument("linearize: model has no pump to eliminate");
        const int n = L.rows() - 2;
        const Eigen::MatrixXcd Lpp = L.topLeftCorner(2, 2);
        const Eigen::MatrixXcd Lps = L.topRightCorner(2, n);
        const Eigen::MatrixXcd Lsp = L.bottomLeftCorner(n, 2);
        const Eigen::MatrixXcd K = Lsp * Lpp.inverse();
        Eigen::MatrixXcd La = L.bottomRightCorner(n, n) - K * Lps;
        Eigen::MatrixXcd Ba = B.bottomRows(n) - K * B.topRows(2);
        L = La;
        B = Ba;
        for (auto& v : gens) v = Eigen::VectorXcd(v.tail(n));
    }

    LinearizedSystem sys;
    sys.L = L;
    sys.N = B * B.transpose();
    sys.g = g;
    if (!gens.empty()) {
        const int n = L.rows(), k = int(gens.size());
        Eigen::MatrixXcd R(n, k);
        for (int j = 0; j < k; ++j) {
            R.col(j) = gens[j];
            require((L * gens[j]).norm() <= 1e-8 * gens[j].norm(),
                    "linearize: symmetry generator is not a zero mode");
        }
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(L.transpose(), Eigen::ComputeFullV);
        const Eigen::MatrixXcd Vk = svd.matrixV().rightCols(k);
        const Eigen::MatrixXcd M = (Vk.transpose() * R).inverse().transpose();
        sys.zero_right = R;
        sys.zero_left = Vk * M;
    }
    return sys;
}

Eigen::VectorXcd quadrature_row(int dim, const std::vector<std::pair<int, cd>>& combo, double phi) {
    Eigen::VectorXcd u = Eigen::VectorXcd::Zero(dim);
    const cd e = std::polar(1.0, -phi);
    for (const auto& [j, a] : combo) {
        if (j < 0 || 2 * j + 1 >= dim) throw std::out_of_range("quadrature_row: mode index out of range");
        u(2 * j) += e * a;
        u(2 * j + 1) += std::conj(e) * std::conj(a);
    }
    return u;
}

SpectrumValue linear_spectrum(const LinearizedSystem& sys, const Eigen::VectorXcd& u, double omega) {
    const int n = sys.L.rows();
    if (sys.L.cols() != n || sys.N.rows() != n || sys.N.cols() != n || u.size() != n)
        throw std::invalid_argument("linear_spectrum: dimension mismatch");
    Eigen::MatrixXcd Lp = sys.L;
    Eigen::MatrixXcd P = Eigen::MatrixXcd::Identity(n, n);
    if (sys.zero_right.size() > 0) {
        const Eigen::MatrixXcd RL = sys.zero_right * sys.zero_left.transpose();
        Lp -= RL;
        P -= RL;
    }
    const double scale = std::max(1.0, Lp.cwiseAbs().maxCoeff());
    const Eigen::VectorXcd ev = Lp.eigenvalues();
    for (int j = 0; j < n; ++j)
        require(ev(j).real() <= 1e-10 * scale,
                "linear_spectrum: system is unstable (eigenvalue real part " +
                    std::to_string(ev(j).real()) + ")");

    const Eigen::MatrixXcd A = cd(0.0, omega) * Eigen::MatrixXcd::Identity(n, n) - Lp.transpose();
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A);
    const auto sv = svd.singularValues();
    if (sv(n - 1) < 1e-12 * scale) return {INF, true};
    const Eigen::MatrixXcd Am = cd(0.0, -omega) * Eigen::MatrixXcd::Identity(n, n) - Lp.transpose();
    const Eigen::VectorXcd pu = P.transpose() * u;
    const Eigen::VectorXcd y = A.partialPivLu().solve(pu);
    const Eigen::VectorXcd x = Am.partialPivLu().solve(pu);
    const cd s = y.transpose() * sys.N * x;
    return {1.0 + 2.0 / (sys.g * sys.g) * s.real(), false};
}

std::string to_string(SpectrumCase c) {
    switch (c) {
    case SpectrumCase::DopoBelow: return "dopo-below";
    case SpectrumCase::DopoAbove: return "dopo-above";
    case SpectrumCase::OpoBelowJoint: return "opo-below-joint";
    case SpectrumCase::TwinBeams: return "twin-beams";
    case SpectrumCase::TwoChannel: return "two-channel";
    case SpectrumCase::TtmDopo: return "ttm-dopo";
    case SpectrumCase::InjectedDark: return "injected-dark";
    case SpectrumCase::Family: return "family";
    }
    return "?";
}

SpectrumCase spectrum_case_from_string(const std::string& s) {
    for (auto c : {SpectrumCase::DopoBelow, SpectrumCase::DopoAbove, SpectrumCase::OpoBelowJoint,
                   SpectrumCase::TwinBeams, SpectrumCase::TwoChannel, SpectrumCase::TtmDopo,
                   SpectrumCase::InjectedDark, SpectrumCase::Family})
        if (to_string(c) == s) return c;
    throw std::invalid_argument("unknown spectrum case '" + s + "'");
}

std::vector<std::string> case_quadratures(SpectrumCase c) {
    switch (c) {
    case SpectrumCase::OpoBelowJoint: return {"X-", "Y+", "X+", "Y-"};
    case SpectrumCase::TwinBeams: return {"X-"};
    case SpectrumCase::TtmDopo: return {"Xb", "Yb", "Xd", "Yd"};
    default: return {"X", "Y"};
    }
}

static void check_quad(SpectrumCase c, const std::string& q) {
    const auto qs = case_quadratures(c);
    if (std::find(qs.begin(), qs.end(), q) == qs.end())
        throw std::invalid_argument("quadrature '" + q + "' not defined for case " + to_string(c));
}

// ((1 - a)^2 + W^2) / ((1 + a)^2 + W^2)
static double squeezed_ratio(double a, double w) {
    return ((1 - a) * (1 - a) + w * w) / ((1 + a) * (1 + a) + w * w);
}

static double family_ratio(const CaseParams& p) {
    std::vector<int> ls;
    for (int l = p.f; l >= 0; l -= 2) ls.push_back(l);
    const auto it = std::find(ls.begin(), ls.end(), p.l);
    if (it == ls.end() || p.l == ls.back())
        throw std::domain_error("family: l must be one of f, f-2, ... above l0");
    if (p.r_l.size() != ls.size()) throw std::domain_error("family: r_l needs one entry per l");
    return p.r_l[it - ls.begin()];
}

double injected_pump_intensity(double sigma, double phi_i, double Ii) {
    const auto one = injected_one_mode(sigma, phi_i, Ii);
    for (int j = int(one.branches.size()) - 1; j >= 0; --j)
        if (one.stable[j]) return std::norm(one.branches[j].state(0));
    throw std::domain_error("injected: no stable one-mode solution");
}

double closed_form_spectrum(SpectrumCase c, const CaseParams& p, const std::string& quad, double w) {
    check_quad(c, quad);
    const double s = p.sigma;
    require(s >= 0, "closed form: sigma must be >= 0");
    switch (c) {
    case SpectrumCase::DopoBelow: {
        require(s <= 1, "dopo-below: requires sigma <= 1");
        const double v = squeezed_ratio(s, w);
        return quad == "Y" ? v : 1.0 / v;
    }
    case SpectrumCase::DopoAbove:
        require(s > 1, "dopo-above: requires sigma > 1");
        if (quad == "X") return 1 + 1 / ((s - 1) * (s - 1) + w * w / 4);
        return 1 - 1 / (s * s + w * w / 4);
    case SpectrumCase::OpoBelowJoint: {
        require(s <= 1, "opo-below-joint: requires sigma <= 1");
        const double v = squeezed_ratio(s, w);
        return (quad == "X-" || quad == "Y+") ? v : 1.0 / v;
    }
    case SpectrumCase::TwinBeams:
        require(s > 1, "twin-beams: requires sigma > 1");
        return w * w / (4 + w * w);
    case SpectrumCase::TwoChannel: {
        require(p.r > 0 && p.r < 1, "two-channel: requires 0 < r < 1");
        const double v = squeezed_ratio(p.r * std::min(s, 1.0), w);
        return quad == "Y" ? v : 1.0 / v;
    }
    case SpectrumCase::TtmDopo:
        require(s > 1, "ttm-dopo: requires sigma > 1");
        if (quad == "Xb") return 1 + 1 / ((s - 1) * (s - 1) + w * w / 4);
        if (quad == "Yb") return 1 - 1 / (s * s + w * w / 4);
        if (quad == "Xd") return 1.0;
        return 1 - 1 / (1 + w * w / 4);
    case SpectrumCase::InjectedDark: {
        const double a = std::sqrt(injected_pump_intensity(s, p.phi_i, p.Ii));
        require(a < 1, "injected-dark: y mode is above its threshold");
        if (quad == "X") return 1 + 4 * a / ((1 - a) * (1 - a) + w * w);
        return 1 - 4 * a / ((1 + a) * (1 + a) + w * w);
    }
    case SpectrumCase::Family: {
        const double v = squeezed_ratio(family_ratio(p) * std::min(s, 1.0), w);
        return quad == "Y" ? v : 1.0 / v;
    }
    }
    return 0.0;
}

static Eigen::VectorXcd pick(const std::vector<SteadyBranch>& bs, BranchLabel l, const std::string& note) {
    for (const auto& b : bs)
        if (b.label == l && b.note == note) return b.state;
    throw std::domain_error("case_setup: branch not available at these parameters");
}

CaseSetup case_setup(SpectrumCase c, const CaseParams& p, const std::string& quad) {
    check_quad(c, quad);
    const double h = 1.0 / RT2;
    ModelConfig cfg;
    cfg.sigma = p.sigma;
    cfg.kappa = p.kappa;
    CaseSetup out;
    out.method = "engine-full";
    const bool Yq = !quad.empty() && quad[0] == 'Y';
    const double phi = Yq ? PI / 2 : 0.0;
    switch (c) {
    case SpectrumCase::DopoBelow: {
        cfg.kind = ModelKind::DopoResonant;
        out.sys = linearize(cfg, pick(analytic_steady(cfg), BranchLabel::Off, ""));
        out.u = quadrature_row(4, {{1, 1.0}}, phi);
        break;
    }
    case SpectrumCase::DopoAbove: {
        require(p.sigma > 1, "dopo-above: requires sigma > 1");
        cfg.kind = ModelKind::DopoResonant;
        out.sys = linearize(cfg, pick(analytic_steady(cfg), BranchLabel::On, "+"), true);
        out.u = quadrature_row(2, {{0, 1.0}}, phi);
        out.method = "engine-adiabatic";
        break;
    }
    case SpectrumCase::OpoBelowJoint: {
        cfg.kind = ModelKind::Opo;
        out.sys = linearize(cfg, pick(analytic_steady(cfg), BranchLabel::Off, ""));
        const double sg = (quad == "X-" || quad == "Y-") ? -h : h;
        out.u = quadrature_row(6, {{1, h}, {2, sg}}, phi);
        break;
    }
    case SpectrumCase::TwinBeams: {
        require(p.sigma > 1, "twin-beams: requires sigma > 1");
        cfg.kind = ModelKind::Opo;
        out.sys = linearize(cfg, pick(analytic_steady(cfg, 0.0), BranchLabel::On, ""));
        out.u = quadrature_row(6, {{1, h}, {2, -h}}, 0.0);
        break;
    }
    case SpectrumCase::TwoChannel: {
        cfg.kind = ModelKind::TwoChannel;
        cfg.r = p.r;
        const auto bs = analytic_steady(cfg);
        const auto st = p.sigma > 1 ? pick(bs, BranchLabel::On, "mode1+") : pick(bs, BranchLabel::Off, "");
        out.sys = linearize(cfg, st);
        out.u = quadrature_row(6, {{2, 1.0}}, phi);
        break;
    }
    case SpectrumCase::TtmDopo: {
        require(p.sigma > 1, "ttm-dopo: requires sigma > 1");
        cfg.kind = ModelKind::TtmDopo;
        out.sys = linearize(cfg, pick(analytic_steady(cfg, 0.0), BranchLabel::On, ""), true);
        // pump eliminated: modes +1 -> 0, -1 -> 1
        if (quad[1] == 'b') out.u = quadrature_row(4, {{0, h}, {1, h}}, phi);
        else out.u = quadrature_row(4, {{0, I1 * h}, {1, -I1 * h}}, phi);
        out.method = "engine-adiabatic";
        break;
    }
    case SpectrumCase::InjectedDark: {
        cfg.kind = ModelKind::InjectedTtmDopo;
        cfg.inj_phase = p.phi_i;
        cfg.inj_intensity = p.Ii;
        const auto one = injected_one_mode(p.sigma, p.phi_i, p.Ii, p.kappa);
        int pickj = -1;
        for (int j = int(one.branches.size()) - 1; j >= 0 && pickj < 0; --j)
            if (one.stable[j]) pickj = j;
        require(pickj >= 0, "injected-dark: no stable one-mode solution");
        const auto st = one.branches[pickj].state;
        out.sys = linearize(cfg, st);
        const double ph0 = std::arg(st(0));
        out.u = quadrature_row(6, {{2, 1.0}}, ph0 / 2 + phi);
        break;
    }
    case SpectrumCase::Family: {
        family_ratio(p);
        cfg.kind = ModelKind::FamilyDopo;
        cfg.f = p.f;
        cfg.r_l = p.r_l;
        const auto bs = analytic_steady(cfg);
        Eigen::VectorXcd st;
        if (p.sigma > 1) {
            for (const auto& b : bs)
                if (b.label == BranchLabel::On && (b.note == "+" || b.note.empty())) st = b.state;
        } else {
            st = pick(bs, BranchLabel::Off, "");
        }
        out.sys = linearize(cfg, st);
        // classical index of mode +l
        int k = 1;
        for (int l = p.f; l > p.l; l -= 2) k += l == 0 ? 1 : 2;
        if (p.l == 0) {
            out.u = quadrature_row(cfg.dim(), {{k, 1.0}}, phi);
        } else if (!p.sin_parity) {
            out.u = quadrature_row(cfg.dim(), {{k, h}, {k + 1, h}}, phi);
        } else {
            out.u = quadrature_row(cfg.dim(), {{k, -I1 * h}, {k + 1, I1 * h}}, phi);
        }
        break;
    }
    }
    return out;
}

static double sinc(double x) {
    if (std::abs(x) < 1e-4) return 1 - x * x / 6 + x * x * x * x / 120;
    return std::sin(x) / x;
}

double fixed_lo_spectrum(double sigma, double d, double phi, double w, double T) {
    require(sigma > 1, "fixed_lo_spectrum: requires sigma > 1");
    require(T > 0, "fixed_lo_spectrum: requires T > 0");
    require(d >= 0, "fixed_lo_spectrum: requires d >= 0");
    const double c2 = std::cos(phi) * std::cos(phi), s2 = 1 - c2;
    double V = 1.0;
    if (c2 > 1e-15) {
        require(w != 0, "fixed_lo_spectrum: S0 diverges at Omega = 0");
        const double sm = sigma - 1, w2 = w * w;
        double first;
        const double x = w * T;
        if (std::abs(x) < 1e-3) first = 8 * T * T * (1.0 / 6 - x * x / 120);
        else first = 8 / w2 * (1 - sinc(x));
        const double S0 = first - 4 * d * T / (w2 * sm) * (6 * sm * sm + w2) / (4 * sm * sm + w2);
        V += S0 * c2;
    }
    const double w2 = w * w, q = 4 + w2;
    const double Sp = (8 - 2 * w2) / (T * q * q) - 4 / q +
                      8 * d * T * (2 * (sigma * sigma + 1) + w2) / ((sigma - 1) * q * (4 * sigma * sigma + w2));
    V += Sp * s2;
    return V;
}

OptimalDetection optimal_detection_time(double sigma, double d) {
    require(sigma > 1, "optimal_detection_time: requires sigma > 1");
    require(d > 0, "optimal_detection_time: requires d > 0");
    OptimalDetection o;
    o.T_opt = std::sqrt(sigma * sigma * (sigma - 1) / (d * (sigma * sigma + 1)));
    o.V_opt = 1 / o.T_opt;
    o.V_at_T_opt = fixed_lo_spectrum(sigma, d, PI / 2, 0.0, o.T_opt);
    return o;
}

OrientationDiffusion orientation_diffusion(double g, double sigma) {
    require(sigma > 1, "orientation diffusion: requires sigma > 1");
    OrientationDiffusion o;
    o.g = g;
    o.sigma = sigma;
    o.d = g * g / 4;
    o.D = o.d / (sigma - 1);
    return o;
}

OrientationStats orientation_statistics(double g, double sigma, double tau, double tau1, double tau2) {
    const auto od = orientation_diffusion(g, sigma);
    if (!(tau >= 0 && tau1 >= 0 && tau2 >= 0))
        throw std::invalid_argument("orientation_statistics: times must be >= 0");
    OrientationStats s;
    s.d = od.d;
    s.D = od.D;
    s.V_theta = od.D * tau;
    const double e = std::exp(-od.D * (tau1 + tau2) / 2), m = od.D * std::min(tau1, tau2);
    s.sin_corr = e * std::sinh(m);
    s.cos_corr = e * std::cosh(m);
    return s;
}

}  // namespace opo
