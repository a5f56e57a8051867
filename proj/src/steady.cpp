#include "opo/steady.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>

#include "opo/numeric.hpp"

namespace opo {

namespace {
constexpr double PI = 3.14159265358979323846;
const cd I1(0.0, 1.0);

std::vector<double> poly_mul(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> c(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
    return c;
}

Eigen::VectorXcd vec(std::initializer_list<cd> v) {
    Eigen::VectorXcd out(v.size());
    int k = 0;
    for (cd x : v) out(k++) = x;
    return out;
}

SteadyBranch make_branch(BranchLabel l, Eigen::VectorXcd s, double lo, double hi,
                         std::string note = {}, double phase = kNaN) {
    SteadyBranch b;
    b.label = l;
    b.state = std::move(s);
    b.domain_lo = lo;
    b.domain_hi = hi;
    b.note = std::move(note);
    b.free_phase = phase;
    return b;
}
}  // namespace

std::string to_string(BranchLabel b) {
    switch (b) {
    case BranchLabel::Off: return "off";
    case BranchLabel::On: return "on";
    case BranchLabel::OneMode: return "one-mode";
    case BranchLabel::TwoMode: return "two-mode";
    case BranchLabel::Symmetric: return "symmetric";
    case BranchLabel::Asymmetric: return "asymmetric";
    }
    return "?";
}

std::string to_string(Bifurcation b) {
    switch (b) {
    case Bifurcation::None: return "none";
    case Bifurcation::TurningPoint: return "TP";
    case Bifurcation::Pitchfork: return "PB";
    case Bifurcation::Hopf: return "HB";
    }
    return "?";
}

std::vector<SteadyBranch> analytic_steady(const ModelConfig& cfg, double theta) {
    cfg.validate();
    const double s = cfg.sigma;
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<SteadyBranch> out;
    switch (cfg.kind) {
    case ModelKind::DopoResonant:
        out.push_back(make_branch(BranchLabel::Off, vec({s, 0.0}), 0, inf));
        if (s > 1) {
            const double b = std::sqrt(2 * (s - 1));
            out.push_back(make_branch(BranchLabel::On, vec({1.0, b}), 1, inf, "+"));
            out.push_back(make_branch(BranchLabel::On, vec({1.0, -b}), 1, inf, "-"));
        }
        break;
    case ModelKind::DopoDetuned: {
        const double D = cfg.delta;
        out.push_back(make_branch(BranchLabel::Off, vec({s, 0.0}), 0, inf));
        const double th = std::sqrt(1 + D * D);
        if (s > th) {
            const double rho2 = 2 * (std::sqrt(s * s - D * D) - 1);
            // sigma e^{-2 i phi_s} = 1 + rho^2/2 + i D
            const double phis = -0.5 * std::arg(cd(1 + rho2 / 2, D));
            for (int sg : {1, -1}) {
                const cd bs = double(sg) * std::sqrt(rho2) * std::polar(1.0, phis);
                const cd bp = cd(1.0, D) * std::polar(1.0, 2 * phis);
                out.push_back(make_branch(BranchLabel::On, vec({bp, bs}), th, inf, sg > 0 ? "+" : "-"));
            }
        }
        break;
    }
    case ModelKind::DopoAdiabatic:
        out.push_back(make_branch(BranchLabel::Off, vec({0.0}), 0, inf));
        if (s > 1) {
            const double b = std::sqrt(2 * (s - 1));
            out.push_back(make_branch(BranchLabel::On, vec({b}), 1, inf, "+"));
            out.push_back(make_branch(BranchLabel::On, vec({-b}), 1, inf, "-"));
        }
        break;
    case ModelKind::Opo:
    case ModelKind::TtmDopo:
        out.push_back(make_branch(BranchLabel::Off, vec({s, 0.0, 0.0}), 0, inf));
        if (s > 1) {
            const double r = std::sqrt(s - 1);
            out.push_back(make_branch(BranchLabel::On,
                                      vec({1.0, r * std::polar(1.0, -theta), r * std::polar(1.0, theta)}),
                                      1, inf, "", theta));
        }
        break;
    case ModelKind::TwoChannel: {
        const double r = cfg.r;
        out.push_back(make_branch(BranchLabel::Off, vec({s, 0.0, 0.0}), 0, inf));
        if (s > 1) {
            const double b = std::sqrt(2 * (s - 1));
            out.push_back(make_branch(BranchLabel::On, vec({1.0, b, 0.0}), 1, inf, "mode1+"));
            out.push_back(make_branch(BranchLabel::On, vec({1.0, -b, 0.0}), 1, inf, "mode1-"));
        }
        if (s > 1 / r) {
            const double b = std::sqrt(2 * (s - 1 / r) / r);
            out.push_back(make_branch(BranchLabel::On, vec({1 / r, 0.0, b}), 1 / r, inf, "mode2+"));
            out.push_back(make_branch(BranchLabel::On, vec({1 / r, 0.0, -b}), 1 / r, inf, "mode2-"));
        }
        break;
    }
    case ModelKind::FamilyDopo: {
        const auto ls = cfg.family_l();
        const int n = cfg.dim() / 2;
        Eigen::VectorXcd off = Eigen::VectorXcd::Zero(n);
        off(0) = s;
        out.push_back(make_branch(BranchLabel::Off, off, 0, inf));
        if (s > 1) {
            Eigen::VectorXcd on = Eigen::VectorXcd::Zero(n);
            on(0) = 1.0;
            const int k = n - (ls.back() == 0 ? 1 : 2);
            if (ls.back() == 0) {
                on(k) = std::sqrt(2 * (s - 1));
                out.push_back(make_branch(BranchLabel::On, on, 1, inf, "+"));
                on(k) = -on(k);
                out.push_back(make_branch(BranchLabel::On, on, 1, inf, "-"));
            } else {
                on(k) = std::sqrt(s - 1) * std::polar(1.0, -theta);
                on(k + 1) = std::sqrt(s - 1) * std::polar(1.0, theta);
                out.push_back(make_branch(BranchLabel::On, on, 1, inf, "", theta));
            }
        }
        break;
    }
    case ModelKind::InjectedTtmDopo: {
        auto one = injected_one_mode(s, cfg.inj_phase, cfg.inj_intensity, cfg.kappa);
        out = one.branches;
        if (cfg.inj_intensity > 0) {
            for (int sg : {1, -1}) {
                try {
                    out.push_back(injected_two_mode(s, cfg.inj_phase, cfg.inj_intensity, sg));
                } catch (const std::domain_error&) {
                }
            }
        }
        break;
    }
    case ModelKind::ActiveLockClassical:
        out = active_lock(s, cfg.delta, cfg.lock_intensity).branches;
        break;
    }
    return out;
}

std::vector<Eigen::VectorXcd> symmetry_generators(const ModelConfig& cfg,
                                                  const Eigen::VectorXcd& c) {
    std::vector<Eigen::VectorXcd> gens;
    auto pair_gen = [&](int iu, int iv) {
        // b_{+l} -> e^{-i th} b_{+l}, b_{-l} -> e^{+i th} b_{-l}
        Eigen::VectorXcd g = Eigen::VectorXcd::Zero(2 * c.size());
        g(2 * iu) = -I1 * c(iu);
        g(2 * iu + 1) = I1 * std::conj(c(iu));
        g(2 * iv) = I1 * c(iv);
        g(2 * iv + 1) = -I1 * std::conj(c(iv));
        if (g.norm() > 1e-12) gens.push_back(g);
    };
    if (cfg.kind == ModelKind::Opo || cfg.kind == ModelKind::TtmDopo) {
        pair_gen(1, 2);
    } else if (cfg.kind == ModelKind::FamilyDopo) {
        int k = 1;
        for (int l : cfg.family_l()) {
            if (l == 0) {
                k += 1;
            } else {
                pair_gen(k, k + 1);
                k += 2;
            }
        }
    }
    return gens;
}

// Components that change sign under the model's discrete symmetry, or -1 when
// the model uses the exchange symmetry (active lock).
static std::vector<int> odd_components(const ModelConfig& cfg) {
    std::vector<int> odd;
    switch (cfg.kind) {
    case ModelKind::DopoAdiabatic: return {0, 1};
    case ModelKind::InjectedTtmDopo: return {4, 5};
    case ModelKind::ActiveLockClassical: return {-1};
    default:
        for (int i = 2; i < cfg.dim(); ++i) odd.push_back(i);
        return odd;
    }
}

StabilityReport stability_matrix(const ModelConfig& cfg, const Eigen::VectorXcd& classical) {
    const double res = classical_rhs(cfg, classical).norm();
    if (!(res <= 1e-8))
        throw std::domain_error("stability_matrix: state is not a fixed point (residual " +
                                std::to_string(res) + ")");
    ModelConfig c0 = cfg;
    c0.g = 0.0;
    const Eigen::VectorXcd d = to_doubled(classical);
    StabilityReport rep;
    rep.matrix = drift_jacobian(c0, d);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(rep.matrix, true);
    rep.eigenvalues = es.eigenvalues();
    rep.eigenvectors = es.eigenvectors();

    const auto gens = symmetry_generators(cfg, classical);
    Eigen::MatrixXcd Q;
    if (!gens.empty()) {
        Eigen::MatrixXcd G(d.size(), gens.size());
        for (std::size_t j = 0; j < gens.size(); ++j) G.col(j) = gens[j];
        Eigen::HouseholderQR<Eigen::MatrixXcd> qr(G);
        Q = qr.householderQ() * Eigen::MatrixXcd::Identity(d.size(), gens.size());
    }
    rep.max_re = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < rep.eigenvalues.size(); ++j) {
        const cd lam = rep.eigenvalues(j);
        if (Q.size() > 0 && std::abs(lam) < 1e-8) {
            const Eigen::VectorXcd v = rep.eigenvectors.col(j);
            const double ov = (Q.adjoint() * v).norm() / v.norm();
            if (ov > 0.99) {
                rep.zero_modes.push_back(j);
                continue;
            }
        }
        rep.max_re = std::max(rep.max_re, lam.real());
    }
    rep.stable = rep.max_re < 0;

    // marginal modes other than symmetry modes
    const auto odd = odd_components(cfg);
    for (int j = 0; j < rep.eigenvalues.size(); ++j) {
        if (std::find(rep.zero_modes.begin(), rep.zero_modes.end(), j) != rep.zero_modes.end())
            continue;
        const cd lam = rep.eigenvalues(j);
        if (std::abs(lam.real()) >= 1e-8) continue;
        if (std::abs(lam.imag()) > 1e-8) {
            rep.bifurcation = Bifurcation::Hopf;
            break;
        }
        const Eigen::VectorXcd v = rep.eigenvectors.col(j);
        bool pitchfork = false;
        if (!odd.empty() && odd[0] == -1) {
            Eigen::VectorXcd ev(4);
            ev << v(3), v(2), v(1), v(0);
            pitchfork = (v + ev).norm() < 1e-6 * v.norm();
        } else {
            double state_odd = 0, vec_even = 0;
            for (int i = 0; i < d.size(); ++i) {
                const bool is_odd = std::find(odd.begin(), odd.end(), i) != odd.end();
                if (is_odd) state_odd += std::norm(d(i));
                else vec_even += std::norm(v(i));
            }
            pitchfork = state_odd < 1e-20 && vec_even < 1e-12 * v.squaredNorm();
        }
        rep.bifurcation = pitchfork ? Bifurcation::Pitchfork : Bifurcation::TurningPoint;
        break;
    }
    return rep;
}

// ---- injected signal

double injected_intensity(double sigma, double phi_i, double Ix) {
    const double X = 1 + Ix / 2, c = std::cos(2 * phi_i);
    const double d = sigma * sigma - X * X;
    return 2 * d * d * (X - 1) / (sigma * sigma + X * X + 2 * sigma * X * c);
}

std::vector<double> injected_quintic(double sigma, double phi_i, double Ii) {
    const double s2 = sigma * sigma, c = std::cos(2 * phi_i);
    std::vector<double> q = poly_mul({-2.0, 2.0}, {s2 * s2, 0.0, -2 * s2, 0.0, 1.0});
    q[0] -= Ii * s2;
    q[1] -= Ii * 2 * sigma * c;
    q[2] -= Ii;
    return q;
}

Eigen::VectorXcd injected_one_mode_state(double sigma, double phi_i, double Ix, double Ii) {
    const double X = 1 + Ix / 2;
    cd bx = 0.0;
    if (Ix > 0) {
        cd u;
        if (std::abs(X * X - sigma * sigma) < 1e-12 || Ii <= 0) {
            u = 1.0;
        } else {
            const cd w = std::sqrt(Ii / Ix) * std::polar(1.0, phi_i);
            u = (X * w + sigma * std::conj(w)) / (X * X - sigma * sigma);
            u /= std::abs(u);
        }
        bx = std::sqrt(Ix) * u;
    }
    const cd b0 = sigma - 0.5 * bx * bx;
    return vec({b0, bx, 0.0});
}

InjectedOneMode injected_one_mode(double sigma, double phi_i, double Ii, double kappa) {
    if (!(sigma >= 0) || !(Ii >= 0)) throw std::invalid_argument("injected_one_mode: need sigma, I_i >= 0");
    ModelConfig cfg;
    cfg.kind = ModelKind::InjectedTtmDopo;
    cfg.sigma = sigma;
    cfg.kappa = kappa;
    cfg.inj_intensity = Ii;
    cfg.inj_phase = phi_i;

    InjectedOneMode out;
    const auto q = injected_quintic(sigma, phi_i, Ii);
    std::vector<double> xs;
    for (cd z : poly_roots(q)) {
        if (!is_real_root(z)) continue;
        const double X = z.real();
        if (X < 1 - 1e-9) continue;
        double scale = 0;
        for (std::size_t k = 0; k < q.size(); ++k) scale += std::abs(q[k]) * std::pow(std::abs(X), double(k));
        if (std::abs(poly_eval(q, X)) > 1e-9 * std::max(1.0, scale)) continue;
        const double Ix = std::max(0.0, 2 * (X - 1));
        bool dup = false;
        for (double y : xs)
            if (std::abs(y - Ix) < 1e-7 * (1 + Ix)) dup = true;
        if (!dup) xs.push_back(Ix);
    }
    if (xs.empty()) throw std::logic_error("injected_one_mode: no admissible root");
    std::sort(xs.begin(), xs.end());
    for (double Ix : xs) {
        const auto st = injected_one_mode_state(sigma, phi_i, Ix, Ii);
        out.branches.push_back(make_branch(BranchLabel::OneMode, st, 0, kNaN));
        out.Ix.push_back(Ix);
        bool stable = false;
        try {
            stable = stability_matrix(cfg, st).stable;
        } catch (const std::domain_error&) {
        }
        out.stable.push_back(stable);
    }
    const double c = std::cos(2 * phi_i);
    if (sigma > 1) {
        out.I_TP1 = 2 * (sigma - 1);
        auto negI = [&](double x) { return -injected_intensity(sigma, phi_i, x); };
        out.Ix_TP2 = golden_min(negI, 0.0, out.I_TP1, 1e-13);
        out.Ii_TP2 = injected_intensity(sigma, phi_i, out.Ix_TP2);
    }
    out.Ix_PB = 2 * std::sqrt(1 + sigma * sigma + 2 * sigma * c);
    out.Ii_PB = 4 * (1 + sigma * c + std::sqrt(1 + 2 * sigma * c + sigma * sigma));
    return out;
}

SteadyBranch injected_two_mode(double sigma, double phi_i, double Ii, int sign) {
    if (!(Ii > 0)) throw std::domain_error("injected_two_mode: requires I_i > 0");
    const double s2 = std::sin(2 * phi_i), c2 = std::cos(2 * phi_i);
    const double Ix = Ii / 4 + 4 * sigma * sigma * s2 * s2 / Ii;
    const double Iy = Ii / 4 - 4 * sigma * sigma * s2 * s2 / Ii - 2 * (1 + sigma * c2);
    if (Iy < -1e-12) throw std::domain_error("injected_two_mode: I_y < 0 (below the pitchfork)");
    const double phx = phi_i + std::atan(-(4 * sigma / Ii) * s2);
    const double phy = phi_i + (sign >= 0 ? 1 : -1) * PI / 2;
    const cd b0 = -std::polar(1.0, 2 * phi_i);
    const cd bx = std::sqrt(Ix) * std::polar(1.0, phx);
    const cd by = std::sqrt(std::max(0.0, Iy)) * std::polar(1.0, phy);
    return make_branch(BranchLabel::TwoMode, vec({b0, bx, by}), kNaN, kNaN, sign >= 0 ? "+" : "-");
}

// ---- active phase locking

std::vector<double> active_lock_cubic(double s, double D, double inj) {
    return {-inj, (1 - s) * (1 - s) + D * D, 2 * (1 - s), 1.0};
}

double active_lock_injection(double s, double D, double I) {
    return ((I + 1 - s) * (I + 1 - s) + D * D) * I;
}

Eigen::VectorXcd active_lock_state(double s, double D, double I) {
    const cd b = std::sqrt(I) * std::polar(1.0, std::arg(cd(I + 1 - s, -D)));
    return vec({b, std::conj(b)});
}

ActiveLockResult active_lock(double s, double D, double inj) {
    if (!(s >= 0) || !(D >= 0) || !(inj >= 0)) throw std::invalid_argument("active_lock: parameters must be >= 0");
    ModelConfig cfg;
    cfg.kind = ModelKind::ActiveLockClassical;
    cfg.sigma = s;
    cfg.delta = D;
    cfg.lock_intensity = inj;
    ActiveLockResult out;
    std::vector<double> Is;
    for (cd z : poly_roots(active_lock_cubic(s, D, inj)))
        if (is_real_root(z) && z.real() > 0) Is.push_back(z.real());
    std::sort(Is.begin(), Is.end());
    for (double I : Is) {
        const auto st = active_lock_state(s, D, I);
        out.branches.push_back(make_branch(BranchLabel::Symmetric, st, kNaN, kNaN));
        out.I.push_back(I);
        bool stable = false;
        try {
            stable = stability_matrix(cfg, st).stable;
        } catch (const std::domain_error&) {
        }
        out.stable.push_back(stable);
    }
    const double disc = (s - 1) * (s - 1) - 3 * D * D;
    if (s > 1 && disc > 0) {
        out.I_minus = (2.0 / 3) * (s - 1) - std::sqrt(disc) / 3;
        out.I_plus = (2.0 / 3) * (s - 1) + std::sqrt(disc) / 3;
    }
    out.I_PB = std::sqrt((1 + s) * (1 + s) + D * D);
    if (s > 1 && s < 1 + 2 * D) {
        out.I_HB = (s - 1) / 2;
        out.omega_HB = std::sqrt(D * D - (s - 1) * (s - 1) / 4);
    }
    return out;
}

// ---- scans

namespace {

struct Eval {
    bool ok = false;
    Eigen::VectorXcd state;
    double control = 0;
    StabilityReport rep;
};

using BranchFn = std::function<Eval(double)>;

// Number of unstable eigenvalues, symmetry modes excluded.
int signature(const StabilityReport& r) {
    int n = 0;
    for (int j = 0; j < r.eigenvalues.size(); ++j) {
        if (std::find(r.zero_modes.begin(), r.zero_modes.end(), j) != r.zero_modes.end()) continue;
        if (r.eigenvalues(j).real() > 1e-10) ++n;
    }
    return n;
}

}  // namespace

ScanTable bifurcation_scan(const ModelConfig& cfg, const std::string& parameter, double lo,
                           double hi, int n) {
    if (n < 2 || !(hi > lo)) throw std::invalid_argument("bifurcation_scan: need n >= 2 and hi > lo");
    ScanTable table;
    table.parameter = parameter;

    std::vector<std::string> keys;
    std::function<Eval(const std::string&, double)> eval;
    std::function<double(double)> control;

    if (parameter == "sigma") {
        control = [](double p) { return p; };
        auto key_of = [](const SteadyBranch& b) { return to_string(b.label) + b.note; };
        eval = [&, key_of](const std::string& key, double p) {
            ModelConfig c = cfg;
            c.sigma = p;
            Eval e;
            for (const auto& b : analytic_steady(c)) {
                if (key_of(b) != key) continue;
                e.state = b.state;
                e.control = p;
                e.rep = stability_matrix(c, b.state);
                e.ok = true;
                break;
            }
            return e;
        };
        for (int i = 0; i < n; ++i) {
            ModelConfig c = cfg;
            c.sigma = lo + (hi - lo) * i / (n - 1);
            for (const auto& b : analytic_steady(c)) {
                const auto k = key_of(b);
                if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
            }
        }
    } else if (parameter == "Ix") {
        if (cfg.kind != ModelKind::InjectedTtmDopo)
            throw std::invalid_argument("bifurcation_scan: Ix requires the injected model");
        control = [&](double p) { return injected_intensity(cfg.sigma, cfg.inj_phase, p); };
        eval = [&](const std::string&, double p) {
            ModelConfig c = cfg;
            c.inj_intensity = control(p);
            Eval e;
            e.state = injected_one_mode_state(cfg.sigma, cfg.inj_phase, p, c.inj_intensity);
            e.control = c.inj_intensity;
            e.rep = stability_matrix(c, e.state);
            e.ok = true;
            return e;
        };
        keys.push_back("one-mode");
    } else if (parameter == "I") {
        if (cfg.kind != ModelKind::ActiveLockClassical)
            throw std::invalid_argument("bifurcation_scan: I requires the active-lock model");
        control = [&](double p) { return active_lock_injection(cfg.sigma, cfg.delta, p); };
        eval = [&](const std::string&, double p) {
            ModelConfig c = cfg;
            c.lock_intensity = control(p);
            Eval e;
            e.state = active_lock_state(cfg.sigma, cfg.delta, p);
            e.control = c.lock_intensity;
            e.rep = stability_matrix(c, e.state);
            e.ok = true;
            return e;
        };
        keys.push_back("symmetric");
    } else {
        throw std::invalid_argument("bifurcation_scan: unsupported parameter '" + parameter + "'");
    }

    auto safe_eval = [&](const std::string& k, double p) {
        try {
            return eval(k, p);
        } catch (const std::exception&) {
            return Eval{};
        }
    };

    for (const auto& key : keys) {
        bool have_prev = false;
        double pprev = 0;
        int sprev = 0;
        for (int i = 0; i < n; ++i) {
            const double p = lo + (hi - lo) * i / (n - 1);
            Eval e = safe_eval(key, p);
            if (!e.ok) {
                if (have_prev && parameter != "sigma") table.gaps.emplace_back(pprev, p);
                have_prev = false;
                continue;
            }
            ScanPoint pt;
            pt.param = p;
            pt.control = e.control;
            pt.state = e.state;
            pt.max_re = e.rep.max_re;
            pt.stable = e.rep.stable;
            pt.branch = key;
            table.points.push_back(pt);
            const auto sig = signature(e.rep);
            if (have_prev && sig != sprev) {
                // locate the change by bisection on the branch parameter
                double a = pprev, b = p;
                for (int it = 0; it < 60 && b - a > 1e-13 * (1 + std::abs(a)); ++it) {
                    const double m = 0.5 * (a + b);
                    Eval em = safe_eval(key, m);
                    if (!em.ok) break;
                    if (signature(em.rep) == sprev) a = m;
                    else b = m;
                }
                const double pc = 0.5 * (a + b);
                Eval ec = safe_eval(key, pc);
                ScanEvent ev;
                ev.param = pc;
                ev.control = control(pc);
                ev.branch = key;
                ev.type = Bifurcation::TurningPoint;
                if (ec.ok) {
                    // eigenvalue closest to the imaginary axis
                    double best = std::numeric_limits<double>::infinity();
                    cd lam = 0;
                    for (int j = 0; j < ec.rep.eigenvalues.size(); ++j) {
                        if (std::find(ec.rep.zero_modes.begin(), ec.rep.zero_modes.end(), j) !=
                            ec.rep.zero_modes.end())
                            continue;
                        if (std::abs(ec.rep.eigenvalues(j).real()) < best) {
                            best = std::abs(ec.rep.eigenvalues(j).real());
                            lam = ec.rep.eigenvalues(j);
                        }
                    }
                    if (std::abs(lam.imag()) > 1e-6) {
                        ev.type = Bifurcation::Hopf;
                    } else {
                        const double h = std::max(1e-7 * (1 + std::abs(pc)), (b - a) * 10);
                        const double c0 = control(pc), cm = control(pc - h), cp = control(pc + h);
                        const bool extremum = (cp - c0) * (c0 - cm) < 0;
                        ev.type = extremum ? Bifurcation::TurningPoint : Bifurcation::Pitchfork;
                    }
                }
                table.events.push_back(ev);
            }
            have_prev = true;
            pprev = p;
            sprev = sig;
        }
    }
    return table;
}

}  // namespace opo
