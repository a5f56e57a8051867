#include "opo/validation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "opo/cavity.hpp"
#include "opo/entangle.hpp"
#include "opo/fock.hpp"
#include "opo/lattice.hpp"
#include "opo/sde.hpp"
#include "opo/spectra.hpp"
#include "opo/steady.hpp"

namespace opo {

namespace {

constexpr double PI = 3.14159265358979323846;

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

// Collects the failed sub-checks of one criterion.
struct Checks {
    std::ostringstream os;
    bool ok = true;
    bool documented_only = true;
    bool any_documented = false;

    void add(const std::string& what, bool pass, bool documented = false) {
        if (os.tellp() > 0) os << "; ";
        os << what << (pass ? "" : documented ? " [FAIL documented]" : " [FAIL]");
        if (!pass) {
            ok = false;
            if (documented) any_documented = true;
            else documented_only = false;
        }
    }
    void fill(CriterionResult& r) const {
        r.pass = ok;
        r.documented = !ok && documented_only && any_documented;
        r.detail = os.str();
    }
};

long scaled(long n, const ValidationOptions& o) { return std::max(256L, long(std::llround(n * o.scale))); }

// Feeds one ensemble into two observers.
template <class A, class B>
struct Both {
    A a;
    B b;
    int sample_every() const { return a.sample_every(); }
    void begin(long t) { a.begin(t); b.begin(t); }
    void sample(long s, double t, const cd* x) { a.sample(s, t, x); b.sample(s, t, x); }
    void end(bool f) { a.end(f); b.end(f); }
    void merge(const Both& o) { a.merge(o.a); b.merge(o.b); }
};

// Least-squares slope of y against x.
double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = double(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// ---- 1: Ornstein-Uhlenbeck benchmark

void criterion1(const ValidationOptions& opt, Checks& ck) {
    const double lambda = 1.0, Gamma = 1.0;
    model::OrnsteinUhlenbeck m{lambda, Gamma};
    IntegratorConfig ic;
    ic.dt = 1e-3;
    ic.t_end = 25.0;
    ic.trajectories = scaled(10000, opt);
    ic.seed = opt.seed + 1;
    ic.threads = opt.threads;
    const double burn = 5.0;
    const int every = 20;
    auto x = [](const cd* s) { return s[0].real(); };
    Both<TimeAverageObserver, StationaryCorrelationObserver> obs{
        TimeAverageObserver({[](const cd* s) { return cd(s[0].real() * s[0].real()); }}, burn, every),
        StationaryCorrelationObserver(x, ic.dt, every, burn, ic.t_end, 400)};
    Eigen::VectorXcd init = Eigen::VectorXcd::Zero(1);
    run_ensemble(m, ic, init, obs);

    const double var = obs.a.mean()[0].real(), se = obs.a.stderr_()[0].real();
    const double var_ref = Gamma * Gamma / (2 * lambda);
    ck.add("variance " + fmt("%.5f", var) + " +- " + fmt("%.5f", se) + " vs 0.5",
           std::abs(var - var_ref) < 3 * se && se <= 0.02 * var_ref);

    const std::vector<double> om{0.0, 0.5, 1.0, 2.0, 4.0};
    const auto sp = spectrum_estimate(obs.b.estimate(), om);
    for (std::size_t i = 0; i < om.size(); ++i) {
        const double ref = Gamma * Gamma / (lambda * lambda + om[i] * om[i]);
        const double v = sp.values[i], s = sp.stderr_[i];
        ck.add("S(" + fmt("%g", om[i]) + ")=" + fmt("%.5f", v) + "+-" + fmt("%.5f", s) + " vs " + fmt("%.5f", ref),
               std::abs(v - ref) < 3 * s && s <= 0.02 * ref);
    }
}

// ---- 2: closed form vs engine

void criterion2(const ValidationOptions& opt, Checks& ck) {
    std::mt19937_64 rng(opt.seed + 2);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    auto uni = [&](double a, double b) { return a + (b - a) * U(rng); };
    const SpectrumCase cases[] = {SpectrumCase::DopoBelow,  SpectrumCase::DopoAbove, SpectrumCase::OpoBelowJoint,
                                  SpectrumCase::TwinBeams,  SpectrumCase::TwoChannel, SpectrumCase::TtmDopo,
                                  SpectrumCase::InjectedDark, SpectrumCase::Family};
    for (SpectrumCase c : cases) {
        const auto quads = case_quadratures(c);
        double worst = 0.0;
        int done = 0, attempts = 0;
        while (done < 1000 && attempts < 20000) {
            ++attempts;
            CaseParams p;
            p.kappa = uni(0.3, 3.0);
            switch (c) {
            case SpectrumCase::DopoBelow:
            case SpectrumCase::OpoBelowJoint: p.sigma = uni(0.0, 0.95); break;
            case SpectrumCase::DopoAbove:
            case SpectrumCase::TwinBeams:
            case SpectrumCase::TtmDopo: p.sigma = uni(1.05, 4.0); break;
            case SpectrumCase::TwoChannel:
                p.sigma = U(rng) < 0.5 ? uni(0.0, 0.95) : uni(1.05, 4.0);
                p.r = uni(0.05, 0.95);
                break;
            case SpectrumCase::InjectedDark:
                p.sigma = uni(0.0, 0.9);
                p.phi_i = uni(0.0, PI);
                p.Ii = uni(0.01, 4.0);
                break;
            case SpectrumCase::Family: {
                p.f = 2 + int(U(rng) * 4);
                p.sigma = U(rng) < 0.5 ? uni(0.0, 0.95) : uni(1.05, 4.0);
                const int n = p.f / 2 + 1;
                p.r_l.assign(n, 1.0);
                for (int j = 0; j + 1 < n; ++j) p.r_l[j] = uni(0.05, 0.95);
                p.l = p.f - 2 * int(U(rng) * (n - 1));
                p.sin_parity = p.l > 0 && U(rng) < 0.5;
                break;
            }
            }
            const std::string q = quads[std::size_t(U(rng) * quads.size()) % quads.size()];
            const double w = uni(0.0, 10.0);
            double cf, eng;
            try {
                cf = closed_form_spectrum(c, p, q, w);
                const auto cs = case_setup(c, p, q);
                eng = linear_spectrum(cs.sys, cs.u, w).V;
            } catch (const std::domain_error&) {
                continue;  // outside the formula's domain; redraw
            }
            worst = std::max(worst, std::abs(cf - eng));
            ++done;
        }
        ck.add(to_string(c) + " n=" + std::to_string(done) + " max|dV|=" + fmt("%.2e", worst),
               done == 1000 && worst < 1e-10);
    }
}

// ---- 3: DOPO below threshold

void criterion3(const ValidationOptions&, Checks& ck) {
    CaseParams p;
    p.sigma = 0.5;
    const double vy = closed_form_spectrum(SpectrumCase::DopoBelow, p, "Y", 0.0);
    const auto cs = case_setup(SpectrumCase::DopoBelow, p, "Y");
    const double vy_eng = linear_spectrum(cs.sys, cs.u, 0.0).V;
    ck.add("V_Y(0.5,0)=" + fmt("%.15f", vy) + " engine " + fmt("%.15f", vy_eng),
           std::abs(vy - 1.0 / 9) < 1e-12 && std::abs(vy_eng - 1.0 / 9) < 1e-12);
    const auto csx = case_setup(SpectrumCase::DopoBelow, p, "X");
    double worst = 0, worst_eng = 0;
    for (int i = 0; i < 200; ++i) {
        const double w = 10.0 * i / 199;
        const double px = closed_form_spectrum(SpectrumCase::DopoBelow, p, "X", w) *
                          closed_form_spectrum(SpectrumCase::DopoBelow, p, "Y", w);
        const double pe = linear_spectrum(csx.sys, csx.u, w).V * linear_spectrum(cs.sys, cs.u, w).V;
        worst = std::max(worst, std::abs(px - 1));
        worst_eng = std::max(worst_eng, std::abs(pe - 1));
    }
    ck.add("max|V_X V_Y - 1| closed " + fmt("%.1e", worst) + " engine " + fmt("%.1e", worst_eng),
           worst < 1e-12 && worst_eng < 1e-12);
    p.sigma = 1.0;
    const double v1 = closed_form_spectrum(SpectrumCase::DopoBelow, p, "Y", 0.0);
    ck.add("V_Y(1,0)=" + fmt("%g", v1), v1 == 0.0);
}

// ---- 4: nonlinear 2tmDOPO

// Orientation from exp(2i theta) = b_-1 b_+1^+ / |...|. |theta| stays far below
// pi/2 at g = 1e-3, so the principal branch is continuous.
double orientation(const cd* s) { return 0.5 * std::arg(s[4] * s[3]); }

// Dark-mode quadrature of the co-rotating frame.
cd dark_quadrature(const cd* s, double phi) {
    const double th = orientation(s);
    const cd I(0, 1);
    const cd e = std::polar(1.0, th);
    const cd bd = I * (e * s[2] - std::conj(e) * s[4]) / std::sqrt(2.0);
    const cd bdp = -I * (std::conj(e) * s[3] - e * s[5]) / std::sqrt(2.0);
    return std::polar(1.0, -phi) * bd + std::polar(1.0, phi) * bdp;
}

// Weighted Gauss-Newton fit of y = u / (b + a u), u = (W/2)^2.
void fit_dark(const std::vector<double>& w, const std::vector<double>& y, const std::vector<double>& se,
              double& a, double& b) {
    a = 1.0;
    b = 1.0;
    for (int it = 0; it < 50; ++it) {
        Eigen::Matrix2d JtJ = Eigen::Matrix2d::Zero();
        Eigen::Vector2d Jtr = Eigen::Vector2d::Zero();
        for (std::size_t i = 0; i < w.size(); ++i) {
            const double u = 0.25 * w[i] * w[i], den = b + a * u;
            const double f = u / den;
            const Eigen::Vector2d J(-u * u / (den * den), -u / (den * den));
            const double wt = 1.0 / (se[i] * se[i]);
            JtJ += wt * J * J.transpose();
            Jtr += wt * J * (y[i] - f);
        }
        const Eigen::Vector2d d = JtJ.ldlt().solve(Jtr);
        a += d(0);
        b += d(1);
        if (d.norm() < 1e-12) break;
    }
}

void criterion4(const ValidationOptions& opt, Checks& ck) {
    const double sigma = std::sqrt(2.0), g = 1e-3;
    ModelConfig cfg;
    cfg.kind = ModelKind::TtmDopo;
    cfg.sigma = sigma;
    cfg.kappa = 1.0;
    cfg.g = g;
    Eigen::VectorXcd init;
    for (const auto& b : analytic_steady(cfg, 0.0))
        if (b.label == BranchLabel::On) init = to_doubled(b.state);

    IntegratorConfig ic;
    ic.dt = 3e-3;
    ic.t_end = 30.0;
    ic.trajectories = scaled(100000, opt);
    ic.seed = opt.seed + 4;
    ic.threads = opt.threads;
    const int every = 10;
    const long ns = ic.steps() / every + 1;
    const double burn = 10.0;
    const double h = ic.dt * every;
    const int max_lag = int(std::lround(8.0 / h));
    Both<TimeSeriesObserver, StationaryCorrelationObserver> obs{
        TimeSeriesObserver({[](const cd* s) { return cd(orientation(s)); },
                            [](const cd* s) { const double t = orientation(s); return cd(t * t); }},
                           ns, every),
        StationaryCorrelationObserver::complex_valued([](const cd* s) { return dark_quadrature(s, PI / 2); },
                                                      ic.dt, every, burn, ic.t_end, max_lag)};
    const auto st = run_model_ensemble(cfg, ic, init, obs);

    const auto od = orientation_diffusion(g, sigma);
    std::vector<double> tt, vv;
    const auto& acc = obs.a.real_parts();
    const auto& times = obs.a.times();
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < 5.0) continue;
        const double m1 = acc[0][i].mean, m2 = acc[1][i].mean;
        tt.push_back(times[i]);
        vv.push_back((m2 - m1 * m1) / od.D);
    }
    const double slope = ls_slope(tt, vv);
    ck.add("V_theta/(D tau) slope " + fmt("%.4f", slope) + " (failed " + std::to_string(st.failed) + ")",
           std::abs(slope - 1) < 0.02);

    // frequency grid at the resolution of the stationary record
    const auto corr = obs.b.estimate();
    const double dw = 2 * PI / corr.record_length;
    std::vector<double> om;
    for (int k = 0; k * dw <= 10.0 + 1e-9; ++k) om.push_back(k * dw);
    const auto sp = spectrum_estimate(corr, om);
    std::vector<double> V(om.size()), se(om.size());
    for (std::size_t i = 0; i < om.size(); ++i) {
        V[i] = output_variance(sp.values[i], g);
        se[i] = std::max(2.0 / (g * g) * sp.stderr_[i], 1e-6);
    }
    double a, b;
    fit_dark(om, V, se, a, b);
    ck.add("dark Y fit a=" + fmt("%.4f", a) + " b=" + fmt("%.4f", b),
           std::abs(a - 1) < 0.02 && std::abs(b - 1) < 0.05);
}

// ---- 5: pump clamping

void criterion5(const ValidationOptions& opt, Checks& ck) {
    const double g = 1e-3;
    ModelConfig cfg;
    cfg.kind = ModelKind::TwoChannel;
    cfg.sigma = 2.0;
    cfg.kappa = 1.0;
    cfg.r = 0.5;
    cfg.g = g;
    Eigen::VectorXcd init;
    for (const auto& b : analytic_steady(cfg))
        if (b.note == "mode1+") init = to_doubled(b.state);
    IntegratorConfig ic;
    ic.dt = 2e-3;
    ic.t_end = 40.0;
    ic.trajectories = scaled(40000, opt);
    ic.seed = opt.seed + 5;
    ic.threads = opt.threads;
    const int every = 10;
    const double burn = 10.0;
    const double h = ic.dt * every;
    Both<TimeAverageObserver, StationaryCorrelationObserver> obs{
        TimeAverageObserver({[](const cd* s) { return s[0]; }}, burn, every),
        StationaryCorrelationObserver::complex_valued(
            [](const cd* s) { return cd(0, -1) * s[4] + cd(0, 1) * s[5]; }, ic.dt, every, burn, ic.t_end,
            int(std::lround(8.0 / h)))};
    run_model_ensemble(cfg, ic, init, obs);
    const double bp = obs.a.mean()[0].real();
    ck.add("<b_p>=" + fmt("%.6f", bp), std::abs(bp - 1) < 0.01);
    const auto sp = spectrum_estimate(obs.b.estimate(), {0.0});
    const double V = output_variance(sp.values[0], g), se = 2.0 / (g * g) * sp.stderr_[0];
    ck.add("mode-2 V_Y(0)=" + fmt("%.4f", V) + "+-" + fmt("%.4f", se) + " vs 1/9",
           std::abs(V - 1.0 / 9) < 0.1 / 9);
}

// ---- 6: twin beams

void criterion6(const ValidationOptions&, Checks& ck) {
    const double pairs[5][2] = {{1.2, 0.5}, {1.5, 1.0}, {2.0, 2.0}, {3.0, 0.7}, {1.05, 5.0}};
    for (const auto& pk : pairs) {
        CaseParams p;
        p.sigma = pk[0];
        p.kappa = pk[1];
        const auto cs = case_setup(SpectrumCase::TwinBeams, p, "X-");
        double worst = 0;
        for (int i = 0; i <= 100; ++i) {
            const double w = 0.1 * i;
            worst = std::max(worst, std::abs(linear_spectrum(cs.sys, cs.u, w).V - w * w / (4 + w * w)));
        }
        ModelConfig cfg;
        cfg.kind = ModelKind::Opo;
        cfg.sigma = p.sigma;
        cfg.kappa = p.kappa;
        Eigen::VectorXcd st;
        for (const auto& b : analytic_steady(cfg, 0.0))
            if (b.label == BranchLabel::On) st = b.state;
        const auto rep = stability_matrix(cfg, st);
        double zl = rep.zero_modes.empty() ? 1.0 : 0.0;
        for (int k : rep.zero_modes) zl = std::max(zl, std::abs(rep.eigenvalues(k)));
        ck.add("(" + fmt("%g", p.sigma) + "," + fmt("%g", p.kappa) + ") max|dV|=" + fmt("%.1e", worst) +
                   " zero-mode |lambda|=" + fmt("%.1e", zl),
               worst < 1e-10 && rep.zero_modes.size() == 1 && zl < 1e-10 && rep.stable);
    }
}

// ---- 7: injected-signal bifurcations

void criterion7(const ValidationOptions& opt, Checks& ck) {
    for (double s : {0.5, 1.0, 1.5, 2.0, 3.0}) {
        ModelConfig cfg;
        cfg.kind = ModelKind::InjectedTtmDopo;
        cfg.sigma = s;
        cfg.inj_phase = 0.0;
        const double hi = 3 * (1 + s) + 4;
        const int n = 2000;
        const auto tab = bifurcation_scan(cfg, "Ix", 1e-4, hi, n);
        double found = kNaN, res = kNaN;
        for (const auto& e : tab.events)
            if (e.type == Bifurcation::Pitchfork) {
                found = e.control;
                // control resolution of the grid around the event
                for (std::size_t i = 1; i < tab.points.size(); ++i)
                    if (tab.points[i].param >= e.param) {
                        res = std::abs(tab.points[i].control - tab.points[i - 1].control);
                        break;
                    }
            }
        const double ref = 8 * (1 + s);
        ck.add("sigma=" + fmt("%g", s) + " PB scan " + fmt("%.6f", found) + " vs " + fmt("%g", ref),
               std::isfinite(found) && std::abs(found - ref) <= res);
    }
    for (double s : {1.0, 1.5, 2.0}) {
        const auto one = injected_one_mode(s, PI / 2, 1.0);
        ck.add("phi=pi/2 sigma=" + fmt("%g", s) + " Ii_PB=" + fmt("%.1e", one.Ii_PB),
               std::abs(one.Ii_PB) < 1e-9);
    }
    std::mt19937_64 rng(opt.seed + 7);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    double worst = 0;
    int roots = 0;
    for (int k = 0; k < 500; ++k) {
        const double s = 3 * U(rng), ph = PI * U(rng), Ii = 30 * U(rng) + 1e-3;
        for (const cd& X : poly_roots(injected_quintic(s, ph, Ii))) {
            if (!is_real_root(X) || X.real() < 1.0) continue;
            const double Ix = 2 * (X.real() - 1);
            worst = std::max(worst, std::abs(injected_intensity(s, ph, Ix) - Ii) / Ii);
            ++roots;
        }
    }
    ck.add("quintic resubstitution over " + std::to_string(roots) + " roots max rel " + fmt("%.1e", worst),
           roots > 0 && worst < 1e-9);
}

// ---- 8: actively locked OPO

std::vector<Bifurcation> lock_events(double sigma, double delta, int n = 4000) {
    ModelConfig cfg;
    cfg.kind = ModelKind::ActiveLockClassical;
    cfg.sigma = sigma;
    cfg.delta = delta;
    const auto tab = bifurcation_scan(cfg, "I", 1e-3, 2.5 + sigma, n);
    std::vector<Bifurcation> ev;
    for (const auto& e : tab.events) ev.push_back(e.type);
    return ev;
}

bool has(const std::vector<Bifurcation>& v, Bifurcation b) { return std::find(v.begin(), v.end(), b) != v.end(); }

std::string event_string(const std::vector<Bifurcation>& v) {
    std::string s;
    for (auto b : v) s += (s.empty() ? "" : ",") + to_string(b);
    return s.empty() ? "-" : s;
}

void criterion8(const ValidationOptions&, Checks& ck) {
    const double D = 0.6;
    // fold appearance: TP present above, absent below
    double lo = 1.9, hi = 2.2;
    for (int it = 0; it < 14; ++it) {
        const double mid = 0.5 * (lo + hi);
        (has(lock_events(mid, D), Bifurcation::TurningPoint) ? hi : lo) = mid;
    }
    const double fold = 0.5 * (lo + hi), fold_ref = 1 + std::sqrt(3.0) * D;
    ck.add("folds appear at sigma=" + fmt("%.5f", fold) + " vs " + fmt("%.5f", fold_ref),
           std::abs(fold - fold_ref) < 2e-3);
    lo = 2.1;
    hi = 2.4;
    for (int it = 0; it < 14; ++it) {
        const double mid = 0.5 * (lo + hi);
        (has(lock_events(mid, D), Bifurcation::Hopf) ? lo : hi) = mid;
    }
    const double hopf = 0.5 * (lo + hi), hopf_ref = 1 + 2 * D;
    ck.add("Hopf disappears at sigma=" + fmt("%.5f", hopf) + " vs " + fmt("%.5f", hopf_ref),
           std::abs(hopf - hopf_ref) < 5e-3);

    using B = Bifurcation;
    const std::pair<double, std::vector<B>> panels[] = {
        {0.5, {B::Pitchfork}},
        {1.98, {B::Hopf, B::Pitchfork}},
        {2.09, {B::Hopf, B::TurningPoint, B::TurningPoint, B::Pitchfork}},
        {2.8, {B::TurningPoint, B::TurningPoint, B::Pitchfork}}};
    for (const auto& [s, want] : panels) {
        const auto ev = lock_events(s, D);
        // branch count: symmetric solutions at the midpoint between the folds
        const auto res = active_lock(s, D, 1.0);
        int branches = 1;
        if (std::isfinite(res.I_minus)) {
            const double Im = 0.5 * (res.I_minus + res.I_plus);
            branches = int(active_lock(s, D, active_lock_injection(s, D, Im)).I.size());
        }
        const int want_branches = s > 1 + std::sqrt(3.0) * D ? 3 : 1;
        ck.add("sigma=" + fmt("%g", s) + " events " + event_string(ev) + " branches " + std::to_string(branches),
               ev == want && branches == want_branches);
    }
}

// ---- 9: Fock oracle vs positive-P

struct MomentCheck {
    std::string name;
    cd fock, sde, se;
};

void compare(Checks& ck, const std::vector<MomentCheck>& ms, const std::string& tag) {
    for (const auto& m : ms) {
        const double dr = std::abs(m.fock.real() - m.sde.real()), di = std::abs(m.fock.imag() - m.sde.imag());
        const bool ok = dr <= 3 * m.se.real() + 1e-12 && di <= 3 * m.se.imag() + 1e-12;
        ck.add(tag + " " + m.name + " fock " + fmt("%.5f", m.fock.real()) + " sde " + fmt("%.5f", m.sde.real()) +
                   "+-" + fmt("%.5f", m.se.real()),
               ok);
    }
}

void criterion9(const ValidationOptions& opt, Checks& ck) {
    {
        FockConfig fc;
        fc.gamma = 1.0;
        fc.kappa = 0.2;
        fc.E = 0.5;
        fc.truncation = {24};
        const auto spec = build_lindblad(fc);
        const auto rho = steady_state(spec);
        const cd a = normal_ordered_moment(rho, 0, 0, 1), a2 = normal_ordered_moment(rho, 0, 0, 2),
                 n = normal_ordered_moment(rho, 0, 1, 1);

        model::DrivenSqueezedCavity m{1.0, 0.2, 0.5, 0.0};
        IntegratorConfig ic;
        ic.dt = 2e-3;
        ic.t_end = 35.0;
        ic.trajectories = scaled(20000, opt);
        ic.seed = opt.seed + 9;
        ic.threads = opt.threads;
        TimeAverageObserver obs({[](const cd* s) { return s[0]; }, [](const cd* s) { return s[0] * s[0]; },
                                 [](const cd* s) { return s[1] * s[0]; }},
                                10.0, 5);
        // start at the classical fixed point E / (gamma - 2 kappa)
        Eigen::VectorXcd init = Eigen::VectorXcd::Constant(2, 0.5 / (1.0 - 0.4));
        run_ensemble(m, ic, init, obs);
        const auto mu = obs.mean(), se = obs.stderr_();
        compare(ck, {{"<a>", a, mu[0], se[0]}, {"<a^2>", a2, mu[1], se[1]}, {"<a+a>", n, mu[2], se[2]}}, "master");

        // trace drift over a long evolution
        const auto r1 = evolve(spec, fock_state(spec.dims, {0}), 50.0, 0.09 / spec.max_rate());
        const double drift = std::abs(r1.rho.trace() - 1.0);
        ck.add("trace drift " + fmt("%.1e", drift), drift < 1e-8);
    }
    {
        const double g = 0.5, sigma = 0.3;
        FockConfig fc;
        fc.model = FockModel::Dopo;
        fc.g = g;
        fc.kappa = 1.0;
        fc.sigma = sigma;
        fc.truncation = {9, 9};
        const auto spec = build_lindblad(fc);
        const auto rho = steady_state(spec);
        const cd ap = normal_ordered_moment(rho, 0, 0, 1), as2 = normal_ordered_moment(rho, 1, 0, 2),
                 ns = normal_ordered_moment(rho, 1, 1, 1);

        ModelConfig cfg;
        cfg.kind = ModelKind::DopoResonant;
        cfg.sigma = sigma;
        cfg.kappa = 1.0;
        cfg.g = g;
        IntegratorConfig ic;
        ic.dt = 2e-3;
        ic.t_end = 30.0;
        ic.trajectories = scaled(20000, opt);
        ic.seed = opt.seed + 99;
        ic.threads = opt.threads;
        // scaled amplitudes b = g a
        TimeAverageObserver obs({[g](const cd* s) { return s[0] / g; },
                                 [g](const cd* s) { return s[2] * s[2] / (g * g); },
                                 [g](const cd* s) { return s[3] * s[2] / (g * g); }},
                                5.0, 5);
        Eigen::VectorXcd init(4);
        init << sigma, sigma, 0.0, 0.0;
        run_model_ensemble(cfg, ic, init, obs);
        const auto mu = obs.mean(), se = obs.stderr_();
        compare(ck, {{"<a_p>", ap, mu[0], se[0]}, {"<a_s^2>", as2, mu[1], se[1]}, {"<a_s+a_s>", ns, mu[2], se[2]}},
                "dopo");
    }
}

// ---- 10: lattice limits

void criterion10(const ValidationOptions&, Checks& ck) {
    const int M = 3;
    const double N = M * M * M;
    auto grid = [](double T) {
        std::vector<double> t;
        for (int i = 0; i <= 30; ++i) t.push_back(T * i / 30);
        return t;
    };
    for (double xi : {1e-3, 1e3 * M}) {
        LatticeSpec s;
        s.M = M;
        s.xi = xi;
        s.dissipative_only = true;
        for (auto kind : {LatticeInitial::Mott, LatticeInitial::Superfluid}) {
            // the superfluid decays M^3 times faster in the Dicke limit
            const double T = (xi > 1 && kind == LatticeInitial::Superfluid) ? 3.0 / N : 3.0;
            const auto tg = grid(T);
            const auto r = evolve_bosons(s, kind, N, tg);
            double err = 0;
            for (std::size_t i = 0; i < tg.size(); ++i) {
                double ref;
                if (xi < 1) ref = n_total_independent(N, 1.0, tg[i]);
                else if (kind == LatticeInitial::Mott) ref = n_total_mott(N, M, 1.0, tg[i]);
                else ref = n_total_superfluid(N, M, 1.0, tg[i]);
                err = std::max(err, std::abs(r.n_T[i] - ref) / ref);
            }
            ck.add("xi=" + fmt("%g", xi) + (kind == LatticeInitial::Mott ? " Mott" : " SF") + " rel err " +
                       fmt("%.1e", err),
                   err < 1e-6, xi < 1);
        }
    }
    for (int m : {2, 3}) {
        double xc = kNaN;
        try {
            xc = critical_xi(m);
        } catch (const std::exception&) {
        }
        bool ok = std::isfinite(xc);
        if (ok) {
            LatticeSpec a, b;
            a.M = b.M = m;
            a.xi = 0.9 * xc;
            b.xi = 1.1 * xc;
            ok = initial_rate_derivative(a) * initial_rate_derivative(b) < 0;
        }
        ck.add("M^3=" + std::to_string(m * m * m) + " critical xi " + fmt("%.5f", xc), ok);
    }
    double worst = 0;
    for (double xi : {0.5, 1.0, 10.0}) {
        LatticeSpec s;
        s.M = M;
        s.xi = xi;
        std::vector<double> tg;
        const double h = 1e-4;
        for (int i = 0; i <= 4; ++i) tg.push_back(h * i);
        const auto r = evolve_hardcore(s, tg);
        // fourth-order one-sided difference
        const double num = (-25 * r.R[0] + 48 * r.R[1] - 36 * r.R[2] + 16 * r.R[3] - 3 * r.R[4]) / (12 * h);
        const double an = initial_rate_derivative(s);
        worst = std::max(worst, std::abs(num - an) / std::abs(an));
    }
    ck.add("initial slope max rel diff " + fmt("%.1e", worst), worst < 0.01);
}

// ---- 11: entanglement

void criterion11(const ValidationOptions&, Checks& ck) {
    bool mono = true;
    double e0 = 0;
    for (int i = 1; i <= 9; ++i) {
        const double l = 0.1 * i;
        double prev = -1;
        for (int k = 0; k <= 12; ++k) {
            const double E = added_subtracted(l, k, required_n_max(l, k)).entropy;
            if (k > 0 && !(E > prev)) mono = false;
            if (k == 0) e0 = std::max(e0, std::abs(E - tmsv_entropy(l)));
            prev = E;
        }
    }
    ck.add("E^(k) increasing in k", mono);
    // independent closed form of the geometric-distribution entropy
    double e0c = 0;
    for (int i = 1; i <= 9; ++i) {
        const double l = 0.1 * i, q = l * l;
        const double ref = -std::log(1 - q) - q / (1 - q) * std::log(q);
        e0c = std::max(e0c, std::abs(added_subtracted(l, 0, required_n_max(l, 0)).entropy - ref));
    }
    e0 = std::max(e0, e0c);
    ck.add("E^(0) closed form max diff " + fmt("%.1e", e0), e0 < 1e-9);
    double w = 0;
    for (double r : {0.0, 0.1, 0.5, 1.0, 2.0}) {
        const auto v = squeezing_variances(r, 0.7, true);
        w = std::max(w, std::abs(v.W - 2 * std::exp(-2 * r)));
    }
    ck.add("TMSV W max diff " + fmt("%.1e", w), w < 1e-12);
}

// ---- 12: cavity numbers

void criterion12(const ValidationOptions&, Checks& ck) {
    const double gam = cavity_decay_rate(0.01, 5e-3);
    ck.add("gamma=" + fmt("%.6e", gam) + " s^-1", std::abs(gam - 1.5e8) / 1.5e8 < 1e-3);
    CavityGeometry geo;
    geo.L = 5e-3;
    geo.R1 = geo.R2 = 5e-3;
    const double w0 = gaussian_mode_geometry(geo, 532e-9).w0;
    ck.add("confocal w0=" + fmt("%.4f", w0 * 1e6) + " um", std::abs(w0 - 20.6e-6) / 20.6e-6 < 0.01);
    PhysicalParams p;
    p.chi2 = 2.5e-12;
    p.P = 1.0;
    p.lambda0 = 1064e-9;
    p.geom.L = 5e-3;
    p.geom.nc = 2.0;
    p.geom.lc = p.geom.L / 10;
    p.geom.R1 = p.geom.R2 = p.geom.L_eff();
    p.geom.Ts = 0.01;
    p.geom.Tp = 0.1;
    const double g = physical_rates(p, 2 * PI * phys::c / 532e-9).g;
    ck.add("confocal g=" + fmt("%.3e", g), std::abs(g - 4e-6) / 4e-6 < 0.1);
}

}  // namespace

CriterionResult run_criterion(int id, const ValidationOptions& opt) {
    static const char* names[kCriterionCount] = {
        "OU benchmark",       "closed form vs engine", "DOPO below threshold", "2tmDOPO nonlinear",
        "pump clamping",      "twin beams",            "injected-signal bifurcations",
        "actively locked OPO", "Fock oracle",          "lattice limits",
        "entanglement",       "cavity numbers"};
    if (id < 1 || id > kCriterionCount) throw std::invalid_argument("run_criterion: id must be 1..12");
    CriterionResult r;
    r.id = id;
    r.name = names[id - 1];
    Checks ck;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        switch (id) {
        case 1: criterion1(opt, ck); break;
        case 2: criterion2(opt, ck); break;
        case 3: criterion3(opt, ck); break;
        case 4: criterion4(opt, ck); break;
        case 5: criterion5(opt, ck); break;
        case 6: criterion6(opt, ck); break;
        case 7: criterion7(opt, ck); break;
        case 8: criterion8(opt, ck); break;
        case 9: criterion9(opt, ck); break;
        case 10: criterion10(opt, ck); break;
        case 11: criterion11(opt, ck); break;
        case 12: criterion12(opt, ck); break;
        }
    } catch (const std::exception& e) {
        ck.add(std::string("exception: ") + e.what(), false);
    }
    ck.fill(r);
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

std::vector<CriterionResult> run_validation(const ValidationOptions& opt, const std::vector<int>& ids) {
    std::vector<int> todo = ids;
    if (todo.empty())
        for (int i = 1; i <= kCriterionCount; ++i) todo.push_back(i);
    std::vector<CriterionResult> out;
    for (int i : todo) out.push_back(run_criterion(i, opt));
    return out;
}

std::string status_word(const CriterionResult& r) {
    if (r.pass) return "PASS";
    return r.documented ? "FAIL (documented)" : "FAIL";
}

bool acceptable(const std::vector<CriterionResult>& rs) {
    for (const auto& r : rs)
        if (!r.pass && !r.documented) return false;
    return true;
}

}  // namespace opo
