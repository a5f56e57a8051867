#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "opo/sde.hpp"
#include "opo/steady.hpp"

using namespace opo;

namespace {

IntegratorConfig ou_config(long n, double t_end, double dt = 1e-2) {
    IntegratorConfig c;
    c.dt = dt;
    c.t_end = t_end;
    c.trajectories = n;
    c.seed = 77;
    c.threads = 1;
    return c;
}

Eigen::VectorXcd zero1() { return Eigen::VectorXcd::Zero(1); }

// Exact stationary variance of the discrete scheme applied to the OU process.
// The update is linear, b' = a b + c w, so var = c^2 dt / (1 - a^2).
double discrete_ou_variance(double dt) {
    const model::OrnsteinUhlenbeck m{1.0, 1.0};
    cd b[1] = {1.0};
    const double zero = 0.0, one = 1.0;
    semi_implicit_step(m, b, dt, 2, &zero);
    const double a = b[0].real();
    b[0] = 0.0;
    semi_implicit_step(m, b, dt, 2, &one);
    const double c = b[0].real();
    return c * c * dt / (1 - a * a);
}

}  // namespace

TEST_CASE("gaussian increments: moments and independence") {
    Rng rng(123, 0);
    const int n = 1000000;
    const double dt = 0.01;
    std::vector<double> x(n);
    for (auto& v : x) v = gaussian_increment(rng, dt);
    double m = 0, v2 = 0, lag = 0;
    for (int i = 0; i < n; ++i) m += x[i];
    m /= n;
    for (int i = 0; i < n; ++i) v2 += (x[i] - m) * (x[i] - m);
    v2 /= n - 1;
    for (int i = 1; i < n; ++i) lag += (x[i] - m) * (x[i - 1] - m);
    lag /= (n - 1) * v2;
    CHECK(std::abs(m) < 4 * std::sqrt(dt / n));
    CHECK(std::abs(v2 / dt - 1) < 0.01);
    CHECK(std::abs(lag) < 4 / std::sqrt(double(n)));

    double ww = 0;
    for (int i = 0; i < 200000; ++i) ww += std::norm(complex_increment(rng, dt));
    CHECK(ww / 200000 == doctest::Approx(2 * dt).epsilon(0.01));
}

TEST_CASE("streams are deterministic and distinct") {
    Rng a(9, 4), b(9, 4), c(9, 5), d(10, 4);
    bool diff_c = false, diff_d = false;
    for (int i = 0; i < 100; ++i) {
        const auto x = a.next();
        CHECK(x == b.next());
        diff_c |= x != c.next();
        diff_d |= x != d.next();
    }
    CHECK(diff_c);
    CHECK(diff_d);
    Rng u(1, 1);
    for (int i = 0; i < 10000; ++i) {
        const double v = u.uniform();
        CHECK(v > 0.0);
        CHECK(v < 1.0);
    }
}

TEST_CASE("integrator config validation") {
    IntegratorConfig c;
    c.dt = 0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = IntegratorConfig{};
    c.burn_in = c.t_end;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = IntegratorConfig{};
    c.midpoint_iterations = 0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("weak convergence of the stationary OU variance") {
    double prev = 0;
    for (int k = 0; k < 5; ++k) {
        const double dt = 0.2 / (1 << k);
        const double err = std::abs(discrete_ou_variance(dt) - 0.5);
        CHECK(err < dt);
        if (k > 0) CHECK(std::log2(prev / err) >= 0.9);
        prev = err;
    }
}

TEST_CASE("deterministic limit matches RK4") {
    ModelConfig cfg;
    cfg.kind = ModelKind::DopoResonant;
    cfg.sigma = 1.6;
    cfg.kappa = 0.8;
    Eigen::VectorXcd x0(4);
    x0 << cd(0.2, 0.1), cd(0.2, -0.1), cd(0.3, -0.2), cd(0.3, 0.2);
    Eigen::VectorXcd ref = x0;
    for (int i = 0; i < 20000; ++i) ref = rk4_drift_step(cfg, ref, 5e-4);
    for (double dt : {0.02, 0.01}) {
        Eigen::VectorXcd x = x0;
        const std::vector<double> w{0.0, 0.0};
        for (int i = 0; i < std::lround(10 / dt); ++i) x = semi_implicit_step(cfg, x, dt, 2, w);
        CHECK((x - ref).norm() < 2 * dt);
    }
}

TEST_CASE("classical fixed points are conserved at g = 0") {
    ModelConfig cfg;
    cfg.kind = ModelKind::TwoChannel;
    cfg.sigma = 2.0;
    cfg.r = 0.5;
    for (const auto& b : analytic_steady(cfg)) {
        Eigen::VectorXcd x = to_doubled(b.state);
        const Eigen::VectorXcd x0 = x;
        for (int i = 0; i < 1000; ++i) x = semi_implicit_step(cfg, x, 1e-2, 2, std::vector<double>(4, 0.3));
        CHECK((x - x0).norm() < 1e-10);
    }
}

TEST_CASE("OU stationary moments and correlation") {
    const model::OrnsteinUhlenbeck ou{1.0, 1.0};
    auto cfg = ou_config(2000, 30.0);
    cfg.burn_in = 5;
    TimeAverageObserver ta({[](const cd* s) { return s[0]; }, [](const cd* s) { return s[0] * s[0]; }}, 5.0, 1);
    run_ensemble(ou, cfg, zero1(), ta);
    const auto m = ta.mean(), e = ta.stderr_();
    CHECK(std::abs(m[0].real()) < 4 * e[0].real());
    const double vexact = discrete_ou_variance(cfg.dt);
    CHECK(std::abs(m[1].real() - vexact) < 4 * e[1].real());
    CHECK(std::abs(m[1].real() - 0.5) < 0.02);

    StationaryCorrelationObserver co([](const cd* s) { return s[0].real(); }, cfg.dt, 5, 5.0, cfg.t_end, 100);
    run_ensemble(ou, cfg, zero1(), co);
    const auto c = co.estimate();
    CHECK(c.values[0] == doctest::Approx(vexact).epsilon(0.03));
    for (int k : {20, 40, 80}) {
        const double expect = vexact * std::exp(-c.lags[k]);
        CHECK(std::abs(c.values[k] - expect) < 4 * c.stderr_[k] + 0.01 * expect);
    }
    const auto s = spectrum_estimate(c, {0.0, 1.0});
    CHECK(std::abs(s.values[0] - 1.0) < 4 * s.stderr_[0] + 0.02);
    CHECK(std::abs(s.values[1] - 0.5) < 4 * s.stderr_[1] + 0.02);
    CHECK_THROWS_AS(spectrum_estimate(c, {0.0, 1e-3}), resolution_error);
}

TEST_CASE("averages do not depend on the thread count") {
    const model::OrnsteinUhlenbeck ou{1.0, 1.0};
    auto cfg = ou_config(700, 2.0);
    std::vector<cd> ref;
    for (int t : {1, 2, 3}) {
        cfg.threads = t;
        TimeAverageObserver ta({[](const cd* s) { return s[0] * s[0]; }}, 0.5, 1);
        run_ensemble(ou, cfg, zero1(), ta);
        if (ref.empty())
            ref = ta.mean();
        else
            CHECK(ta.mean()[0] == ref[0]);
    }
}

TEST_CASE("Wiener phase two-time correlation") {
    const double D = 0.3;
    const model::OrnsteinUhlenbeck w{0.0, std::sqrt(D)};
    auto cfg = ou_config(4000, 4.0);
    TwoTimeObserver tt([](const cd* s) { return s[0].real(); }, 5, 100);
    run_ensemble(w, cfg, zero1(), tt);
    const auto m = tt.mean(), e = tt.stderr_();
    const auto& t = tt.times();
    for (int a = 1; a < 5; ++a)
        for (int b = 1; b < 5; ++b) CHECK(std::abs(m(a, b) - D * std::min(t[a], t[b])) < 4 * e(a, b));
}

TEST_CASE("DOPO at zero pump stays at the vacuum") {
    ModelConfig cfg;
    cfg.kind = ModelKind::DopoResonant;
    cfg.sigma = 0;
    cfg.g = 0.5;
    auto ic = ou_config(300, 5.0);
    TimeAverageObserver ta({[](const cd* s) { return s[3] * s[2]; }}, 0.0, 1);
    run_model_ensemble(cfg, ic, Eigen::VectorXcd::Zero(4), ta);
    CHECK(ta.mean()[0] == cd(0.0));
}

TEST_CASE("diverging trajectories abort the ensemble") {
    const model::OrnsteinUhlenbeck bad{-400.0, 1.0};
    auto cfg = ou_config(100, 10.0);
    TimeAverageObserver ta({[](const cd* s) { return s[0]; }}, 0.0, 1);
    CHECK_THROWS_AS(run_ensemble(bad, cfg, zero1(), ta), ensemble_error);
}

TEST_CASE("two-transverse-mode DOPO intensity approaches sigma - 1") {
    ModelConfig cfg;
    cfg.kind = ModelKind::TtmDopo;
    cfg.sigma = std::sqrt(2.0);
    cfg.kappa = 1;
    cfg.g = 1e-3;
    const auto br = analytic_steady(cfg);
    Eigen::VectorXcd init;
    for (const auto& b : br)
        if (b.label == BranchLabel::On) init = to_doubled(b.state);
    REQUIRE(init.size() == 6);
    auto ic = ou_config(256, 20.0, 5e-3);
    ic.threads = 0;
    TimeAverageObserver ta({[](const cd* s) { return s[3] * s[2]; }, [](const cd* s) { return s[5] * s[4]; }}, 5.0,
                           10);
    run_model_ensemble(cfg, ic, init, ta);
    const auto m = ta.mean(), e = ta.stderr_();
    for (int k = 0; k < 2; ++k) CHECK(std::abs(m[k].real() - (cfg.sigma - 1)) < 4 * e[k].real() + 1e-5);
}

TEST_CASE("output variance scaling") {
    CHECK(output_variance(0.0, 0.1) == 1.0);
    CHECK(output_variance(-0.5e-2, 0.1) == doctest::Approx(0.0));
}
