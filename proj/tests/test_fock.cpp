#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "opo/fock.hpp"

using namespace opo;

namespace {

FockConfig master(double gamma, double kappa, double E, double omega, int nmax) {
    FockConfig c;
    c.model = FockModel::MasterExample;
    c.gamma = gamma;
    c.kappa = kappa;
    c.E = E;
    c.omega = omega;
    c.truncation = {nmax};
    return c;
}

}  // namespace

TEST_CASE("states and operators") {
    const auto f = fock_state({3, 4}, {1, 2});
    CHECK(f.total_dim() == 12);
    CHECK(f.rho(1 * 4 + 2, 1 * 4 + 2) == cd(1.0));
    f.validate();
    const auto a = annihilation({5}, 0);
    for (int n = 1; n < 5; ++n) CHECK(std::abs(a(n - 1, n) - std::sqrt(double(n))) < 1e-15);
    const auto vac = fock_state({6}, {0});
    for (int m = 0; m < 3; ++m)
        for (int n = 0; n < 3; ++n)
            if (m + n > 0) CHECK(std::abs(normal_ordered_moment(vac, 0, m, n)) == 0.0);
    const auto coh = coherent_state(30, cd(0.8, -0.3));
    CHECK(normal_ordered_moment(coh, 0, 1, 1).real() == doctest::Approx(std::norm(cd(0.8, -0.3))).epsilon(1e-12));
    CHECK(std::abs(normal_ordered_moment(coh, 0, 0, 1) - cd(0.8, -0.3)) < 1e-12);
    TruncatedDensityMatrix bad = vac;
    bad.rho(0, 0) = 2.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("single photon decays as exp(-2 gamma t)") {
    const double gamma = 0.7;
    const auto spec = build_lindblad(master(gamma, 0, 0, 0, 4));
    auto rho = fock_state({5}, {1});
    for (double t : {0.5, 1.0, 2.0}) {
        const auto r = evolve(spec, fock_state({5}, {1}), t, 1e-3);
        CHECK(normal_ordered_moment(r, 0, 1, 1).real() == doctest::Approx(std::exp(-2 * gamma * t)).epsilon(1e-10));
        CHECK(r.min_eigenvalue() > -1e-7);
    }
}

TEST_CASE("zero rates give a vanishing generator") {
    const auto spec = build_lindblad(master(0, 0, 0, 0, 6));
    const auto rho = coherent_state(7, cd(0.5, 0.2));
    CHECK(spec.apply(rho.rho).cwiseAbs().maxCoeff() == 0.0);
    const auto r = evolve(spec, rho, 3.0, 0.01);
    CHECK((r.rho - rho.rho).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("driven lossy cavity relaxes to a coherent state") {
    const double gamma = 1.0, E = 0.6;
    const auto spec = build_lindblad(master(gamma, 0, E, 0, 15));
    const auto ss = steady_state(spec);
    const auto ref = coherent_state(16, cd(E / gamma));
    CHECK((ss.rho - ref.rho).cwiseAbs().maxCoeff() < 1e-8);
    ss.validate();
}

TEST_CASE("squeezed driven cavity mean field") {
    // Linear mean-field equations give <a> = E / (gamma - 2 kappa) on resonance.
    const auto spec = build_lindblad(master(1.0, 0.2, 0.5, 0.0, 25));
    const auto ss = steady_state(spec);
    CHECK(normal_ordered_moment(ss, 0, 0, 1).real() == doctest::Approx(0.5 / 0.6).epsilon(1e-8));
    CHECK(top_population(ss, 0) < 1e-8);
    CHECK(ss.min_eigenvalue() > -1e-7);
}

TEST_CASE("RK4 convergence order") {
    const auto spec = build_lindblad(master(1.0, 0.2, 0.5, 0.3, 8));
    const auto rho0 = fock_state({9}, {0});
    const double h = 0.05 / spec.max_rate();
    const auto ref = evolve(spec, rho0, 1.0, h / 16);
    const double e1 = (evolve(spec, rho0, 1.0, h).rho - ref.rho).cwiseAbs().maxCoeff();
    const double e2 = (evolve(spec, rho0, 1.0, h / 2).rho - ref.rho).cwiseAbs().maxCoeff();
    CHECK(e1 / e2 > 12.0);
    CHECK(e1 / e2 < 20.0);
    CHECK_THROWS_AS(evolve(spec, rho0, 1.0, 0.2 / spec.max_rate()), std::invalid_argument);
}

TEST_CASE("truncation leakage is reported") {
    const auto spec = build_lindblad(master(1.0, 0.0, 3.0, 0.0, 6));
    try {
        steady_state(spec);
        FAIL("expected leakage_error");
    } catch (const leakage_error& e) {
        CHECK(e.top_population > 1e-8);
    }
}

TEST_CASE("DOPO below threshold matches the linearized intracavity variances") {
    // Linearized positive-P: <:dY^2:> = -sigma / (1 + sigma), <:dX^2:> = sigma / (1 - sigma),
    // with Y = -i(a - a+); corrections are O(g^2).
    FockConfig c;
    c.model = FockModel::Dopo;
    c.sigma = 0.3;
    c.kappa = 1.0;
    c.g = 0.3;
    c.truncation = {12, 12};
    const auto ss = steady_state(build_lindblad(c));
    const cd a2 = normal_ordered_moment(ss, 1, 0, 2), n = normal_ordered_moment(ss, 1, 1, 1);
    const double y = -2 * a2.real() + 2 * n.real();
    const double x = 2 * a2.real() + 2 * n.real();
    CHECK(y == doctest::Approx(-c.sigma / (1 + c.sigma)).epsilon(0.05));
    CHECK(x == doctest::Approx(c.sigma / (1 - c.sigma)).epsilon(0.05));
    CHECK(normal_ordered_moment(ss, 0, 0, 1).real() == doctest::Approx(c.sigma / c.g).epsilon(0.05));
}

TEST_CASE("invalid Lindblad specifications") {
    FockConfig c = master(-1, 0, 0, 0, 3);
    CHECK_THROWS_AS(build_lindblad(c), std::invalid_argument);
    c = master(1, 0, 0, 0, 3);
    c.truncation = {3, 3};
    CHECK_THROWS_AS(build_lindblad(c), std::invalid_argument);
    LindbladSpec s = build_lindblad(master(1, 0, 0, 0, 3));
    s.rates = {-1.0};
    CHECK_THROWS_AS(s.apply(fock_state({4}, {0}).rho), std::invalid_argument);
}
