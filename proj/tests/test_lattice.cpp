#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "opo/lattice.hpp"

using namespace opo;

namespace {

LatticeSpec spec(int M, double xi, bool diss = true) {
    LatticeSpec s;
    s.M = M;
    s.xi = xi;
    s.dissipative_only = diss;
    return s;
}

std::vector<double> grid(double T, int n) {
    std::vector<double> t;
    for (int i = 0; i <= n; ++i) t.push_back(T * i / n);
    return t;
}

}  // namespace

TEST_CASE("Markov couplings limits") {
    const auto s = spec(3, 1.0, false);
    CHECK(markov_couplings(s, 0.0).gamma == doctest::Approx(s.Gamma0));
    CHECK(std::abs(markov_couplings(spec(3, 1e-4), 1.0).gamma) < 1e-3);
    CHECK(markov_couplings(spec(3, 1e4), std::sqrt(12.0)).gamma == doctest::Approx(1.0).epsilon(1e-6));
    const auto m = markov_couplings(s, std::array<int, 3>{1, 1, 0});
    CHECK(m.gamma == doctest::Approx(m.Gamma.real()));
    CHECK(m.Lambda == doctest::Approx(m.Gamma.imag()));
    CHECK(std::abs(markov_couplings(s, 1.0).Gamma - markov_couplings(s, std::array<int, 3>{0, 0, -1}).Gamma) < 1e-15);
}

TEST_CASE("coupling matrix is symmetric and respects dissipative_only") {
    const auto G = coupling_matrix(spec(2, 0.7, false));
    CHECK(G.rows() == 8);
    CHECK((G - G.transpose()).cwiseAbs().maxCoeff() < 1e-14);
    const auto D = coupling_matrix(spec(2, 0.7, true));
    CHECK(D.imag().cwiseAbs().maxCoeff() == 0.0);
    CHECK((D.real() - G.real()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("spec validation") {
    CHECK_THROWS_AS(spec(0, 1).validate(), std::invalid_argument);
    CHECK_THROWS_AS(spec(2, 0).validate(), std::invalid_argument);
    auto s = spec(2, 1);
    s.Gamma0 = -1;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    CHECK(spec(3, 1).site(26) == std::array<int, 3>{2, 2, 2});
}

TEST_CASE("independent-emitter limit") {
    // The off-diagonal rates scale like xi, so xi = 1e-8 puts them below the tolerance.
    const auto s = spec(3, 1e-8);
    const auto tg = grid(3.0, 30);
    for (auto kind : {LatticeInitial::Mott, LatticeInitial::Superfluid}) {
        const auto r = evolve_bosons(s, kind, 27, tg);
        for (std::size_t i = 0; i < tg.size(); ++i)
            CHECK(r.n_T[i] == doctest::Approx(n_total_independent(27, 1, tg[i])).epsilon(1e-6));
    }
}

TEST_CASE("Dicke limit") {
    const auto s = spec(3, 3000);
    const auto sf = evolve_bosons(s, LatticeInitial::Superfluid, 27, grid(3.0 / 27, 30));
    for (std::size_t i = 0; i < sf.t.size(); ++i)
        CHECK(sf.n_T[i] == doctest::Approx(n_total_superfluid(27, 3, 1, sf.t[i])).epsilon(1e-6));
    const auto mott = evolve_bosons(s, LatticeInitial::Mott, 27, grid(3.0, 30));
    for (std::size_t i = 0; i < mott.t.size(); ++i)
        CHECK(mott.n_T[i] == doctest::Approx(n_total_mott(27, 3, 1, mott.t[i])).epsilon(1e-6));
    CHECK(mott.n_T.back() == doctest::Approx(26.0).epsilon(1e-6));
}

TEST_CASE("non-symmetric Fourier modes are dark in the Dicke limit") {
    const auto s = spec(3, 3e5);
    const int n = s.sites();
    Eigen::VectorXcd f(n);
    for (int j = 0; j < n; ++j) f(j) = std::polar(1.0 / std::sqrt(double(n)), 2 * M_PI * s.site(j)[0] / 3.0);
    const Eigen::MatrixXcd c0 = 5.0 * f * f.adjoint();
    const auto r = evolve_bosons(s, c0, grid(2.0, 10));
    for (double x : r.n_T) CHECK(x == doctest::Approx(5.0).epsilon(1e-6));
}

TEST_CASE("boson occupation never increases") {
    for (double xi : {0.3, 1.0, 4.0}) {
        for (bool diss : {true, false}) {
            const auto r = evolve_bosons(spec(3, xi, diss), LatticeInitial::Mott, 27, grid(2.0, 40));
            for (std::size_t i = 1; i < r.n_T.size(); ++i) CHECK(r.n_T[i] <= r.n_T[i - 1] + 1e-10);
            for (double R : r.R) CHECK(R >= -1e-10);
        }
    }
}

TEST_CASE("hard-core emission") {
    const auto tg = grid(0.3, 60);
    const auto ind = evolve_hardcore(spec(3, 0.01, false), tg);
    CHECK(ind.R[0] / (2 * 27) == doctest::Approx(1.0));
    CHECK(std::max_element(ind.R.begin(), ind.R.end()) - ind.R.begin() == 0);
    const auto burst = evolve_hardcore(spec(3, 10.0, false), tg);
    CHECK(burst.R[0] / (2 * 27) == doctest::Approx(1.0));
    CHECK(std::max_element(burst.R.begin(), burst.R.end()) - burst.R.begin() > 0);
}

TEST_CASE("initial rate derivative") {
    CHECK(initial_rate_derivative(spec(3, 1e-6)) == doctest::Approx(-4 * 27.0));
    CHECK(initial_rate_derivative(spec(3, 1e6)) == doctest::Approx(-4 * 27.0 * (1 - 26)).epsilon(1e-6));
    for (int M : {2, 3, 4, 5}) {
        const double xc = critical_xi(M);
        CHECK(initial_rate_derivative(spec(M, 0.95 * xc)) < 0);
        CHECK(initial_rate_derivative(spec(M, 1.05 * xc)) > 0);
    }
    const double h = 1e-4;
    for (double xi : {0.5, 2.0}) {
        const auto s = spec(3, xi, false);
        const auto r = evolve_hardcore(s, grid(4 * h, 4));
        const double num = (-25 * r.R[0] + 48 * r.R[1] - 36 * r.R[2] + 16 * r.R[3] - 3 * r.R[4]) / (12 * h);
        CHECK(num == doctest::Approx(initial_rate_derivative(s)).epsilon(0.01));
    }
}
