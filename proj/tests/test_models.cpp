#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "opo/models.hpp"
#include "opo/steady.hpp"

using namespace opo;

namespace {

ModelConfig config(ModelKind k, double sigma, double g = 0.0) {
    ModelConfig c;
    c.kind = k;
    c.sigma = sigma;
    c.g = g;
    c.kappa = 0.7;
    c.delta = 0.3;
    c.r = 0.6;
    c.f = 3;
    c.r_l = {0.8, 1.0};
    c.inj_intensity = 2.0;
    c.inj_phase = 0.4;
    c.lock_intensity = 1.5;
    return c;
}

const std::vector<ModelKind> kAll{ModelKind::DopoResonant, ModelKind::DopoDetuned, ModelKind::DopoAdiabatic,
                                  ModelKind::Opo, ModelKind::TwoChannel, ModelKind::TtmDopo,
                                  ModelKind::InjectedTtmDopo, ModelKind::ActiveLockClassical,
                                  ModelKind::FamilyDopo};

Eigen::VectorXcd random_state(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> N;
    Eigen::VectorXcd v(n);
    for (int i = 0; i < n; ++i) v(i) = cd(N(rng), N(rng));
    return v;
}

}  // namespace

TEST_CASE("DOPO drift and noise at the origin") {
    const auto c = config(ModelKind::DopoResonant, 1.3, 0.2);
    const auto rhs = langevin_rhs(c, Eigen::VectorXcd::Zero(4));
    CHECK(std::abs(rhs.drift(0) - cd(c.kappa * c.sigma)) < 1e-15);
    CHECK(std::abs(rhs.drift(1) - cd(c.kappa * c.sigma)) < 1e-15);
    CHECK(std::abs(rhs.drift(2)) == 0.0);
    CHECK(std::abs(rhs.drift(3)) == 0.0);
    CHECK(rhs.noise.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("dimension mismatch raises a shape error") {
    for (ModelKind k : kAll) {
        const auto c = config(k, 1.0);
        CHECK_THROWS_AS(langevin_rhs(c, Eigen::VectorXcd::Zero(c.dim() + 2)), shape_error);
    }
}

TEST_CASE("config validation and kind names") {
    for (ModelKind k : kAll) CHECK(model_kind_from_string(to_string(k)) == k);
    CHECK_THROWS_AS(model_kind_from_string("nope"), std::invalid_argument);
    auto c = config(ModelKind::TwoChannel, 1.0);
    c.r = 1.5;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = config(ModelKind::DopoResonant, -1.0);
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = config(ModelKind::FamilyDopo, 1.0);
    c.r_l = {1.0, 0.5};
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    CHECK(config(ModelKind::FamilyDopo, 1.0).dim() == 2 + 4 + 4);
    c.f = 2;
    c.r_l = {0.5, 1.0};
    CHECK(c.dim() == 2 + 4 + 2);
}

TEST_CASE("DOPO classical fixed points") {
    const auto c = config(ModelKind::DopoResonant, 2.0);
    Eigen::VectorXcd below(2), above(2);
    below << 2.0, 0.0;
    above << 1.0, std::sqrt(2.0);
    CHECK(classical_rhs(c, below).norm() < 1e-14);
    CHECK(classical_rhs(c, above).norm() < 1e-14);
}

TEST_CASE("analytic branches are zeros of the full drift") {
    for (ModelKind k : {ModelKind::TwoChannel, ModelKind::TtmDopo, ModelKind::Opo, ModelKind::FamilyDopo,
                        ModelKind::DopoDetuned}) {
        const auto c = config(k, 2.5, 1e-3);
        for (const auto& b : analytic_steady(c)) {
            const auto rhs = langevin_rhs(c, to_doubled(b.state));
            CHECK(rhs.drift.norm() < 1e-12);
        }
    }
}

TEST_CASE("active-lock symmetric point solves the classical equations") {
    auto c = config(ModelKind::ActiveLockClassical, 2.0);
    c.delta = 0.6;
    for (double I : {0.2, 0.9, 2.4}) {
        c.lock_intensity = active_lock_injection(c.sigma, c.delta, I);
        CHECK(classical_rhs(c, active_lock_state(c.sigma, c.delta, I)).norm() < 1e-10);
    }
}

TEST_CASE("drift is conjugation symmetric on classical states") {
    std::mt19937_64 rng(11);
    for (ModelKind k : kAll) {
        const auto c = config(k, 1.7);
        for (int t = 0; t < 20; ++t) {
            const Eigen::VectorXcd cl = random_state(c.dim() / 2, rng);
            const Eigen::VectorXcd d = langevin_rhs(c, to_doubled(cl)).drift;
            for (int j = 0; j < c.dim(); j += 2) CHECK(std::abs(d(j + 1) - std::conj(d(j))) < 1e-12);
            const Eigen::VectorXcd cr = classical_rhs(c, cl);
            if (k != ModelKind::DopoAdiabatic) CHECK((cr - to_classical(d)).norm() < 1e-12);
        }
    }
}

TEST_CASE("analytic Jacobian agrees with central differences") {
    std::mt19937_64 rng(5);
    for (ModelKind k : kAll) {
        for (int t = 0; t < 100; ++t) {
            auto c = config(k, 0.5 + 2.0 * std::uniform_real_distribution<double>()(rng), 0.1);
            const Eigen::VectorXcd x = random_state(c.dim(), rng);
            const Eigen::MatrixXcd J = drift_jacobian(c, x);
            const double h = 1e-6;
            for (int j = 0; j < c.dim(); ++j) {
                Eigen::VectorXcd xp = x, xm = x;
                xp(j) += h;
                xm(j) -= h;
                const Eigen::VectorXcd col = (langevin_rhs(c, xp).drift - langevin_rhs(c, xm).drift) / (2 * h);
                CHECK((col - J.col(j)).cwiseAbs().maxCoeff() < 1e-6 * (1 + J.col(j).cwiseAbs().maxCoeff()));
            }
        }
    }
}

TEST_CASE("noise matrices reproduce the diffusion structure") {
    std::mt19937_64 rng(9);
    const double g = 0.3;
    SUBCASE("DOPO") {
        const auto c = config(ModelKind::DopoResonant, 1.0, g);
        const Eigen::VectorXcd x = random_state(4, rng);
        const Eigen::MatrixXcd B = langevin_rhs(c, x).noise;
        const Eigen::MatrixXcd D = B * B.transpose();
        CHECK(std::abs(D(2, 2) - g * g * x(0)) < 1e-12);
        CHECK(std::abs(D(3, 3) - g * g * x(1)) < 1e-12);
        CHECK(std::abs(D(2, 3)) < 1e-15);
        CHECK(D.topRows(2).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("OPO cross diffusion") {
        const auto c = config(ModelKind::Opo, 1.0, g);
        const Eigen::VectorXcd x = random_state(6, rng);
        const Eigen::MatrixXcd D = [&] { const auto B = langevin_rhs(c, x).noise; return Eigen::MatrixXcd(B * B.transpose()); }();
        CHECK(std::abs(D(2, 4) - g * g * x(0)) < 1e-12);
        CHECK(std::abs(D(3, 5) - g * g * x(1)) < 1e-12);
        CHECK(std::abs(D(2, 2)) < 1e-12);
        CHECK(std::abs(D(4, 4)) < 1e-12);
        CHECK(std::abs(D(2, 3)) < 1e-12);
    }
    SUBCASE("two-channel") {
        const auto c = config(ModelKind::TwoChannel, 1.0, g);
        const Eigen::VectorXcd x = random_state(6, rng);
        const auto B = langevin_rhs(c, x).noise;
        const Eigen::MatrixXcd D = B * B.transpose();
        CHECK(std::abs(D(4, 4) - c.r * g * g * x(0)) < 1e-12);
        CHECK(std::abs(D(2, 2) - g * g * x(0)) < 1e-12);
    }
}

TEST_CASE("adiabatic DOPO carries the Stratonovich shift") {
    const double g = 0.4;
    auto c = config(ModelKind::DopoAdiabatic, 0.0, g);
    Eigen::VectorXcd x(2);
    x << cd(0.3, 0.1), cd(-0.2, 0.5);
    const auto d = langevin_rhs(c, x).drift;
    const cd s = x(0), sp = x(1);
    CHECK(std::abs(d(0) - (-(1 - g * g / 4) * s - 0.5 * s * s * sp)) < 1e-15);
}

TEST_CASE("two-transverse-mode DOPO is rotation invariant") {
    std::mt19937_64 rng(2);
    const auto c = config(ModelKind::TtmDopo, 1.4);
    for (int t = 0; t < 50; ++t) {
        const Eigen::VectorXcd x = random_state(6, rng);
        const double th = std::uniform_real_distribution<double>(-M_PI, M_PI)(rng);
        Eigen::VectorXcd y = x;
        const cd e = std::polar(1.0, th);
        y(2) *= std::conj(e);
        y(3) *= e;
        y(4) *= e;
        y(5) *= std::conj(e);
        const auto dx = langevin_rhs(c, x).drift, dy = langevin_rhs(c, y).drift;
        CHECK(dx.norm() == doctest::Approx(dy.norm()).epsilon(1e-12));
        CHECK(std::abs(dy(2) - std::conj(e) * dx(2)) < 1e-12);
        CHECK(std::abs(dy(0) - dx(0)) < 1e-12);
    }
}

TEST_CASE("doubled and classical conversions") {
    Eigen::VectorXcd v(2);
    v << cd(1, 2), cd(-3, 0.5);
    const auto d = to_doubled(v);
    REQUIRE(d.size() == 4);
    CHECK(d(1) == std::conj(v(0)));
    CHECK((to_classical(d) - v).norm() == 0.0);
    CHECK(branch_indices(config(ModelKind::DopoResonant, 1)) == std::vector<int>{0, 1});
    CHECK(branch_indices(config(ModelKind::ActiveLockClassical, 1)).empty());
}
