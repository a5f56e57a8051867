#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace opo {

using cd = std::complex<double>;

enum class ModelKind {
    DopoResonant,
    DopoDetuned,
    DopoAdiabatic,
    Opo,
    TwoChannel,
    TtmDopo,
    InjectedTtmDopo,
    ActiveLockClassical,
    FamilyDopo
};

std::string to_string(ModelKind k);
ModelKind model_kind_from_string(const std::string& s);

// Thrown for state vectors whose length does not match the model.
class shape_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Parameters for every model kind; fields that a kind does not use are ignored.
struct ModelConfig {
    ModelKind kind = ModelKind::DopoResonant;
    double sigma = 0.0;
    double kappa = 1.0;
    double g = 0.0;
    double delta = 0.0;         // signal detuning (DopoDetuned, ActiveLockClassical)
    double r = 1.0;             // chi2 / chi1 (TwoChannel)
    std::vector<double> r_l;    // family ratios ordered l = f, f-2, ..., l0
    int f = 0;                  // family index (FamilyDopo)
    double inj_intensity = 0.0; // I_i (InjectedTtmDopo)
    double inj_phase = 0.0;     // phi_i (InjectedTtmDopo)
    double lock_intensity = 0.0;// script-I (ActiveLockClassical)

    void validate() const;
    // Doubled phase-space dimension.
    int dim() const;
    int noise_count() const;
    // Family l values f, f-2, ..., l0.
    std::vector<int> family_l() const;
};

// Concrete models. State layout is always (b_0, b_0+, b_1, b_1+, ...);
// noise is a vector of independent real Wiener increments.
namespace model {

// Principal-branch square root.
inline cd csqrt(cd z) { return std::sqrt(z); }

struct Dopo {
    double sigma, kappa, g, delta;
    static constexpr int Dim = 4, Noise = 2;
    int dim() const { return Dim; }
    int noise() const { return Noise; }
    void drift(const cd* b, cd* a) const {
        const cd p = b[0], pp = b[1], s = b[2], sp = b[3];
        a[0] = kappa * (sigma - p - 0.5 * s * s);
        a[1] = kappa * (sigma - pp - 0.5 * sp * sp);
        a[2] = -cd(1.0, delta) * s + p * sp;
        a[3] = -cd(1.0, -delta) * sp + pp * s;
    }
    void noise_apply(const cd* b, const double* w, cd* out) const {
        out[0] = 0.0;
        out[1] = 0.0;
        out[2] = g * csqrt(b[0]) * w[0];
        out[3] = g * csqrt(b[1]) * w[1];
    }
};

struct DopoAdiabatic {
    double sigma, g;
    static constexpr int Dim = 2, Noise = 2;
    int dim() const { return Dim; }
    int noise() const { return Noise; }
    void drift(const cd* b, cd* a) const {
        const cd s = b[0], sp = b[1];
        const double c = 1.0 - 0.25 * g * g;
        a[0] = -c * s + (sigma - 0.5 * s * s) * sp;
        a[1] = -c * sp + (sigma - 0.5 * sp * sp) * s;
    }
    void noise_apply(const cd* b, const double* w, cd* out) const {
        out[0] = g * csqrt(sigma - 0.5 * b[0] * b[0]) * w[0];
        out[1] = g * csqrt(sigma - 0.5 * b[1] * b[1]) * w[1];
    }
};

// Shared by the non-degenerate OPO and the two-transverse-mode DOPO:
// layout (0, 0+, +1, +1+, -1, -1+).
struct Opo {
    double sigma, kappa, g;
    static constexpr int Dim = 6, Noise = 4;
    int dim() const { return Dim; }
    int noise() const { return Noise; }
    void drift(const cd* b, cd* a) const {
        const cd p = b[0], pp = b[1], u = b[2], up = b[3], v = b[4], vp = b[5];
        a[0] = kappa * (sigma - p - u * v);
        a[1] = kappa * (sigma - pp - up * vp);
        a[2] = -u + p * vp;
        a[3] = -up + pp * v;
        a[4] = -v + p * up;
        a[5] = -vp + pp * u;
    }
    void noise_apply(const cd* b, const double* w, cd* out) const {
        constexpr double h = 0.70710678118654752440;
        const cd z(h * w[0], h * w[1]), zp(h * w[2], h * w[3]);
        const cd sp = g * csqrt(b[0]), spp = g * csqrt(b[1]);
        out[0] = 0.0;
        out[1] = 0.0;
        out[2] = sp * z;
        out[3] = spp * zp;
        out[4] = sp * std::conj(z);
        out[5] = spp * std::conj(zp);
    }
};

struct TwoChannel {
    double sigma, kappa, g, r;
    static constexpr int Dim = 6, Noise = 4;
    int dim() const { return Dim; }
    int noise() const { return Noise; }
    void drift(const cd* b, cd* a) const {
        const cd p = b[0], pp = b[1], x1 = b[2], x1p = b[3], x2 = b[4], x2p = b[5];
        a[0] = kappa * (sigma - p - 0.5 * x1 * x1 - 0.5 * r * x2 * x2);
        a[1] = kappa * (sigma - pp - 0.5 * x1p * x1p - 0.5 * r * x2p * x2p);
        a[2] = -x1 + p * x1p;
        a[3] = -x1p + pp * x1;
        a[4] = -x2 + r * p * x2p;
        a[5] = -x2p + r * pp * x2;
    }
    void noise_apply(const cd* b, const double* w, cd* out) const {
        const cd s = csqrt(b[0]), sp = csqrt(b[1]);
        const double sr = std::sqrt(r);
        out[0] = 0.0;
        out[1] = 0.0;
        out[2] = g * s * w[0];
        out[3] = g * sp * w[1];
        out[4] = g * sr * s * w[2];
        out[5] = g * sr * sp * w[3];
    }
};

// Cartesian layout (0, 0+, x, x+, y, y+); injection into x.
struct InjectedTtmDopo {
    double sigma, kappa, g;
    cd eps;  // sqrt(I_i) exp(i phi_i)
    static constexpr int Dim = 6, Noise = 4;
    int dim() const { return Dim; }
    int noise() const { return Noise; }
    void drift(const cd* b, cd* a) const {
        const cd p = b[0], pp = b[1], x = b[2], xp = b[3], y = b[4], yp = b[5];
        a[0] = kappa * (sigma - p - 0.5 * (x * x + y * y));
        a[1] = kappa * (sigma - pp - 0.5 * (xp * xp + yp * yp));
        a[2] = eps - x + p * xp;
        a[3] = std::conj(eps) - xp + pp * x;
        a[4] = -y + p * yp;
        a[5] = -yp + pp * y;
    }
    void noise_apply(const cd* b, const double* w, cd* out) const {
        const cd s = g * csqrt(b[0]), sp = g * csqrt(b[1]);
        out[0] = 0.0;
        out[1] = 0.0;
        out[2] = s * w[0];
        out[3] = sp * w[1];
        out[4] = s * w[2];
        out[5] = sp * w[3];
    }
};

// Layout (s, s+, i, i+); classical only, no noise.
struct ActiveLock {
    double sigma, delta, inj;  // inj = script-I
    static constexpr int Dim = 4, Noise = 0;
    int dim() const { return Dim; }
    int noise() const { return Noise; }
    void drift(const cd* b, cd* a) const {
        const cd s = b[0], sp = b[1], i = b[2], ip = b[3];
        const double e = std::sqrt(inj);
        a[0] = e - cd(1.0, delta) * s + (sigma - s * i) * ip;
        a[1] = e - cd(1.0, -delta) * sp + (sigma - sp * ip) * i;
        a[2] = e - cd(1.0, -delta) * i + (sigma - s * i) * sp;
        a[3] = e - cd(1.0, delta) * ip + (sigma - sp * ip) * s;
    }
    void noise_apply(const cd*, const double*, cd* out) const {
        for (int k = 0; k < Dim; ++k) out[k] = 0.0;
    }
};

// Layout (p, p+) followed, for each l in f, f-2, ..., l0, by
// (+l, +l+, -l, -l+) when l > 0 or (0, 0+) when l = 0.
struct Family {
    double sigma, kappa, g;
    std::vector<int> l;
    std::vector<double> r;
    int dim_ = 2, noise_ = 0;
    int dim() const { return dim_; }
    int noise() const { return noise_; }
    void drift(const cd* b, cd* a) const {
        const cd p = b[0], pp = b[1];
        cd sum = 0.0, sump = 0.0;
        int k = 2;
        for (std::size_t j = 0; j < l.size(); ++j) {
            const double rl = r[j];
            if (l[j] == 0) {
                const cd x = b[k], xp = b[k + 1];
                sum += 0.5 * rl * x * x;
                sump += 0.5 * rl * xp * xp;
                a[k] = -x + rl * p * xp;
                a[k + 1] = -xp + rl * pp * x;
                k += 2;
            } else {
                const cd u = b[k], up = b[k + 1], v = b[k + 2], vp = b[k + 3];
                sum += rl * u * v;
                sump += rl * up * vp;
                a[k] = -u + rl * p * vp;
                a[k + 1] = -up + rl * pp * v;
                a[k + 2] = -v + rl * p * up;
                a[k + 3] = -vp + rl * pp * u;
                k += 4;
            }
        }
        a[0] = kappa * (sigma - p - sum);
        a[1] = kappa * (sigma - pp - sump);
    }
    void noise_apply(const cd* b, const double* w, cd* out) const {
        constexpr double h = 0.70710678118654752440;
        out[0] = 0.0;
        out[1] = 0.0;
        const cd s = csqrt(b[0]), sp = csqrt(b[1]);
        int k = 2, n = 0;
        for (std::size_t j = 0; j < l.size(); ++j) {
            const double c = g * std::sqrt(r[j]);
            if (l[j] == 0) {
                out[k] = c * s * w[n];
                out[k + 1] = c * sp * w[n + 1];
                k += 2;
                n += 2;
            } else {
                const cd z(h * w[n], h * w[n + 1]), zp(h * w[n + 2], h * w[n + 3]);
                out[k] = c * s * z;
                out[k + 1] = c * sp * zp;
                out[k + 2] = c * s * std::conj(z);
                out[k + 3] = c * sp * std::conj(zp);
                k += 4;
                n += 4;
            }
        }
    }
};

}  // namespace model

using AnyModel = std::variant<model::Dopo, model::DopoAdiabatic, model::Opo, model::TwoChannel,
                              model::InjectedTtmDopo, model::ActiveLock, model::Family>;

AnyModel make_model(const ModelConfig& cfg);

struct LangevinRhs {
    Eigen::VectorXcd drift;
    Eigen::MatrixXcd noise;  // dim x noise_count, multiplies real unit noises
};

LangevinRhs langevin_rhs(const ModelConfig& cfg, const Eigen::VectorXcd& state);

// Doubled-space drift Jacobian d(drift)/d(state) (analytic).
Eigen::MatrixXcd drift_jacobian(const ModelConfig& cfg, const Eigen::VectorXcd& state);

// Classical amplitudes are the unstarred components; the doubled state
// is rebuilt with b+ = conj(b).
Eigen::VectorXcd to_doubled(const Eigen::VectorXcd& classical);
Eigen::VectorXcd to_classical(const Eigen::VectorXcd& doubled);

// Deterministic part restricted to b+ = conj(b), with the noise strength set
// to zero (no Stratonovich shift for the adiabatic DOPO).
Eigen::VectorXcd classical_rhs(const ModelConfig& cfg, const Eigen::VectorXcd& classical);

// Indices of the doubled-space components whose square root enters the
// noise matrix (pump amplitudes); empty when there is none.
std::vector<int> branch_indices(const ModelConfig& cfg);

}  // namespace opo
