#include "opo/models.hpp"

#include <cmath>

namespace opo {

std::string to_string(ModelKind k) {
    switch (k) {
    case ModelKind::DopoResonant: return "dopo";
    case ModelKind::DopoDetuned: return "dopo-detuned";
    case ModelKind::DopoAdiabatic: return "dopo-adiabatic";
    case ModelKind::Opo: return "opo";
    case ModelKind::TwoChannel: return "two-channel";
    case ModelKind::TtmDopo: return "ttm-dopo";
    case ModelKind::InjectedTtmDopo: return "injected-ttm-dopo";
    case ModelKind::ActiveLockClassical: return "active-lock";
    case ModelKind::FamilyDopo: return "family-dopo";
    }
    return "unknown";
}

ModelKind model_kind_from_string(const std::string& s) {
    for (ModelKind k : {ModelKind::DopoResonant, ModelKind::DopoDetuned, ModelKind::DopoAdiabatic,
                        ModelKind::Opo, ModelKind::TwoChannel, ModelKind::TtmDopo,
                        ModelKind::InjectedTtmDopo, ModelKind::ActiveLockClassical,
                        ModelKind::FamilyDopo})
        if (to_string(k) == s) return k;
    throw std::invalid_argument("unknown model kind '" + s + "'");
}

std::vector<int> ModelConfig::family_l() const {
    std::vector<int> out;
    for (int l = f; l >= 0; l -= 2) out.push_back(l);
    return out;
}

void ModelConfig::validate() const {
    if (!(sigma >= 0)) throw std::invalid_argument("model: sigma must be >= 0");
    if (!(kappa > 0)) throw std::invalid_argument("model: kappa must be > 0");
    if (!(g >= 0)) throw std::invalid_argument("model: g must be >= 0");
    if (!(r > 0 && r <= 1)) throw std::invalid_argument("model: r must lie in (0, 1]");
    if (!(inj_intensity >= 0)) throw std::invalid_argument("model: injection intensity must be >= 0");
    if (!(lock_intensity >= 0)) throw std::invalid_argument("model: lock intensity must be >= 0");
    if (kind == ModelKind::FamilyDopo) {
        if (f < 0) throw std::invalid_argument("model: f must be >= 0");
        if (!r_l.empty()) {
            if (r_l.size() != family_l().size())
                throw std::invalid_argument("model: r_l needs one entry per l = f, f-2, ..., l0");
            for (double x : r_l)
                if (!(x > 0 && x <= 1)) throw std::invalid_argument("model: r_l must lie in (0, 1]");
            if (std::abs(r_l.back() - 1.0) > 1e-12)
                throw std::invalid_argument("model: r_l0 must equal 1");
        }
    }
}

int ModelConfig::dim() const {
    switch (kind) {
    case ModelKind::DopoResonant:
    case ModelKind::DopoDetuned: return 4;
    case ModelKind::DopoAdiabatic: return 2;
    case ModelKind::ActiveLockClassical: return 4;
    case ModelKind::FamilyDopo: {
        int d = 2;
        for (int l : family_l()) d += l == 0 ? 2 : 4;
        return d;
    }
    default: return 6;
    }
}

int ModelConfig::noise_count() const {
    switch (kind) {
    case ModelKind::DopoResonant:
    case ModelKind::DopoDetuned:
    case ModelKind::DopoAdiabatic: return 2;
    case ModelKind::ActiveLockClassical: return 0;
    case ModelKind::FamilyDopo: {
        int n = 0;
        for (int l : family_l()) n += l == 0 ? 2 : 4;
        return n;
    }
    default: return 4;
    }
}

AnyModel make_model(const ModelConfig& cfg) {
    cfg.validate();
    switch (cfg.kind) {
    case ModelKind::DopoResonant: return model::Dopo{cfg.sigma, cfg.kappa, cfg.g, 0.0};
    case ModelKind::DopoDetuned: return model::Dopo{cfg.sigma, cfg.kappa, cfg.g, cfg.delta};
    case ModelKind::DopoAdiabatic: return model::DopoAdiabatic{cfg.sigma, cfg.g};
    case ModelKind::Opo:
    case ModelKind::TtmDopo: return model::Opo{cfg.sigma, cfg.kappa, cfg.g};
    case ModelKind::TwoChannel: return model::TwoChannel{cfg.sigma, cfg.kappa, cfg.g, cfg.r};
    case ModelKind::InjectedTtmDopo:
        return model::InjectedTtmDopo{cfg.sigma, cfg.kappa, cfg.g,
                                      std::polar(std::sqrt(cfg.inj_intensity), cfg.inj_phase)};
    case ModelKind::ActiveLockClassical:
        return model::ActiveLock{cfg.sigma, cfg.delta, cfg.lock_intensity};
    case ModelKind::FamilyDopo: {
        model::Family m{cfg.sigma, cfg.kappa, cfg.g, cfg.family_l(), cfg.r_l};
        if (m.r.empty()) m.r.assign(m.l.size(), 1.0);
        m.dim_ = cfg.dim();
        m.noise_ = cfg.noise_count();
        return m;
    }
    }
    throw std::invalid_argument("make_model: unsupported kind");
}

static void check_dim(const ModelConfig& cfg, const Eigen::VectorXcd& s) {
    if (s.size() != cfg.dim())
        throw shape_error("state has dimension " + std::to_string(s.size()) + ", model " +
                          to_string(cfg.kind) + " expects " + std::to_string(cfg.dim()));
}

LangevinRhs langevin_rhs(const ModelConfig& cfg, const Eigen::VectorXcd& state) {
    check_dim(cfg, state);
    const AnyModel m = make_model(cfg);
    const int n = cfg.dim(), k = cfg.noise_count();
    LangevinRhs out;
    out.drift.resize(n);
    out.noise = Eigen::MatrixXcd::Zero(n, k);
    std::visit(
        [&](const auto& mm) {
            mm.drift(state.data(), out.drift.data());
            std::vector<double> w(k, 0.0);
            Eigen::VectorXcd col(n);
            for (int j = 0; j < k; ++j) {
                w.assign(k, 0.0);
                w[j] = 1.0;
                mm.noise_apply(state.data(), w.data(), col.data());
                out.noise.col(j) = col;
            }
        },
        m);
    return out;
}

Eigen::MatrixXcd drift_jacobian(const ModelConfig& cfg, const Eigen::VectorXcd& b) {
    check_dim(cfg, b);
    const int n = cfg.dim();
    Eigen::MatrixXcd J = Eigen::MatrixXcd::Zero(n, n);
    const double K = cfg.kappa;
    const cd I(0, 1);
    switch (cfg.kind) {
    case ModelKind::DopoResonant:
    case ModelKind::DopoDetuned: {
        const double D = cfg.kind == ModelKind::DopoDetuned ? cfg.delta : 0.0;
        J(0, 0) = -K; J(0, 2) = -K * b[2];
        J(1, 1) = -K; J(1, 3) = -K * b[3];
        J(2, 0) = b[3]; J(2, 2) = -(1.0 + I * D); J(2, 3) = b[0];
        J(3, 1) = b[2]; J(3, 2) = b[1]; J(3, 3) = -(1.0 - I * D);
        break;
    }
    case ModelKind::DopoAdiabatic: {
        const double c = 1.0 - 0.25 * cfg.g * cfg.g;
        J(0, 0) = -c - b[0] * b[1]; J(0, 1) = cfg.sigma - 0.5 * b[0] * b[0];
        J(1, 1) = -c - b[1] * b[0]; J(1, 0) = cfg.sigma - 0.5 * b[1] * b[1];
        break;
    }
    case ModelKind::Opo:
    case ModelKind::TtmDopo: {
        J(0, 0) = -K; J(0, 2) = -K * b[4]; J(0, 4) = -K * b[2];
        J(1, 1) = -K; J(1, 3) = -K * b[5]; J(1, 5) = -K * b[3];
        J(2, 2) = -1; J(2, 0) = b[5]; J(2, 5) = b[0];
        J(3, 3) = -1; J(3, 1) = b[4]; J(3, 4) = b[1];
        J(4, 4) = -1; J(4, 0) = b[3]; J(4, 3) = b[0];
        J(5, 5) = -1; J(5, 1) = b[2]; J(5, 2) = b[1];
        break;
    }
    case ModelKind::TwoChannel: {
        const double r = cfg.r;
        J(0, 0) = -K; J(0, 2) = -K * b[2]; J(0, 4) = -K * r * b[4];
        J(1, 1) = -K; J(1, 3) = -K * b[3]; J(1, 5) = -K * r * b[5];
        J(2, 2) = -1; J(2, 0) = b[3]; J(2, 3) = b[0];
        J(3, 3) = -1; J(3, 1) = b[2]; J(3, 2) = b[1];
        J(4, 4) = -1; J(4, 0) = r * b[5]; J(4, 5) = r * b[0];
        J(5, 5) = -1; J(5, 1) = r * b[4]; J(5, 4) = r * b[1];
        break;
    }
    case ModelKind::InjectedTtmDopo: {
        J(0, 0) = -K; J(0, 2) = -K * b[2]; J(0, 4) = -K * b[4];
        J(1, 1) = -K; J(1, 3) = -K * b[3]; J(1, 5) = -K * b[5];
        J(2, 2) = -1; J(2, 0) = b[3]; J(2, 3) = b[0];
        J(3, 3) = -1; J(3, 1) = b[2]; J(3, 2) = b[1];
        J(4, 4) = -1; J(4, 0) = b[5]; J(4, 5) = b[0];
        J(5, 5) = -1; J(5, 1) = b[4]; J(5, 4) = b[1];
        break;
    }
    case ModelKind::ActiveLockClassical: {
        const double s0 = cfg.sigma, D = cfg.delta;
        const cd s = b[0], sp = b[1], i = b[2], ip = b[3];
        J(0, 0) = -(1.0 + I * D) - i * ip; J(0, 2) = -s * ip; J(0, 3) = s0 - s * i;
        J(1, 1) = -(1.0 - I * D) - ip * i; J(1, 3) = -sp * i; J(1, 2) = s0 - sp * ip;
        J(2, 2) = -(1.0 - I * D) - s * sp; J(2, 0) = -i * sp; J(2, 1) = s0 - s * i;
        J(3, 3) = -(1.0 + I * D) - sp * s; J(3, 1) = -ip * s; J(3, 0) = s0 - sp * ip;
        break;
    }
    case ModelKind::FamilyDopo: {
        const auto ls = cfg.family_l();
        std::vector<double> rs = cfg.r_l;
        if (rs.empty()) rs.assign(ls.size(), 1.0);
        J(0, 0) = -K;
        J(1, 1) = -K;
        int k = 2;
        for (std::size_t j = 0; j < ls.size(); ++j) {
            const double r = rs[j];
            if (ls[j] == 0) {
                J(0, k) = -K * r * b[k];
                J(1, k + 1) = -K * r * b[k + 1];
                J(k, k) = -1; J(k, 0) = r * b[k + 1]; J(k, k + 1) = r * b[0];
                J(k + 1, k + 1) = -1; J(k + 1, 1) = r * b[k]; J(k + 1, k) = r * b[1];
                k += 2;
            } else {
                J(0, k) = -K * r * b[k + 2]; J(0, k + 2) = -K * r * b[k];
                J(1, k + 1) = -K * r * b[k + 3]; J(1, k + 3) = -K * r * b[k + 1];
                J(k, k) = -1; J(k, 0) = r * b[k + 3]; J(k, k + 3) = r * b[0];
                J(k + 1, k + 1) = -1; J(k + 1, 1) = r * b[k + 2]; J(k + 1, k + 2) = r * b[1];
                J(k + 2, k + 2) = -1; J(k + 2, 0) = r * b[k + 1]; J(k + 2, k + 1) = r * b[0];
                J(k + 3, k + 3) = -1; J(k + 3, 1) = r * b[k]; J(k + 3, k) = r * b[1];
                k += 4;
            }
        }
        break;
    }
    }
    return J;
}

Eigen::VectorXcd to_doubled(const Eigen::VectorXcd& c) {
    Eigen::VectorXcd d(2 * c.size());
    for (int j = 0; j < c.size(); ++j) {
        d(2 * j) = c(j);
        d(2 * j + 1) = std::conj(c(j));
    }
    return d;
}

Eigen::VectorXcd to_classical(const Eigen::VectorXcd& d) {
    if (d.size() % 2 != 0) throw shape_error("to_classical: odd doubled dimension");
    Eigen::VectorXcd c(d.size() / 2);
    for (int j = 0; j < c.size(); ++j) c(j) = d(2 * j);
    return c;
}

Eigen::VectorXcd classical_rhs(const ModelConfig& cfg, const Eigen::VectorXcd& classical) {
    ModelConfig c0 = cfg;
    c0.g = 0.0;
    const Eigen::VectorXcd d = to_doubled(classical);
    check_dim(c0, d);
    Eigen::VectorXcd a(d.size());
    std::visit([&](const auto& m) { m.drift(d.data(), a.data()); }, make_model(c0));
    return to_classical(a);
}

std::vector<int> branch_indices(const ModelConfig& cfg) {
    switch (cfg.kind) {
    case ModelKind::DopoAdiabatic:
    case ModelKind::ActiveLockClassical: return {};
    default: return {0, 1};
    }
}

}  // namespace opo
