#pragma once

#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "opo/models.hpp"
#include "opo/numeric.hpp"

namespace opo {

struct IntegratorConfig {
    double dt = 1e-3;
    double t_end = 10.0;
    int midpoint_iterations = 2;
    std::uint64_t seed = 1;
    long trajectories = 1000;
    double burn_in = 0.0;
    int threads = 0;  // 0: OPO_THREADS env var, else hardware concurrency

    void validate() const;
    long steps() const { return std::lround(t_end / dt); }
};

int default_thread_count();

// splitmix64 finaliser; used to derive independent stream keys.
std::uint64_t splitmix64(std::uint64_t x);

// xoshiro256** stream keyed by (seed, stream index).
class Rng {
public:
    Rng(std::uint64_t seed, std::uint64_t stream);

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform on [0, 1) with 0 remapped to the smallest positive double.
    double uniform() {
        double u = double(next() >> 11) * 0x1.0p-53;
        return u == 0.0 ? std::numeric_limits<double>::denorm_min() : u;
    }

    // n independent N(0, sd^2) values (Box-Muller, both branches used).
    void normals(double* out, int n, double sd) {
        int k = 0;
        while (k < n) {
            const double z = uniform(), z2 = uniform();
            const double rad = sd * std::sqrt(-2.0 * std::log(z));
            const double ang = 6.283185307179586477 * z2;
            out[k++] = rad * std::cos(ang);
            if (k < n) out[k++] = rad * std::sin(ang);
        }
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t s_[4];
};

// Real Wiener increment with variance dt.
double gaussian_increment(Rng& rng, double dt);
// Complex increment sqrt(dt) (n1 + i n2); <W W*> = 2 dt.
cd complex_increment(Rng& rng, double dt);

namespace model {

// dc = -lambda c dt + Gamma dW, carried as a one-component complex state.
struct OrnsteinUhlenbeck {
    double lambda, Gamma;
    static constexpr int Dim = 1, Noise = 1;
    int dim() const { return Dim; }
    int noise() const { return Noise; }
    void drift(const cd* b, cd* a) const { a[0] = -lambda * b[0]; }
    void noise_apply(const cd*, const double* w, cd* out) const { out[0] = Gamma * w[0]; }
};

// Positive-P equations of a driven cavity with a squeezing term
// (detuning omega, loss gamma, squeezing kappa, drive E; all real).
struct DrivenSqueezedCavity {
    double gamma, kappa, E, omega;
    static constexpr int Dim = 2, Noise = 2;
    int dim() const { return Dim; }
    int noise() const { return Noise; }
    void drift(const cd* b, cd* a) const {
        a[0] = E - cd(gamma, omega) * b[0] + 2.0 * kappa * b[1];
        a[1] = E - cd(gamma, -omega) * b[1] + 2.0 * kappa * b[0];
    }
    void noise_apply(const cd*, const double* w, cd* out) const {
        const double s = std::sqrt(2.0 * kappa);
        out[0] = s * w[0];
        out[1] = s * w[1];
    }
};

}  // namespace model

constexpr int kMaxDim = 64;

// One step of the semi-implicit midpoint scheme:
//   bt^(0) = b, bt^(k) = b + (dt A(bt^(k-1)) + B(bt^(k-1)) w) / 2, k = 1..p,
//   b <- b + dt A(bt^(p)) + B(bt^(p)) w.
// w holds real Wiener increments (variance dt each).
template <class M>
inline void semi_implicit_step(const M& m, cd* b, double dt, int p, const double* w) {
    const int n = m.dim();
    cd bt[kMaxDim], a[kMaxDim], nz[kMaxDim];
    for (int i = 0; i < n; ++i) bt[i] = b[i];
    for (int it = 0; it < p; ++it) {
        m.drift(bt, a);
        m.noise_apply(bt, w, nz);
        for (int i = 0; i < n; ++i) bt[i] = b[i] + 0.5 * (dt * a[i] + nz[i]);
    }
    m.drift(bt, a);
    m.noise_apply(bt, w, nz);
    for (int i = 0; i < n; ++i) b[i] += dt * a[i] + nz[i];
}

Eigen::VectorXcd semi_implicit_step(const ModelConfig& cfg, const Eigen::VectorXcd& state,
                                    double dt, int p, const std::vector<double>& w);

// Deterministic classical RK4 step on the doubled drift (no noise).
Eigen::VectorXcd rk4_drift_step(const ModelConfig& cfg, const Eigen::VectorXcd& state, double dt);

struct EnsembleStats {
    long trajectories = 0;
    long failed = 0;
};

// Raised when the failed-trajectory fraction reaches 1%.
class ensemble_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline bool finite_state(const cd* b, int n) {
    for (int i = 0; i < n; ++i)
        if (!std::isfinite(b[i].real()) || !std::isfinite(b[i].imag())) return false;
    return true;
}

// Observer contract used by run_ensemble:
//   int sample_every() const;
//   void begin(long traj);
//   void sample(long step, double t, const cd* state);
//   void end(bool failed);
//   void merge(const Obs& other);     // other holds later trajectories
// Trajectories are split into fixed chunks; each chunk is observed by a fresh
// copy of the prototype and chunks are merged in index order, so results do
// not depend on the number of threads.
template <class M, class Obs>
EnsembleStats run_ensemble(const M& m, const IntegratorConfig& cfg, const Eigen::VectorXcd& init,
                           Obs& obs, const std::vector<int>& branch = {}) {
    cfg.validate();
    if (init.size() != m.dim()) throw shape_error("run_ensemble: initial state dimension mismatch");
    if (m.dim() > kMaxDim) throw shape_error("run_ensemble: state dimension too large");
    const long N = cfg.trajectories;
    const long steps = cfg.steps();
    const int every = std::max(1, obs.sample_every());
    constexpr long chunk = 256;
    const long nchunks = (N + chunk - 1) / chunk;
    std::vector<Obs> parts(nchunks, obs);
    std::vector<long> fails(nchunks, 0);
    std::atomic<long> next{0};

    auto worker = [&]() {
        const int n = m.dim();
        const int nw = m.noise();
        std::vector<double> w(std::max(1, nw));
        cd b[kMaxDim];
        for (long c = next++; c < nchunks; c = next++) {
            Obs& o = parts[c];
            for (long tr = c * chunk; tr < std::min(N, (c + 1) * chunk); ++tr) {
                Rng rng(cfg.seed, std::uint64_t(tr));
                for (int i = 0; i < n; ++i) b[i] = init[i];
                o.begin(tr);
                o.sample(0, 0.0, b);
                bool failed = false;
                for (long s = 1; s <= steps; ++s) {
                    if (nw > 0) rng.normals(w.data(), nw, std::sqrt(cfg.dt));
                    double im_before[2] = {0, 0};
                    for (std::size_t k = 0; k < branch.size() && k < 2; ++k)
                        im_before[k] = b[branch[k]].imag();
                    semi_implicit_step(m, b, cfg.dt, cfg.midpoint_iterations, w.data());
                    for (std::size_t k = 0; k < branch.size() && k < 2; ++k) {
                        const cd z = b[branch[k]];
                        // principal-branch cut: negative real axis crossed
                        if (z.real() < 0 && (z.imag() > 0) != (im_before[k] > 0)) failed = true;
                    }
                    if (s % 64 == 0 || s == steps)
                        if (!finite_state(b, n)) failed = true;
                    if (failed) break;
                    if (s % every == 0) o.sample(s, s * cfg.dt, b);
                }
                o.end(failed);
                if (failed) ++fails[c];
            }
        }
    };
    int nt = cfg.threads > 0 ? cfg.threads : default_thread_count();
    nt = int(std::max<long>(1, std::min<long>(nt, nchunks)));
    if (nt == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    EnsembleStats st;
    st.trajectories = N;
    Obs merged = obs;
    for (long c = 0; c < nchunks; ++c) {
        merged.merge(parts[c]);
        st.failed += fails[c];
    }
    obs = std::move(merged);
    if (double(st.failed) >= 0.01 * double(N))
        throw ensemble_error("run_ensemble: " + std::to_string(st.failed) + " of " +
                             std::to_string(N) + " trajectories failed (non-finite or branch cut)");
    return st;
}

// Running mean / variance accumulator with exact merge.
struct MeanAcc {
    double n = 0, mean = 0, m2 = 0;
    void add(double x) {
        n += 1;
        const double d = x - mean;
        mean += d / n;
        m2 += d * (x - mean);
    }
    void merge(const MeanAcc& o) {
        if (o.n == 0) return;
        const double tot = n + o.n, d = o.mean - mean;
        mean += d * o.n / tot;
        m2 += o.m2 + d * d * n * o.n / tot;
        n = tot;
    }
    double variance() const { return n > 1 ? m2 / (n - 1) : 0.0; }
    double stderr_() const { return n > 1 ? std::sqrt(variance() / n) : 0.0; }
};

using Observable = std::function<cd(const cd*)>;

// Per-trajectory time average of each observable over t >= burn_in, then
// ensemble mean with standard error across trajectories (real and imaginary
// parts separately).
class TimeAverageObserver {
public:
    TimeAverageObserver(std::vector<Observable> obs, double burn_in, int sample_every);
    int sample_every() const { return every_; }
    void begin(long);
    void sample(long, double t, const cd* s);
    void end(bool failed);
    void merge(const TimeAverageObserver& o);

    std::vector<cd> mean() const;
    std::vector<cd> stderr_() const;
    long count() const { return long(re_.empty() ? 0 : re_[0].n); }

private:
    std::vector<Observable> obs_;
    double burn_;
    int every_;
    std::vector<cd> cur_;
    long ncur_ = 0;
    std::vector<MeanAcc> re_, im_;
};

// Ensemble mean of observables on the sampling grid (time-resolved).
class TimeSeriesObserver {
public:
    TimeSeriesObserver(std::vector<Observable> obs, long n_samples, int sample_every);
    int sample_every() const { return every_; }
    void begin(long) { idx_ = 0; buf_.clear(); }
    void sample(long, double t, const cd* s);
    void end(bool failed);
    void merge(const TimeSeriesObserver& o);

    // acc[k][i]: real part of observable k at sample i.
    const std::vector<std::vector<MeanAcc>>& real_parts() const { return re_; }
    const std::vector<double>& times() const { return t_; }

private:
    std::vector<Observable> obs_;
    int every_;
    long idx_ = 0;
    std::vector<double> t_;
    std::vector<double> buf_;
    std::vector<std::vector<MeanAcc>> re_;
};

struct CorrelationEstimate {
    std::vector<double> lags;
    std::vector<double> values;
    std::vector<double> stderr_;
    bool stationary = true;
    double record_length = 0;                      // tau range used for time origins
    std::vector<std::vector<double>> batches;      // batch means, [batch][lag]
    std::vector<double> batch_weights;             // trajectories per batch
};

// Stationary two-time correlation <x(t) x(t + lag)> of a real scalar
// observable, averaged over time origins t >= burn_in and trajectories.
// mean is subtracted before correlating.
class StationaryCorrelationObserver {
public:
    StationaryCorrelationObserver(std::function<double(const cd*)> x, double dt, int sample_every,
                                  double burn_in, double t_end, int max_lag, double mean = 0.0,
                                  int batches = 64);
    // Complex observable z (positive-P quadratures are complex on a single
    // trajectory): correlates Re[z(t) z(t + lag)].
    static StationaryCorrelationObserver complex_valued(std::function<cd(const cd*)> z, double dt,
                                                        int sample_every, double burn_in, double t_end,
                                                        int max_lag, int batches = 64);
    int sample_every() const { return every_; }
    void begin(long traj);
    void sample(long, double t, const cd* s);
    void end(bool failed);
    void merge(const StationaryCorrelationObserver& o);

    CorrelationEstimate estimate() const;

private:
    std::function<double(const cd*)> x_;
    std::function<cd(const cd*)> z_;
    double step_, burn_, tend_, mean_;
    int every_, max_lag_, nb_;
    long traj_ = 0;
    std::vector<double> rec_, rec_im_;
    std::vector<std::vector<double>> bsum_;
    std::vector<double> bcount_;
};

// Nonstationary correlation matrix <x(t_a) x(t_b)> on the sampling grid.
class TwoTimeObserver {
public:
    TwoTimeObserver(std::function<double(const cd*)> x, long n_samples, int sample_every);
    int sample_every() const { return every_; }
    void begin(long) { buf_.clear(); }
    void sample(long, double t, const cd* s);
    void end(bool failed);
    void merge(const TwoTimeObserver& o);

    Eigen::MatrixXd mean() const;
    Eigen::MatrixXd stderr_() const;
    const std::vector<double>& times() const { return t_; }

private:
    std::function<double(const cd*)> x_;
    int every_;
    long n_;
    std::vector<double> t_, buf_;
    double count_ = 0;
    Eigen::MatrixXd sum_, sum2_;
};

// Per-trajectory periodogram |int_{t0}^{t0+T} x e^{i Omega t} dt|^2 / T.
class WindowedSpectrumObserver {
public:
    WindowedSpectrumObserver(std::function<double(const cd*)> x, std::vector<double> omegas,
                             double t0, double window, int sample_every, double dt, double mean = 0);
    int sample_every() const { return every_; }
    void begin(long);
    void sample(long, double t, const cd* s);
    void end(bool failed);
    void merge(const WindowedSpectrumObserver& o);

    std::vector<double> mean() const;
    std::vector<double> stderr_() const;

private:
    std::function<double(const cd*)> x_;
    std::vector<double> om_;
    double t0_, T_, h_, mean_;
    int every_;
    std::vector<double> ts_, xs_;
    std::vector<MeanAcc> acc_;
};

enum class SpectrumMethod { Stationary, Windowed };

struct SpectrumEstimate {
    std::vector<double> omegas;
    std::vector<double> values;  // integral of C(lag) e^{-i Omega lag} over all lags
    std::vector<double> stderr_;
    SpectrumMethod method = SpectrumMethod::Stationary;
    double cutoff_lag = 0;  // lags beyond this were dropped (|C| < 3 stderr)
};

class resolution_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Trapezoidal cosine transform of a stationary correlation, truncated where
// |C| first drops below 3 standard errors. Standard errors from batch means.
SpectrumEstimate spectrum_estimate(const CorrelationEstimate& c, const std::vector<double>& omegas,
                                   bool truncate = true);

// V = 1 + (2 / g^2) S.
double output_variance(double S, double g);

}  // namespace opo

namespace opo {

// run_ensemble on the concrete model selected by a ModelConfig, with the
// model's branch-cut monitor enabled.
template <class Obs>
EnsembleStats run_model_ensemble(const ModelConfig& cfg, const IntegratorConfig& ic,
                                 const Eigen::VectorXcd& init, Obs& obs) {
    const auto br = branch_indices(cfg);
    return std::visit([&](const auto& m) { return run_ensemble(m, ic, init, obs, br); },
                      make_model(cfg));
}

}  // namespace opo
