#include "opo/sde.hpp"

#include <algorithm>
#include <cstdlib>

namespace opo {

void IntegratorConfig::validate() const {
    if (!(dt > 0)) throw std::invalid_argument("integrator: dt must be positive");
    if (!(t_end > burn_in) || !(burn_in >= 0))
        throw std::invalid_argument("integrator: need t_end > burn_in >= 0");
    if (midpoint_iterations < 1) throw std::invalid_argument("integrator: midpoint iterations must be >= 1");
    if (trajectories < 1) throw std::invalid_argument("integrator: trajectories must be >= 1");
}

int default_thread_count() {
    if (const char* e = std::getenv("OPO_THREADS")) {
        int n = std::atoi(e);
        if (n > 0) return n;
    }
    unsigned h = std::thread::hardware_concurrency();
    return h == 0 ? 1 : int(h);
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t k = splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL);
    for (auto& s : s_) {
        k = splitmix64(k);
        s = k;
    }
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
}

double gaussian_increment(Rng& rng, double dt) {
    double w;
    rng.normals(&w, 1, std::sqrt(dt));
    return w;
}

cd complex_increment(Rng& rng, double dt) {
    double w[2];
    rng.normals(w, 2, std::sqrt(dt));
    return {w[0], w[1]};
}

Eigen::VectorXcd semi_implicit_step(const ModelConfig& cfg, const Eigen::VectorXcd& state,
                                    double dt, int p, const std::vector<double>& w) {
    if (state.size() != cfg.dim()) throw shape_error("semi_implicit_step: state dimension mismatch");
    if (int(w.size()) != cfg.noise_count()) throw shape_error("semi_implicit_step: noise count mismatch");
    if (p < 1) throw std::invalid_argument("semi_implicit_step: p must be >= 1");
    Eigen::VectorXcd b = state;
    std::visit([&](const auto& m) { semi_implicit_step(m, b.data(), dt, p, w.data()); },
               make_model(cfg));
    return b;
}

Eigen::VectorXcd rk4_drift_step(const ModelConfig& cfg, const Eigen::VectorXcd& s, double dt) {
    const AnyModel m = make_model(cfg);
    auto f = [&](const Eigen::VectorXcd& x) {
        Eigen::VectorXcd a(x.size());
        std::visit([&](const auto& mm) { mm.drift(x.data(), a.data()); }, m);
        return a;
    };
    Eigen::VectorXcd k1 = f(s), k2 = f(s + 0.5 * dt * k1), k3 = f(s + 0.5 * dt * k2),
                     k4 = f(s + dt * k3);
    return s + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// ---- TimeAverageObserver

TimeAverageObserver::TimeAverageObserver(std::vector<Observable> obs, double burn_in, int every)
    : obs_(std::move(obs)), burn_(burn_in), every_(every), cur_(obs_.size()),
      re_(obs_.size()), im_(obs_.size()) {}

void TimeAverageObserver::begin(long) {
    std::fill(cur_.begin(), cur_.end(), cd(0.0));
    ncur_ = 0;
}

void TimeAverageObserver::sample(long, double t, const cd* s) {
    if (t < burn_ - 1e-12) return;
    for (std::size_t k = 0; k < obs_.size(); ++k) cur_[k] += obs_[k](s);
    ++ncur_;
}

void TimeAverageObserver::end(bool failed) {
    if (failed || ncur_ == 0) return;
    for (std::size_t k = 0; k < obs_.size(); ++k) {
        re_[k].add(cur_[k].real() / double(ncur_));
        im_[k].add(cur_[k].imag() / double(ncur_));
    }
}

void TimeAverageObserver::merge(const TimeAverageObserver& o) {
    for (std::size_t k = 0; k < re_.size(); ++k) {
        re_[k].merge(o.re_[k]);
        im_[k].merge(o.im_[k]);
    }
}

std::vector<cd> TimeAverageObserver::mean() const {
    std::vector<cd> out;
    for (std::size_t k = 0; k < re_.size(); ++k) out.emplace_back(re_[k].mean, im_[k].mean);
    return out;
}

std::vector<cd> TimeAverageObserver::stderr_() const {
    std::vector<cd> out;
    for (std::size_t k = 0; k < re_.size(); ++k) out.emplace_back(re_[k].stderr_(), im_[k].stderr_());
    return out;
}

// ---- TimeSeriesObserver

TimeSeriesObserver::TimeSeriesObserver(std::vector<Observable> obs, long n_samples, int every)
    : obs_(std::move(obs)), every_(every),
      re_(obs_.size(), std::vector<MeanAcc>(n_samples)) {}

void TimeSeriesObserver::sample(long, double t, const cd* s) {
    const long n = long(re_.empty() ? 0 : re_[0].size());
    if (idx_ >= n) return;
    if (long(t_.size()) <= idx_) t_.push_back(t);
    for (auto& o : obs_) buf_.push_back(o(s).real());
    ++idx_;
}

void TimeSeriesObserver::end(bool failed) {
    if (failed) return;
    const std::size_t K = obs_.size();
    for (long i = 0; i < idx_; ++i)
        for (std::size_t k = 0; k < K; ++k) re_[k][i].add(buf_[i * K + k]);
}

void TimeSeriesObserver::merge(const TimeSeriesObserver& o) {
    if (t_.size() < o.t_.size()) t_ = o.t_;
    for (std::size_t k = 0; k < re_.size(); ++k)
        for (std::size_t i = 0; i < re_[k].size(); ++i) re_[k][i].merge(o.re_[k][i]);
}

// ---- StationaryCorrelationObserver

StationaryCorrelationObserver::StationaryCorrelationObserver(std::function<double(const cd*)> x,
                                                             double dt, int every, double burn_in,
                                                             double t_end, int max_lag,
                                                             double mean, int batches)
    : x_(std::move(x)), step_(dt * every), burn_(burn_in), tend_(t_end), mean_(mean),
      every_(every), max_lag_(max_lag), nb_(batches),
      bsum_(batches, std::vector<double>(max_lag + 1, 0.0)), bcount_(batches, 0.0) {
    if (max_lag < 1) throw std::invalid_argument("correlation: max_lag must be >= 1");
    if (double(max_lag) * step_ >= t_end - burn_in)
        throw std::range_error("correlation: lag beyond record length");
}

StationaryCorrelationObserver StationaryCorrelationObserver::complex_valued(
    std::function<cd(const cd*)> z, double dt, int every, double burn_in, double t_end, int max_lag,
    int batches) {
    StationaryCorrelationObserver o(nullptr, dt, every, burn_in, t_end, max_lag, 0.0, batches);
    o.z_ = std::move(z);
    return o;
}

void StationaryCorrelationObserver::begin(long traj) {
    traj_ = traj;
    rec_.clear();
    rec_im_.clear();
}

void StationaryCorrelationObserver::sample(long, double t, const cd* s) {
    if (t < burn_ - 1e-9 || t > tend_ + 1e-9) return;
    if (z_) {
        const cd v = z_(s);
        rec_.push_back(v.real());
        rec_im_.push_back(v.imag());
    } else {
        rec_.push_back(x_(s) - mean_);
    }
}

void StationaryCorrelationObserver::end(bool failed) {
    if (failed) return;
    const long n = long(rec_.size());
    if (n <= max_lag_) return;
    auto& bs = bsum_[traj_ % nb_];
    const double* x = rec_.data();
    const double* y = rec_im_.empty() ? nullptr : rec_im_.data();
    for (int k = 0; k <= max_lag_; ++k) {
        double acc = 0.0;
        const long m = n - k;
        for (long i = 0; i < m; ++i) acc += x[i] * x[i + k];
        if (y)
            for (long i = 0; i < m; ++i) acc -= y[i] * y[i + k];
        bs[k] += acc / double(m);
    }
    bcount_[traj_ % nb_] += 1.0;
}

void StationaryCorrelationObserver::merge(const StationaryCorrelationObserver& o) {
    for (int b = 0; b < nb_; ++b) {
        for (int k = 0; k <= max_lag_; ++k) bsum_[b][k] += o.bsum_[b][k];
        bcount_[b] += o.bcount_[b];
    }
}

static void batch_stats(const std::vector<std::vector<double>>& bmean, const std::vector<double>& w,
                        std::vector<double>& mean, std::vector<double>& se) {
    const std::size_t L = bmean.empty() ? 0 : bmean[0].size();
    mean.assign(L, 0.0);
    se.assign(L, 0.0);
    double W = 0, nb = 0;
    for (double x : w) {
        W += x;
        if (x > 0) nb += 1;
    }
    if (W == 0) return;
    for (std::size_t b = 0; b < bmean.size(); ++b)
        for (std::size_t k = 0; k < L; ++k) mean[k] += w[b] * bmean[b][k] / W;
    if (nb < 2) return;
    for (std::size_t k = 0; k < L; ++k) {
        double v = 0;
        for (std::size_t b = 0; b < bmean.size(); ++b) {
            const double d = bmean[b][k] - mean[k];
            v += w[b] * w[b] * d * d;
        }
        se[k] = std::sqrt(v / (W * W) * nb / (nb - 1));
    }
}

CorrelationEstimate StationaryCorrelationObserver::estimate() const {
    CorrelationEstimate c;
    c.stationary = true;
    c.record_length = tend_ - burn_;
    for (int k = 0; k <= max_lag_; ++k) c.lags.push_back(k * step_);
    std::vector<double> w;
    for (int b = 0; b < nb_; ++b) {
        if (bcount_[b] == 0) continue;
        std::vector<double> m(max_lag_ + 1);
        for (int k = 0; k <= max_lag_; ++k) m[k] = bsum_[b][k] / bcount_[b];
        c.batches.push_back(m);
        w.push_back(bcount_[b]);
    }
    batch_stats(c.batches, w, c.values, c.stderr_);
    c.batch_weights = w;
    return c;
}

// ---- TwoTimeObserver

TwoTimeObserver::TwoTimeObserver(std::function<double(const cd*)> x, long n, int every)
    : x_(std::move(x)), every_(every), n_(n), sum_(Eigen::MatrixXd::Zero(n, n)),
      sum2_(Eigen::MatrixXd::Zero(n, n)) {}

void TwoTimeObserver::sample(long, double t, const cd* s) {
    if (long(buf_.size()) >= n_) return;
    if (long(t_.size()) <= long(buf_.size())) t_.push_back(t);
    buf_.push_back(x_(s));
}

void TwoTimeObserver::end(bool failed) {
    if (failed || long(buf_.size()) < n_) return;
    Eigen::Map<const Eigen::VectorXd> v(buf_.data(), n_);
    const Eigen::MatrixXd o = v * v.transpose();
    sum_ += o;
    sum2_ += o.cwiseProduct(o);
    count_ += 1;
}

void TwoTimeObserver::merge(const TwoTimeObserver& o) {
    if (t_.size() < o.t_.size()) t_ = o.t_;
    sum_ += o.sum_;
    sum2_ += o.sum2_;
    count_ += o.count_;
}

Eigen::MatrixXd TwoTimeObserver::mean() const { return sum_ / std::max(1.0, count_); }

Eigen::MatrixXd TwoTimeObserver::stderr_() const {
    if (count_ < 2) return Eigen::MatrixXd::Zero(n_, n_);
    const Eigen::MatrixXd m = mean();
    Eigen::MatrixXd var = (sum2_ / count_ - m.cwiseProduct(m)) * (count_ / (count_ - 1));
    return (var.cwiseMax(0.0) / count_).cwiseSqrt();
}

// ---- WindowedSpectrumObserver

WindowedSpectrumObserver::WindowedSpectrumObserver(std::function<double(const cd*)> x,
                                                   std::vector<double> omegas, double t0,
                                                   double window, int every, double dt, double mean)
    : x_(std::move(x)), om_(std::move(omegas)), t0_(t0), T_(window), h_(dt * every), mean_(mean),
      every_(every), acc_(om_.size()) {
    if (!(window > 0)) throw std::invalid_argument("windowed spectrum: window must be positive");
}

void WindowedSpectrumObserver::begin(long) {
    ts_.clear();
    xs_.clear();
}

void WindowedSpectrumObserver::sample(long, double t, const cd* s) {
    if (t < t0_ - 1e-9 || t > t0_ + T_ + 1e-9) return;
    ts_.push_back(t - t0_);
    xs_.push_back(x_(s) - mean_);
}

void WindowedSpectrumObserver::end(bool failed) {
    if (failed || xs_.size() < 2) return;
    const std::size_t n = xs_.size();
    for (std::size_t j = 0; j < om_.size(); ++j) {
        cd F = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double wt = (i == 0 || i + 1 == n) ? 0.5 : 1.0;
            F += wt * xs_[i] * std::polar(1.0, om_[j] * ts_[i]);
        }
        F *= h_;
        acc_[j].add(std::norm(F) / T_);
    }
}

void WindowedSpectrumObserver::merge(const WindowedSpectrumObserver& o) {
    for (std::size_t j = 0; j < acc_.size(); ++j) acc_[j].merge(o.acc_[j]);
}

std::vector<double> WindowedSpectrumObserver::mean() const {
    std::vector<double> out;
    for (auto& a : acc_) out.push_back(a.mean);
    return out;
}

std::vector<double> WindowedSpectrumObserver::stderr_() const {
    std::vector<double> out;
    for (auto& a : acc_) out.push_back(a.stderr_());
    return out;
}

// ---- spectrum_estimate

// Trapezoidal 2 int_0^{tau_K} C cos(Omega tau) plus an exponential tail
// C_K Re[e^{i Omega tau_K} / (lambda - i Omega)] when lambda > 0.
static double cosine_transform(const std::vector<double>& C, double h, int K, double lambda,
                               double om) {
    double s = 0.5 * C[0];
    for (int k = 1; k < K; ++k) s += C[k] * std::cos(om * k * h);
    if (K > 0) s += 0.5 * C[K] * std::cos(om * K * h);
    s *= 2.0 * h;
    if (lambda > 0) {
        const cd tail = std::polar(1.0, om * K * h) / cd(lambda, -om);
        s += 2.0 * C[K] * tail.real();
    }
    return s;
}

SpectrumEstimate spectrum_estimate(const CorrelationEstimate& c, const std::vector<double>& omegas,
                                   bool truncate) {
    if (c.lags.size() < 2) throw std::invalid_argument("spectrum_estimate: need at least two lags");
    if (!c.stationary) throw std::invalid_argument("spectrum_estimate: stationary correlation required");
    std::vector<double> om = omegas;
    std::sort(om.begin(), om.end());
    om.erase(std::unique(om.begin(), om.end()), om.end());
    const double res = 2 * 3.14159265358979323846 / c.record_length;
    for (std::size_t i = 1; i < om.size(); ++i)
        if (om[i] - om[i - 1] < res * (1 - 1e-9))
            throw resolution_error("spectrum_estimate: frequency spacing finer than 2 pi / record");

    const double h = c.lags[1] - c.lags[0];
    int K = int(c.lags.size()) - 1;
    if (truncate) {
        for (int k = 1; k < int(c.lags.size()); ++k)
            if (std::abs(c.values[k]) < 3.0 * c.stderr_[k]) {
                K = k;
                break;
            }
    }
    // tail decay rate from a log-linear fit on the second half of [0, K]
    double lambda = 0.0;
    if (truncate && K >= 4) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0, n = 0;
        bool ok = true;
        for (int k = K / 2; k <= K; ++k) {
            const double v = c.values[k] * (c.values[0] >= 0 ? 1 : -1);
            if (v <= 0) { ok = false; break; }
            const double x = k * h, y = std::log(v);
            sx += x; sy += y; sxx += x * x; sxy += x * y; n += 1;
        }
        if (ok && n >= 2) {
            const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
            if (slope < 0) lambda = -slope;
        }
    }
    SpectrumEstimate out;
    out.method = SpectrumMethod::Stationary;
    out.cutoff_lag = K * h;
    out.omegas = omegas;
    std::vector<std::vector<double>> bs;
    std::vector<double> w;
    for (std::size_t i = 0; i < c.batches.size(); ++i) {
        std::vector<double> row;
        for (double o : omegas) row.push_back(cosine_transform(c.batches[i], h, K, lambda, o));
        bs.push_back(row);
        w.push_back(i < c.batch_weights.size() ? c.batch_weights[i] : 1.0);
    }
    std::vector<double> mean, se;
    batch_stats(bs, w, mean, se);
    for (double o : omegas) out.values.push_back(cosine_transform(c.values, h, K, lambda, o));
    out.stderr_ = se;
    if (out.stderr_.size() != out.values.size()) out.stderr_.assign(out.values.size(), 0.0);
    return out;
}

double output_variance(double S, double g) {
    if (!(g > 0)) throw std::invalid_argument("output_variance: g must be positive");
    return 1.0 + 2.0 / (g * g) * S;
}

}  // namespace opo
