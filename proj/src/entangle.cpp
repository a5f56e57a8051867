#include "opo/entangle.hpp"

#include <cmath>
#include <string>

#include <boost/math/special_functions/beta.hpp>

namespace opo {

QuadratureVariances squeezing_variances(double r, double theta, bool two_mode) {
    if (!(r >= 0)) throw std::domain_error("squeezing_variances: r must be >= 0");
    (void)theta;  // variances are quoted in the frame rotated by theta/2
    QuadratureVariances v;
    v.two_mode = two_mode;
    if (!two_mode) {
        v.dX = std::exp(-r);
        v.dY = std::exp(r);
        return v;
    }
    v.V_xdiff = v.V_ysum = std::exp(-2 * r);
    v.V_xsum = v.V_ydiff = std::exp(2 * r);
    v.W = v.V_xdiff + v.V_ysum;
    return v;
}

DuanSimon duan_simon(double V_sum, double V_diff) {
    if (!(V_sum >= 0) || !(V_diff >= 0)) throw std::domain_error("duan_simon: variances must be >= 0");
    DuanSimon d;
    d.W = V_diff + V_sum;
    d.entangled = d.W < 2;
    return d;
}

double schmidt_probability(double lambda, int k, int n) {
    if (!(lambda >= 0 && lambda < 1)) throw std::domain_error("lambda must lie in [0, 1)");
    if (k < 0 || n < 0) throw std::domain_error("k and n must be >= 0");
    if (lambda == 0) return n == 0 ? 1.0 : 0.0;
    const double l2 = lambda * lambda;
    const double lc = std::lgamma(n + k + 1.0) - std::lgamma(n + 1.0) - std::lgamma(k + 1.0);
    return std::exp((k + 1) * std::log1p(-l2) + 2.0 * n * std::log(lambda) + lc);
}

// Tail sum_{m > n} p_m^(k): the negative-binomial upper tail equals the
// regularised incomplete beta I_{l^2}(n + 1, k + 1).
static double schmidt_tail(double lambda, int k, int n) {
    if (lambda == 0) return 0.0;
    return boost::math::ibeta(n + 1.0, k + 1.0, lambda * lambda);
}

int required_n_max(double lambda, int k, double tol) {
    if (!(lambda >= 0 && lambda < 1)) throw std::domain_error("lambda must lie in [0, 1)");
    int n = 0;
    while (schmidt_tail(lambda, k, n) >= tol) n = n < 16 ? n + 1 : int(n * 1.25);
    // refine downward to the smallest admissible value
    int lo = n / 2;
    while (lo < n) {
        const int mid = (lo + n) / 2;
        if (schmidt_tail(lambda, k, mid) < tol) n = mid;
        else lo = mid + 1;
    }
    return n;
}

AddedSubtracted added_subtracted(double lambda, int k, int n_max) {
    if (!(lambda >= 0 && lambda < 1)) throw std::domain_error("added_subtracted: lambda must lie in [0, 1)");
    if (k < 0) throw std::domain_error("added_subtracted: k must be >= 0");
    if (n_max < 0) throw std::domain_error("added_subtracted: n_max must be >= 0");
    AddedSubtracted out;
    out.dist.lambda = lambda;
    out.dist.k = k;
    out.dist.tail = schmidt_tail(lambda, k, n_max);
    if (out.dist.tail > 1e-12)
        throw truncation_error("added_subtracted: tail mass " + std::to_string(out.dist.tail) +
                               " beyond n_max = " + std::to_string(n_max));
    out.dist.p.resize(n_max + 1);
    double h = 0.0;
    for (int n = 0; n <= n_max; ++n) {
        const double p = schmidt_probability(lambda, k, n);
        out.dist.p[n] = p;
        if (p > 0) h -= p * std::log(p);
    }
    out.entropy = h;
    return out;
}

double tmsv_entropy(double lambda) {
    if (!(lambda >= 0 && lambda < 1)) throw std::domain_error("tmsv_entropy: lambda must lie in [0, 1)");
    if (lambda == 0) return 0.0;
    const double l2 = lambda * lambda;
    return -std::log1p(-l2) - 2 * l2 / (1 - l2) * std::log(lambda);
}

}  // namespace opo
