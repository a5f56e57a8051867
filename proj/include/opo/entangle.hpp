#pragma once

#include <stdexcept>
#include <vector>

namespace opo {

class truncation_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct QuadratureVariances {
    // single mode: variances of X^{theta/2} and Y^{theta/2}
    double dX = 1.0, dY = 1.0;
    // two mode: V[(X_A - X_B)/sqrt2], V[(Y_A + Y_B)/sqrt2] and the conjugate pair
    double V_xdiff = 1.0, V_ysum = 1.0, V_xsum = 1.0, V_ydiff = 1.0;
    double W = 2.0;  // V_xdiff + V_ysum
    bool two_mode = false;
};

// Squeezed vacuum with squeezing parameter z = r e^{i theta}. The two-mode
// variances refer to quadratures rotated by theta/2 in each mode.
QuadratureVariances squeezing_variances(double r, double theta, bool two_mode);

struct DuanSimon {
    double W = 2.0;
    bool entangled = false;
};
DuanSimon duan_simon(double V_sum, double V_diff);

struct SchmidtDistribution {
    std::vector<double> p;  // p_n for n = 0 .. n_max
    double lambda = 0.0;
    int k = 0;
    double tail = 0.0;      // probability mass beyond n_max
};

// p_n^(k) = (1 - l^2)^(k+1) l^(2n) C(n+k, n), binomials through lgamma.
double schmidt_probability(double lambda, int k, int n);

struct AddedSubtracted {
    SchmidtDistribution dist;
    double entropy = 0.0;  // nats
};

// Throws std::domain_error for lambda outside [0, 1) or k < 0 and
// truncation_error when the tail beyond n_max exceeds 1e-12.
AddedSubtracted added_subtracted(double lambda, int k, int n_max);

// Smallest n_max with tail mass below tol.
int required_n_max(double lambda, int k, double tol = 1e-12);

// -log(1 - l^2) - (2 l^2 / (1 - l^2)) log l
double tmsv_entropy(double lambda);

}  // namespace opo
