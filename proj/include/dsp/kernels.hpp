#pragma once

// Binomial Green's kernel of the three-point average, the heat kernel with
// its derivatives, fractional parts and the periodic sawtooth family.
//
// Integer part is floor for every real, negatives included: [[-0.3]] = -1
// and ((-0.3)) = 0.7. The fractional-sum identity and the oscillation-point
// construction both depend on this convention.

#include <cstdint>
#include <vector>

namespace dsp {

struct LatticeIndex {
  std::int64_t n = 0;  // time steps, n >= 0
  std::int64_t k = 0;  // cell offset
};

/// K_{n,k} = 2^{-n} C(n, (n-k)/2) on the support (n+k even, |k| <= n), else 0.
/// Exact integer arithmetic up to n = 60, saddle-point (Loader) evaluation
/// in log space above.
double binom_kernel(std::int64_t n, std::int64_t k);

struct KernelEntry {
  std::int64_t k;
  double value;
};

/// Support k = -n, -n+2, ..., n of row n.
std::vector<KernelEntry> kernel_row(std::int64_t n);

/// Compensated sum of a row.
double kernel_row_sum(std::int64_t n);

/// Kernel value beside its local-CLT surrogate 2 G(n/2, k).
struct KernelSample {
  LatticeIndex index;
  double value = 0.0;
  double clt_value = 0.0;
  double abs_error = 0.0;
};
KernelSample kernel_sample(std::int64_t n, std::int64_t k);

/// G(t, x) = exp(-x^2 / 4t) / (2 sqrt(pi t)).
double heat_kernel(double t, double x);

enum class Axis { space, time };

/// m-th partial derivative of G along `axis` (Hermite closed form; a time
/// derivative of order m is the space derivative of order 2m).
double heat_kernel_deriv(double t, double x, int m, Axis axis);

/// Shorthand for the first space derivative.
inline double heat_kernel_dx(double t, double x) { return heat_kernel_deriv(t, x, 1, Axis::space); }

/// a - floor(a), in [0, 1).
double frac(double a);

/// Integer part floor(a) as a 64-bit integer.
std::int64_t ifloor(double a);

constexpr int kMaxSawtoothOrder = 6;

/// h_1(t) = floor(t) - t + 1/2; h_m is the zero-mean periodic antiderivative
/// of h_{m-1}. Closed form h_m(t) = -B_m(frac t) / m! with Bernoulli
/// polynomials B_m, for 1 <= m <= 6.
double sawtooth(int m, double t);

/// Orders 1..m with the anchors xi_j in [0, 1] at which h_j vanishes, so that
/// h_j(t) = integral of h_{j-1} from xi_j to t on [0, 1].
struct SawtoothFamily {
  int order = 1;
  std::vector<double> anchors;  // anchors[j-1] = xi_j
  double operator()(double t) const { return sawtooth(order, t); }
};
SawtoothFamily make_sawtooth_family(int m);

}  // namespace dsp
