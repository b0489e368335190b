#include "pnp/bessel.hpp"

#include <cmath>
#include <stdexcept>

namespace pnp {
namespace {

constexpr long double kPi = 3.141592653589793238462643383279502884L;
constexpr long double kEulerGamma = 0.577215664901532860606512090082402431L;

struct SeriesTerms {
  long double j0;
  long double harmonic_sum;  // sum_{k>=1} (-1)^{k+1} H_k (x^2/4)^k / (k!)^2
};

SeriesTerms power_series(long double x) {
  const long double q = x * x / 4.0L;
  long double term = 1.0L;  // (-1)^k q^k / (k!)^2
  long double j0 = 1.0L;
  long double hsum = 0.0L;
  long double harmonic = 0.0L;
  for (int k = 1; k < 200; ++k) {
    term *= -q / (static_cast<long double>(k) * k);
    harmonic += 1.0L / k;
    j0 += term;
    hsum -= harmonic * term;
    if (std::fabs(term) * (1.0L + harmonic) < 1e-22L * std::fabs(j0) + 1e-30L) break;
  }
  return {j0, hsum};
}

// P0, Q0 of the Hankel expansion; terms summed until they stop decreasing.
void hankel_pq(double x, double& p, double& q) {
  p = 1.0;
  q = 0.0;
  double term = 1.0;
  double prev = 1.0;
  const double eightx = 8.0 * x;
  for (int k = 1; k < 60; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= -(odd * odd) / (k * eightx);
    const double mag = std::fabs(term);
    if (mag > prev) break;
    prev = mag;
    // k even contributes to P with sign (-1)^{k/2}; k odd to Q with sign (-1)^{(k-1)/2}
    if (k % 2 == 0) {
      p += ((k / 2) % 2 == 0 ? 1.0 : -1.0) * term;
    } else {
      q += (((k - 1) / 2) % 2 == 0 ? 1.0 : -1.0) * term;
    }
    if (mag < 1e-18) break;
  }
}

void check_argument(double x) {
  if (!(x > 0.0) || !std::isfinite(x))
    throw std::domain_error("Bessel order-zero functions require a finite argument > 0");
}

}  // namespace

double bessel_j0(double x) {
  check_argument(x);
  if (x < kBesselSeriesCutoff) return static_cast<double>(power_series(x).j0);
  double p = 0.0;
  double q = 0.0;
  hankel_pq(x, p, q);
  const double chi = x - M_PI / 4.0;
  return std::sqrt(2.0 / (M_PI * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

double bessel_y0(double x) {
  check_argument(x);
  if (x < kBesselSeriesCutoff) {
    const long double lx = x;
    const SeriesTerms s = power_series(lx);
    const long double two_over_pi = 2.0L / kPi;
    return static_cast<double>(two_over_pi * ((std::log(lx / 2.0L) + kEulerGamma) * s.j0 + s.harmonic_sum));
  }
  double p = 0.0;
  double q = 0.0;
  hankel_pq(x, p, q);
  const double chi = x - M_PI / 4.0;
  return std::sqrt(2.0 / (M_PI * x)) * (p * std::sin(chi) + q * std::cos(chi));
}

}  // namespace pnp
