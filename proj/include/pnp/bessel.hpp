#pragma once

namespace pnp {

// Bessel functions of the first and second kind, order zero, for x > 0.
// Power series (extended precision) below kBesselSeriesCutoff, Hankel
// asymptotic expansion above it.
inline constexpr double kBesselSeriesCutoff = 20.0;

double bessel_j0(double x);
double bessel_y0(double x);

}  // namespace pnp
