#ifndef COOPSCHED_BESSEL_HPP
#define COOPSCHED_BESSEL_HPP

namespace coopsched {

// Modified Bessel function of the first kind, order 1.
//
// The busy-period density needs exp(-a*t) * I1(x) with x growing linearly in
// t; the unscaled I1 overflows near x ~ 709 while the product stays tame, so
// the exponentially scaled form is the primary entry point.

// e^{-x} * I1(x) for x >= 0. Power series below the crossover argument,
// asymptotic expansion with the exponential factor cancelled above it.
double bessel_i1_scaled(double x);

// Plain I1(x); overflows to +inf for x beyond roughly 709.
double bessel_i1(double x);

}  // namespace coopsched

#endif  // COOPSCHED_BESSEL_HPP
