#pragma once

#include <complex>
#include <vector>

namespace fc::specfun {

enum class BesselKind { cylindrical, spherical };

// Order of a Bessel function. Cylindrical orders may be half-integer (m + 1/2).
struct BesselOrder {
    BesselKind kind = BesselKind::cylindrical;
    int m = 0;
    bool half = false;

    static BesselOrder cyl(int m) { return {BesselKind::cylindrical, m, false}; }
    static BesselOrder cyl_half(int m) { return {BesselKind::cylindrical, m, true}; }
    static BesselOrder sph(int m) { return {BesselKind::spherical, m, false}; }

    [[nodiscard]] double nu() const { return half ? m + 0.5 : static_cast<double>(m); }
    void validate() const;
};

struct ZeroIndex {
    BesselOrder order;
    int s = 1;
    bool derivative = false;
};

// J_nu(x) for cylindrical orders, j_m(x) for spherical ones.
[[nodiscard]] double bessel_j(BesselOrder order, double x);
[[nodiscard]] double bessel_j_prime(BesselOrder order, double x);

// s-th positive zero of J_nu or J'_nu (spherical: j_m or j'_m).
// For J'_0 the root at x = 0 is not counted.
[[nodiscard]] double bessel_zero(ZeroIndex z);

[[nodiscard]] double bessel_y(int m, double x);
[[nodiscard]] double bessel_y_prime(int m, double x);
[[nodiscard]] std::complex<double> hankel1(int m, double x);
[[nodiscard]] std::complex<double> hankel1_prime(int m, double x);

// P_m^l(x) without the Condon-Shortley phase.
[[nodiscard]] double assoc_legendre(int m, int l, double x);
// P(m,l;x) = sqrt((m-l)!/(m+l)!) P_m^l(x); stays O(1) for every m, l.
[[nodiscard]] double assoc_legendre_normalized(int m, int l, double x);

// Unit-normalized spherical harmonic, Y_m^{-l} = conj(Y_m^l).
[[nodiscard]] std::complex<double> sph_harm(int m, int l, double theta, double phi);

[[nodiscard]] double gamma_fn(double x);
[[nodiscard]] double log_gamma(double x);

namespace detail {

// sign * exp(log_abs); sign == 0 encodes an exact zero.
struct Scaled {
    int sign = 0;
    double log_abs = 0.0;

    [[nodiscard]] double value() const;
    [[nodiscard]] double value_or_zero() const;
};

[[nodiscard]] Scaled bessel_j_scaled(BesselOrder order, double x);
[[nodiscard]] Scaled bessel_j_prime_scaled(BesselOrder order, double x);

// J(x)/J(xref) in the same order; stays finite where the individual values underflow.
[[nodiscard]] double bessel_j_ratio(BesselOrder order, double x, double xref);
[[nodiscard]] double bessel_j_prime_ratio(BesselOrder order, double x, double xref);

// J_0..J_{count-1} (integer orders) at x, underflowed entries set to zero.
[[nodiscard]] std::vector<double> bessel_j_sequence(int count, double x);

// J_0..J_{count-1} at complex argument, for complex-contrast series.
[[nodiscard]] std::vector<std::complex<double>> bessel_j_sequence(int count, std::complex<double> z);

// Y_0..Y_{count-1} at x > 0 by forward recurrence; throws on overflow.
[[nodiscard]] std::vector<double> bessel_y_sequence(int count, double x);

// Normalized Legendre column P(n,l;x) for n = l..nmax.
[[nodiscard]] std::vector<double> legendre_column(int nmax, int l, double x);

// d/dtheta of P(m,l;cos theta) and l P(m,l;cos theta)/sin theta, both finite on the axis.
[[nodiscard]] double legendre_normalized_dtheta(int m, int l, double theta);
[[nodiscard]] double legendre_normalized_over_sin(int m, int l, double theta);

}  // namespace detail

}  // namespace fc::specfun
