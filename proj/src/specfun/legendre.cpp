#include <cmath>
#include <numbers>
#include <string>

#include "fieldconc/errors.hpp"
#include "fieldconc/specfun.hpp"

namespace fc::specfun {

namespace {

void check_indices(int m, int l)
{
    if (l < 0 || m < 0) throw DomainError("legendre indices must be non-negative");
    if (l > m) throw DomainError("legendre order l=" + std::to_string(l) + " exceeds degree m=" + std::to_string(m));
}

// Normalized recurrence seeded with seed = P(l,l;x), for n = l..nmax.
std::vector<double> column_from_seed(int nmax, int l, double x, double seed)
{
    std::vector<double> col(nmax - l + 1, 0.0);
    col[0] = seed;
    if (nmax == l) return col;
    col[1] = x * std::sqrt(2.0 * l + 1.0) * seed;
    for (int n = l + 2; n <= nmax; ++n) {
        double a = x * (2.0 * n - 1.0);
        double b = std::sqrt(static_cast<double>(n - 1 - l) * (n - 1 + l));
        double c = std::sqrt(static_cast<double>(n - l) * (n + l));
        col[n - l] = (a * col[n - 1 - l] - b * col[n - 2 - l]) / c;
    }
    return col;
}

// prod_{i=1..l} sqrt((2i-1)/(2i)) * s^p
double seed_value(int l, double s, int p)
{
    double v = 1.0;
    for (int i = 1; i <= l; ++i) v *= std::sqrt((2.0 * i - 1.0) / (2.0 * i));
    return v * std::pow(s, p);
}

}  // namespace

namespace detail {

std::vector<double> legendre_column(int nmax, int l, double x)
{
    check_indices(nmax, l);
    if (std::abs(x) > 1.0) throw DomainError("legendre argument must lie in [-1,1]");
    double s = std::sqrt(std::max(0.0, (1.0 - x) * (1.0 + x)));
    return column_from_seed(nmax, l, x, seed_value(l, s, l));
}

double legendre_normalized_over_sin(int m, int l, double theta)
{
    check_indices(m, l);
    if (l == 0) return 0.0;
    double x = std::cos(theta);
    double s = std::sin(theta);
    std::vector<double> col = column_from_seed(m, l, x, seed_value(l, s, l - 1));
    return l * col.back();
}

double legendre_normalized_dtheta(int m, int l, double theta)
{
    check_indices(m, l);
    double x = std::cos(theta);
    auto p = [&](int ll) -> double {
        if (ll < 0) return -assoc_legendre_normalized(m, 1, x);
        if (ll > m) return 0.0;
        return assoc_legendre_normalized(m, ll, x);
    };
    double up = std::sqrt(static_cast<double>(m + l + 1) * (m - l));
    if (l == 0) return -up * p(1);
    double down = std::sqrt(static_cast<double>(m + l) * (m - l + 1));
    return 0.5 * (down * p(l - 1) - up * p(l + 1));
}

}  // namespace detail

double assoc_legendre_normalized(int m, int l, double x)
{
    return detail::legendre_column(m, l, x).back();
}

double assoc_legendre(int m, int l, double x)
{
    check_indices(m, l);
    double log_ratio = 0.5 * (std::lgamma(m + l + 1.0) - std::lgamma(m - l + 1.0));
    double p = assoc_legendre_normalized(m, l, x);
    double v = p * std::exp(log_ratio);
    if (!std::isfinite(v)) throw OutOfRangeError("P_m^l overflows for m=" + std::to_string(m));
    return v;
}

std::complex<double> sph_harm(int m, int l, double theta, double phi)
{
    int al = std::abs(l);
    check_indices(m, al);
    double p = assoc_legendre_normalized(m, al, std::cos(theta));
    double amp = std::sqrt((2.0 * m + 1.0) / (4.0 * std::numbers::pi)) * p;
    return std::polar(amp, l * phi);
}

}  // namespace fc::specfun
