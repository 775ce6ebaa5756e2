#include "fieldconc/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "fieldconc/errors.hpp"

namespace fc::specfun {

namespace {

using detail::Scaled;

constexpr double kPi = std::numbers::pi;
constexpr int kRescaleBits = 600;
const double kRescaleLog = kRescaleBits * std::log(2.0);
const double kRescaleThreshold = std::ldexp(1.0, kRescaleBits);
const double kRescaleFactor = std::ldexp(1.0, -kRescaleBits);

Scaled make_scaled(double v)
{
    if (v == 0.0) return {0, 0.0};
    return {v > 0 ? 1 : -1, std::log(std::abs(v))};
}

Scaled scale_by(Scaled a, double factor)
{
    if (a.sign == 0 || factor == 0.0) return {0, 0.0};
    return {factor > 0 ? a.sign : -a.sign, a.log_abs + std::log(std::abs(factor))};
}

// ca*a + cb*b evaluated relative to the larger magnitude.
Scaled combine(double ca, Scaled a, double cb, Scaled b)
{
    Scaled sa = scale_by(a, ca);
    Scaled sb = scale_by(b, cb);
    if (sa.sign == 0) return sb;
    if (sb.sign == 0) return sa;
    double ref = std::max(sa.log_abs, sb.log_abs);
    double v = sa.sign * std::exp(sa.log_abs - ref) + sb.sign * std::exp(sb.log_abs - ref);
    if (v == 0.0) return {0, 0.0};
    return {v > 0 ? 1 : -1, ref + std::log(std::abs(v))};
}

void check_x(double x)
{
    if (!(x >= 0.0) || !std::isfinite(x))
        throw DomainError("bessel argument must be finite and non-negative, got " + std::to_string(x));
}

// Ascending series for J_nu(x), nu >= 0, used when x*x <= nu + 1.
Scaled series_j(double nu, double x)
{
    if (x == 0.0) return nu == 0.0 ? Scaled{1, 0.0} : Scaled{0, 0.0};
    double log_pref = nu * std::log(0.5 * x) - std::lgamma(nu + 1.0);
    double q = -0.25 * x * x;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 500; ++k) {
        term *= q / (k * (nu + k));
        sum += term;
        if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
    }
    Scaled s = make_scaled(sum);
    s.log_abs += log_pref;
    return s;
}

int miller_start(int hi, double x)
{
    int base = std::max(hi, static_cast<int>(std::ceil(x)));
    int n = base + 30 + static_cast<int>(std::sqrt(60.0 * base));
    return n + (n % 2);
}

// Backward recurrence. Integer family gives J_k, half family gives spherical j_k.
// Returns scaled values for indices 0..hi.
std::vector<Scaled> miller(bool half, int hi, double x)
{
    const int top = miller_start(hi, x);
    std::vector<double> raw(hi + 1, 0.0);
    std::vector<int> raw_scale(hi + 1, 0);
    int rescales = 0;
    double f_next = 0.0;
    double f = 1.0;
    double norm = 0.0;  // integer family: J_0 + 2 sum J_2k

    auto capture = [&](int k, double value) {
        if (k <= hi) {
            raw[k] = value;
            raw_scale[k] = rescales;
        }
    };
    capture(top, f);
    if (!half && top % 2 == 0) norm += 2.0 * f;

    for (int k = top; k >= 1; --k) {
        double coeff = half ? (2.0 * k + 1.0) / x : 2.0 * k / x;
        double f_prev = coeff * f - f_next;
        f_next = f;
        f = f_prev;
        int idx = k - 1;
        if (!half && idx % 2 == 0) norm += (idx == 0 ? 1.0 : 2.0) * f;
        if (std::abs(f) > kRescaleThreshold) {
            f *= kRescaleFactor;
            f_next *= kRescaleFactor;
            norm *= kRescaleFactor;
            ++rescales;
        }
        capture(idx, f);
    }

    double log_norm;
    int norm_sign;
    if (!half) {
        norm_sign = norm > 0 ? 1 : -1;
        log_norm = std::log(std::abs(norm));
    } else {
        // Match j_0 = sin x / x, or j_1 near zeros of sin x.
        double s = std::sin(x);
        double c = std::cos(x);
        double g0 = raw[0] * std::exp(-(rescales - raw_scale[0]) * kRescaleLog);
        double ratio;
        if (std::abs(s) > 0.5 || hi < 1) {
            ratio = g0 / (s / x);
        } else {
            double g1 = raw[1] * std::exp(-(rescales - raw_scale[1]) * kRescaleLog);
            ratio = g1 / (s / (x * x) - c / x);
        }
        norm_sign = ratio > 0 ? 1 : -1;
        log_norm = std::log(std::abs(ratio));
    }

    std::vector<Scaled> out(hi + 1);
    for (int k = 0; k <= hi; ++k) {
        if (raw[k] == 0.0) {
            out[k] = {0, 0.0};
            continue;
        }
        int sign = (raw[k] > 0 ? 1 : -1) * norm_sign;
        double la = std::log(std::abs(raw[k])) - (rescales - raw_scale[k]) * kRescaleLog - log_norm;
        out[k] = {sign, la};
    }
    return out;
}

bool use_series(double nu, double x) { return x * x <= nu + 1.0; }

// Family-native values (J_k or spherical j_k) at indices m-1, m, m+1.
struct Triple {
    Scaled lo, mid, hi;
};

Scaled spherical_from_cyl(Scaled j_half, double x)
{
    if (j_half.sign == 0) return j_half;
    return {j_half.sign, j_half.log_abs + 0.5 * std::log(kPi / (2.0 * x))};
}

Triple native_triple(bool half, int m, double x)
{
    Triple t;
    if (x == 0.0) {
        t.mid = (m == 0) ? Scaled{1, 0.0} : Scaled{0, 0.0};
        t.hi = {0, 0.0};
        t.lo = (m == 1) ? Scaled{1, 0.0} : Scaled{0, 0.0};
        return t;
    }
    double nu = half ? m + 0.5 : m;
    if (use_series(nu, x)) {
        auto val = [&](int idx) -> Scaled {
            if (idx < 0) {
                if (half) return make_scaled(std::cos(x) / x);  // j_{-1}
                return combine(-1.0, series_j(1.0, x), 0.0, {});  // J_{-1} = -J_1
            }
            double v = half ? idx + 0.5 : idx;
            Scaled s = series_j(v, x);
            return half ? spherical_from_cyl(s, x) : s;
        };
        t.lo = val(m - 1);
        t.mid = val(m);
        t.hi = val(m + 1);
        return t;
    }
    std::vector<Scaled> seq = miller(half, m + 1, x);
    t.mid = seq[m];
    t.hi = seq[m + 1];
    if (m >= 1) {
        t.lo = seq[m - 1];
    } else if (half) {
        t.lo = make_scaled(std::cos(x) / x);
    } else {
        t.lo = combine(-1.0, seq[1], 0.0, {});
    }
    return t;
}

double checked_value(Scaled s, const char* what, double x)
{
    if (s.sign == 0) return 0.0;
    if (s.log_abs < -708.0 || s.log_abs > 709.0)
        throw OutOfRangeError(std::string(what) + " not representable at x=" + std::to_string(x));
    return s.value();
}

// Hankel asymptotic for H^(1)_nu, large x.
std::complex<double> hankel_asymptotic(double nu, double x)
{
    const std::complex<double> I(0.0, 1.0);
    double mu = 4.0 * nu * nu;
    std::complex<double> sum = 1.0;
    double term = 1.0;
    std::complex<double> ipow = 1.0;
    double prev = 1.0;
    for (int k = 1; k < 200; ++k) {
        double odd = 2.0 * k - 1.0;
        term *= (mu - odd * odd) / (k * 8.0 * x);
        ipow *= I;
        if (std::abs(term) > prev) break;
        sum += ipow * term;
        prev = std::abs(term);
        if (prev < 1e-18) break;
    }
    double phase = x - 0.5 * nu * kPi - 0.25 * kPi;
    return std::sqrt(2.0 / (kPi * x)) * std::exp(I * phase) * sum;
}

void y01(double x, double& y0, double& y1)
{
    if (x > 25.0) {
        y0 = hankel_asymptotic(0.0, x).imag();
        y1 = hankel_asymptotic(1.0, x).imag();
        return;
    }
    constexpr double euler_gamma = 0.57721566490153286061;
    std::vector<double> j = detail::bessel_j_sequence(static_cast<int>(x) + 80, x);
    double lg = std::log(0.5 * x) + euler_gamma;
    double s0 = 0.0;
    double s1 = 0.0;
    int n = static_cast<int>(j.size());
    for (int k = 1; 2 * k + 1 < n; ++k) {
        double sg = (k % 2 == 0) ? 1.0 : -1.0;
        s0 += sg * j[2 * k] / k;
        s1 += sg * (j[2 * k - 1] - j[2 * k + 1]) / k;
    }
    y0 = (2.0 / kPi) * (lg * j[0] - 2.0 * s0);
    y1 = (2.0 / kPi) * (lg * j[1] - j[0] / x + s1);
}

// Y_{m-1}, Y_m, Y_{m+1} by forward recurrence.
void y_triple(int m, double x, double& ylo, double& ymid, double& yhi)
{
    if (!(x > 0.0) || !std::isfinite(x))
        throw DomainError("Y_m requires x > 0, got " + std::to_string(x));
    std::vector<double> y(m + 2);
    y01(x, y[0], y[1]);
    for (int k = 1; k <= m; ++k) {
        y[k + 1] = (2.0 * k / x) * y[k] - y[k - 1];
        if (!std::isfinite(y[k + 1])) throw OutOfRangeError("Y_m overflow for m=" + std::to_string(m));
    }
    ylo = (m == 0) ? -y[1] : y[m - 1];
    ymid = y[m];
    yhi = y[m + 1];
}

}  // namespace

void BesselOrder::validate() const
{
    if (m < 0) throw DomainError("bessel order must be non-negative");
    if (half && kind == BesselKind::spherical)
        throw DomainError("half-integer orders are only defined for the cylindrical kind");
}

namespace detail {

double Scaled::value() const
{
    if (sign == 0) return 0.0;
    return sign * std::exp(log_abs);
}

double Scaled::value_or_zero() const
{
    if (sign == 0 || log_abs < -745.0) return 0.0;
    return sign * std::exp(log_abs);
}

Scaled bessel_j_scaled(BesselOrder order, double x)
{
    order.validate();
    check_x(x);
    if (order.kind == BesselKind::spherical) {
        if (x == 0.0) return order.m == 0 ? Scaled{1, 0.0} : Scaled{0, 0.0};
        return native_triple(true, order.m, x).mid;
    }
    if (x == 0.0) return order.nu() == 0.0 ? Scaled{1, 0.0} : Scaled{0, 0.0};
    if (use_series(order.nu(), x)) return series_j(order.nu(), x);
    Scaled s = native_triple(order.half, order.m, x).mid;
    if (order.half && s.sign != 0) s.log_abs += 0.5 * std::log(2.0 * x / kPi);
    return s;
}

Scaled bessel_j_prime_scaled(BesselOrder order, double x)
{
    order.validate();
    check_x(x);
    if (x == 0.0) {
        // J'_1(0) = 1/2, j'_1(0) = 1/3; every other order vanishes or is singular.
        if (order.kind == BesselKind::spherical) return order.m == 1 ? make_scaled(1.0 / 3.0) : Scaled{0, 0.0};
        if (!order.half && order.m == 1) return make_scaled(0.5);
        if (order.half && order.m == 0) throw DomainError("J'_{1/2} is singular at x = 0");
        return {0, 0.0};
    }
    if (order.kind == BesselKind::spherical) {
        Triple t = native_triple(true, order.m, x);
        double m = order.m;
        return combine(m / (2 * m + 1), t.lo, -(m + 1) / (2 * m + 1), t.hi);
    }
    Triple t = native_triple(order.half, order.m, x);
    Scaled d = combine(0.5, t.lo, -0.5, t.hi);
    if (order.half && d.sign != 0) d.log_abs += 0.5 * std::log(2.0 * x / kPi);
    return d;
}

double bessel_j_ratio(BesselOrder order, double x, double xref)
{
    Scaled a = bessel_j_scaled(order, x);
    Scaled b = bessel_j_scaled(order, xref);
    if (b.sign == 0) throw DomainError("bessel ratio reference value is zero");
    if (a.sign == 0) return 0.0;
    double d = a.log_abs - b.log_abs;
    if (d < -745.0) return 0.0;
    return a.sign * b.sign * std::exp(d);
}

double bessel_j_prime_ratio(BesselOrder order, double x, double xref)
{
    Scaled a = bessel_j_prime_scaled(order, x);
    Scaled b = bessel_j_scaled(order, xref);
    if (b.sign == 0) throw DomainError("bessel ratio reference value is zero");
    if (a.sign == 0) return 0.0;
    double d = a.log_abs - b.log_abs;
    if (d < -745.0) return 0.0;
    return a.sign * b.sign * std::exp(d);
}

std::vector<double> bessel_j_sequence(int count, double x)
{
    check_x(x);
    if (count <= 0) return {};
    std::vector<double> out(count, 0.0);
    if (x == 0.0) {
        out[0] = 1.0;
        return out;
    }
    std::vector<Scaled> seq = miller(false, count - 1, x);
    for (int k = 0; k < count; ++k) out[k] = seq[k].value_or_zero();
    return out;
}

std::vector<std::complex<double>> bessel_j_sequence(int count, std::complex<double> z)
{
    if (count <= 0) return {};
    std::vector<std::complex<double>> out(count, 0.0);
    if (std::abs(z) == 0.0) {
        out[0] = 1.0;
        return out;
    }
    int top = miller_start(count, std::abs(z)) + 2 * static_cast<int>(std::abs(z.imag()));
    std::complex<double> f_next = 0.0;
    std::complex<double> f = 1e-300;
    std::complex<double> norm = 0.0;
    std::vector<std::complex<double>> raw(count, 0.0);
    for (int k = top; k >= 1; --k) {
        std::complex<double> f_prev = (2.0 * k / z) * f - f_next;
        f_next = f;
        f = f_prev;
        int idx = k - 1;
        if (idx % 2 == 0) norm += (idx == 0 ? 1.0 : 2.0) * f;
        if (idx < count) raw[idx] = f;
        if (std::abs(f) > 1e250) {
            f *= 1e-250;
            f_next *= 1e-250;
            norm *= 1e-250;
            for (auto& r : raw) r *= 1e-250;
        }
    }
    for (int k = 0; k < count; ++k) out[k] = raw[k] / norm;
    return out;
}

std::vector<double> bessel_y_sequence(int count, double x)
{
    if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("Y_m requires x > 0");
    if (count <= 0) return {};
    std::vector<double> y(std::max(count, 2));
    y01(x, y[0], y[1]);
    for (int k = 1; k + 1 < count; ++k) {
        y[k + 1] = (2.0 * k / x) * y[k] - y[k - 1];
        if (!std::isfinite(y[k + 1])) throw OutOfRangeError("Y_m overflow for m=" + std::to_string(k + 1));
    }
    y.resize(count);
    return y;
}

}  // namespace detail

double bessel_j(BesselOrder order, double x)
{
    return checked_value(detail::bessel_j_scaled(order, x), "bessel_j", x);
}

double bessel_j_prime(BesselOrder order, double x)
{
    if (!(x > 0.0)) throw DomainError("bessel_j_prime requires x > 0");
    return checked_value(detail::bessel_j_prime_scaled(order, x), "bessel_j_prime", x);
}

double bessel_y(int m, double x)
{
    if (m < 0) throw DomainError("Y_m order must be non-negative");
    double lo, mid, hi;
    y_triple(m, x, lo, mid, hi);
    return mid;
}

double bessel_y_prime(int m, double x)
{
    if (m < 0) throw DomainError("Y_m order must be non-negative");
    double lo, mid, hi;
    y_triple(m, x, lo, mid, hi);
    if (m == 0) return -hi;
    return 0.5 * (lo - hi);
}

std::complex<double> hankel1(int m, double x)
{
    if (!(x > 0.0)) throw DomainError("hankel1 requires x > 0");
    double y = bessel_y(m, x);
    double j = detail::bessel_j_scaled(BesselOrder::cyl(m), x).value_or_zero();
    return {j, y};
}

std::complex<double> hankel1_prime(int m, double x)
{
    if (!(x > 0.0)) throw DomainError("hankel1_prime requires x > 0");
    double y = bessel_y_prime(m, x);
    double j = detail::bessel_j_prime_scaled(BesselOrder::cyl(m), x).value_or_zero();
    return {j, y};
}

namespace {

int zero_sign(const ZeroIndex& z, double x)
{
    detail::Scaled s = z.derivative ? detail::bessel_j_prime_scaled(z.order, x)
                                    : detail::bessel_j_scaled(z.order, x);
    return s.sign;
}

// f/f' for Newton polishing, using the Bessel ODE for second derivatives.
double newton_step(const ZeroIndex& z, double x)
{
    using detail::Scaled;
    const BesselOrder& o = z.order;
    Scaled f = detail::bessel_j_scaled(o, x);
    Scaled fp = detail::bessel_j_prime_scaled(o, x);
    if (!z.derivative) {
        if (fp.sign == 0) return 0.0;
        return f.sign * fp.sign * std::exp(f.log_abs - fp.log_abs);
    }
    // f'' from the ODE, expressed as a multiple of f and f'
    Scaled fpp;
    if (o.kind == BesselKind::spherical) {
        double mm = o.m;
        fpp = combine(-2.0 / x, fp, -(1.0 - mm * (mm + 1) / (x * x)), f);
    } else {
        double nu = o.nu();
        fpp = combine(-1.0 / x, fp, -(1.0 - nu * nu / (x * x)), f);
    }
    if (fpp.sign == 0) return 0.0;
    return fp.sign * fpp.sign * std::exp(fp.log_abs - fpp.log_abs);
}

}  // namespace

double bessel_zero(ZeroIndex z)
{
    z.order.validate();
    if (z.s < 1) throw DomainError("zero rank s must be >= 1");
    const double step = 0.25;
    double a = 0.5 * z.order.nu() + 0.05;
    int sa = zero_sign(z, a);
    int found = 0;
    const int budget = 200000;
    for (int it = 0; it < budget; ++it) {
        double b = a + step;
        int sb = zero_sign(z, b);
        if (sa != 0 && sb != 0 && sa != sb) {
            if (++found == z.s) {
                double lo = a, hi = b;
                int slo = sa;
                for (int k = 0; k < 200 && hi - lo > 4e-16 * hi; ++k) {
                    double mid = 0.5 * (lo + hi);
                    int sm = zero_sign(z, mid);
                    if (sm == 0) {
                        lo = hi = mid;
                        break;
                    }
                    if (sm == slo) {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                double x = 0.5 * (lo + hi);
                for (int k = 0; k < 2; ++k) {
                    double xn = x - newton_step(z, x);
                    if (xn > a && xn < b && std::isfinite(xn)) x = xn;
                }
                return x;
            }
        }
        a = b;
        sa = sb;
    }
    throw ConvergenceError("bessel_zero: sign-change search exhausted its budget");
}

}  // namespace fc::specfun
