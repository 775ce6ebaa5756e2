#include <cmath>
#include <string>

#include "fieldconc/errors.hpp"
#include "fieldconc/specfun.hpp"

namespace fc::specfun {

namespace {

void check_gamma_arg(double x)
{
    if (!std::isfinite(x)) throw DomainError("gamma argument must be finite");
    if (x <= 0.0 && x == std::floor(x))
        throw DomainError("gamma has a pole at " + std::to_string(x));
}

}  // namespace

double gamma_fn(double x)
{
    check_gamma_arg(x);
    if (x > 171.6) throw OutOfRangeError("gamma(" + std::to_string(x) + ") overflows; use log_gamma");
    return std::tgamma(x);
}

double log_gamma(double x)
{
    check_gamma_arg(x);
    if (x < 0.0) throw DomainError("log_gamma is only provided for positive arguments");
    return std::lgamma(x);
}

}  // namespace fc::specfun
