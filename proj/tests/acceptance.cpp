// One line per acceptance criterion; a criterion passes when its suite passes within the time limit.
#include <cstdio>
#include <string>
#include <vector>

#include "fieldconc/harness.hpp"

namespace {

struct Criterion {
    int id;
    const char* suite;
    const char* title;
    double limit_seconds;
};

const std::vector<Criterion> kCriteria = {
    {1, "specfun", "special-function identities and zero interlacing", 30},
    {2, "bessel-identity", "Bessel gradient integral identity", 60},
    {3, "legendre-bounds", "associated Legendre maximum bounds and window", 60},
    {4, "teig", "contrast roots, residuals and boundary traces", 120},
    {5, "localization", "surface localization of modes and gradients", 120},
    {6, "oscillation", "boundary gradient growth exponent", 120},
    {7, "oracle-disk", "scattering solver against the disk series", 300},
    {8, "vanishing", "near-vanishing scattered field in the exterior annulus", 600},
    {9, "concentration", "gap amplification sweeps and argmax location", 1200},
    {10, "presets", "geometry presets concentrate the gradient in the gap", 1800},
};

}  // namespace

int main()
{
    int failed = 0;
    for (const Criterion& c : kCriteria) {
        fc::harness::CheckResult r = fc::harness::run_suite(c.suite);
        bool in_time = r.seconds < c.limit_seconds;
        bool ok = r.passed && in_time;
        if (!ok) ++failed;
        std::printf("criterion %d [%s] %s (%.1fs, limit %.0fs%s): %s\n", c.id, ok ? "PASS" : "FAIL", c.title, r.seconds,
                    c.limit_seconds, in_time ? "" : ", over time", r.summary.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(kCriteria.size()) - failed, kCriteria.size());
    return failed == 0 ? 0 : 1;
}
