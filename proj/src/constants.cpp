#include "thinlayer/constants.hpp"

#include "thinlayer/errors.hpp"
#include "thinlayer/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace thinlayer {

namespace {

const double kInvE = std::exp(-1.0);

double xlnx(double x) { return x * std::abs(std::log(x)); }

double binom2(int n) { return 0.5 * n * (n - 1); }

// coefficient of `a` in the W-operator norm estimate at alpha = -mu
double w_op_coefficient(const LayerConfig& cfg, double mu) {
    const double g4 = std::pow(num::gamma_quarter(), 4);
    const double n32 = std::pow(double(cfg.N), 1.5);
    return g4 * n32 / (6.0 * std::pow(M_PI, 3) * std::sqrt(-mu)) *
           (cfg.Z * cfg.Z + (cfg.N - 1) * (cfg.N - 1) / std::sqrt(2.0));
}

void check_width(double a) {
    if (!(a > 0.0) || a > kInvE)
        throw InvalidWidth("width a = " + std::to_string(a) + " outside (0, 1/e]");
}

} // namespace

void check_config(const LayerConfig& cfg) {
    if (!(cfg.a > 0.0)) throw ConfigInvalid("layer width a must be positive");
    if (!(cfg.Z > 0.0)) throw ConfigInvalid("nuclear charge Z must be positive");
    if (cfg.N < 1) throw ConfigInvalid("electron count N must be at least 1");
}

ConstantSet constant_set(const LayerConfig& cfg) {
    check_config(cfg);
    ConstantSet cs{};
    const double g4 = std::pow(num::gamma_quarter(), 4);
    const double pi2 = M_PI * M_PI;
    cs.kato = g4 / (4.0 * pi2);

    // c1 is the positive root of x^2 - kato*Z*sqrt(N)*x - 1
    const double b = g4 * cfg.Z * std::sqrt(double(cfg.N)) / (8.0 * pi2);
    cs.c1 = b + std::sqrt(b * b + 1.0);

    cs.c2 = (2.0 * std::sqrt(3.0) + 4.0 * std::sqrt(2.0)) *
            (cfg.Z * cfg.N * (0.25 - 1.0 / pi2) +
             binom2(cfg.N) * (1.0 / 3.0 - 5.0 / (4.0 * pi2)));

    const double shift = g4 * cfg.Z / (8.0 * pi2);
    cs.mu = -cfg.N * shift * shift - 1.0;
    cs.e_low = -cfg.N * shift * shift;

    cs.c3 = 2.0 * cs.c1 * cs.c1 * w_op_coefficient(cfg, cs.mu);
    return cs;
}

double solve_xlnx(double c, double rhs) {
    if (!(c > 0.0) || !(rhs > 0.0))
        throw NoRootInRange("solve_xlnx: need positive coefficient and target");
    if (rhs > c * kInvE * (1.0 + 1e-15))
        throw NoRootInRange("solve_xlnx: target " + std::to_string(rhs) +
                            " exceeds maximum " + std::to_string(c * kInvE));
    double lo = 1e-300, hi = kInvE;
    // x|ln x| is strictly increasing on (0, 1/e]
    for (int it = 0; it < 2000; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (c * xlnx(mid) < rhs)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= 1e-16 * hi) break;
    }
    double x = 0.5 * (lo + hi);
    if (std::abs(c * xlnx(x) - rhs) > 1e-12 * rhs) {
        // extremely small targets push x toward the denormal range where
        // bisection on the midpoint stalls; fall back to a log-scale search
        double tlo = std::log(1e-300), thi = std::log(kInvE);
        for (int it = 0; it < 200; ++it) {
            double tm = 0.5 * (tlo + thi);
            if (c * xlnx(std::exp(tm)) < rhs)
                tlo = tm;
            else
                thi = tm;
        }
        x = std::exp(0.5 * (tlo + thi));
    }
    return x;
}

ThresholdSet thresholds(const LayerConfig& cfg, double d) {
    return thresholds(cfg, d, 0.5 * d);
}

ThresholdSet thresholds(const LayerConfig& cfg, double d, double d_eff) {
    check_config(cfg);
    if (!(d > 0.0) || !(d_eff > 0.0))
        throw ConfigInvalid("thresholds: spectral distances must be positive");
    const ConstantSet cs = constant_set(cfg);
    ThresholdSet t{};
    t.d = d;

    const double amp = std::max(1.0, -cs.mu / d);
    const double c0 = amp * cs.c1 * cs.c1 * cs.c2;
    // no root in (0, 1/e] means the defining inequality already holds
    // throughout, so the threshold saturates at 1/e
    t.a0 = (0.5 > c0 * kInvE) ? kInvE : solve_xlnx(c0, 0.5);

    t.a1 = 1.0 / (cs.c3 * std::max(1.0, -cs.mu / d_eff));
    t.a2 = 1.0 / (cs.c3 * std::max(1.0, -2.0 * cs.mu / d));
    t.a3 = std::min(
        {kInvE, std::sqrt(3.0) * M_PI / (2.0 * cfg.N * (cfg.N - 1 + 2.0 * cfg.Z)), t.a0,
         t.a2});
    return t;
}

double resolvent_bound(BoundKind kind, const LayerConfig& cfg, double a, double d,
                       double w_integral) {
    check_width(a);
    if (kind == BoundKind::gen_dif) {
        if (w_integral < 0.0) throw ConfigInvalid("gen_dif: negative W integral");
        return 2.0 * std::sqrt(3.0) * xlnx(a) * w_integral +
               4.0 * std::sqrt(2.0) * a * std::sqrt(w_integral);
    }
    check_config(cfg);
    if (!(d > 0.0)) throw ConfigInvalid("resolvent_bound: d must be positive");
    const ConstantSet cs = constant_set(cfg);
    const double lead = 8.0 * cfg.N / (std::sqrt(3.0) * M_PI) * (cfg.N - 1 + 2.0 * cfg.Z);
    switch (kind) {
    case BoundKind::eff_vs_2d:
        return 2.0 / d * std::max(1.0, -cs.mu / d) * cs.c1 * cs.c1 * cs.c2 * xlnx(a);
    case BoundKind::full_vs_eff:
        return (lead + cs.c3 * std::max(1.0, -cs.mu / d)) * a / d +
               2.0 * a * a / (3.0 * M_PI * M_PI);
    case BoundKind::full_vs_2d:
        return 2.0 / d * std::max(1.0, -cs.mu / d) * cs.c1 * cs.c1 * cs.c2 * xlnx(a) +
               2.0 / d * (lead + cs.c3 * std::max(1.0, -2.0 * cs.mu / d)) * a +
               2.0 * a * a / (3.0 * M_PI * M_PI);
    default:
        throw ConfigInvalid("resolvent_bound: unknown kind");
    }
}

LocalizationWindow localization_window(double d, double a, const LayerConfig& cfg) {
    check_config(cfg);
    if (!(d > 0.0)) throw ConfigInvalid("localization_window: d must be positive");
    LocalizationWindow win;
    const double inf = std::numeric_limits<double>::infinity();
    if (!(a > 0.0) || a > kInvE) {
        win.K = win.proj_bound = inf;
        return win; // out of regime, diagnostics only
    }
    win.K = resolvent_bound(BoundKind::full_vs_2d, cfg, a, d) / xlnx(a);
    const double t = 6.0 * d * win.K * xlnx(a);
    win.proj_bound = (t < 1.0) ? 9.0 * d * win.K * xlnx(a) / (1.0 - t) : inf;
    const ThresholdSet thr = thresholds(cfg, d);
    win.valid = (a < thr.a3) && (t < 1.0) && (win.proj_bound < 1.0);
    return win;
}

} // namespace thinlayer
