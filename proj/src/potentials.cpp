#include "thinlayer/potentials.hpp"

#include "thinlayer/errors.hpp"
#include "thinlayer/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace thinlayer {

namespace {

void check_point(double a, double rho) {
    if (!(a > 0.0)) throw ConfigInvalid("potential: width a must be positive");
    if (!(rho > 0.0)) throw ConfigInvalid("potential: radius must be positive");
}

num::QuadOptions pot_quad() {
    num::QuadOptions opt;
    opt.abs_tol = 1e-12;
    opt.rel_tol = 1e-12;
    opt.max_intervals = 8000;
    return opt;
}

// Autocorrelation of the transverse ground-state density at unit width:
// g(u) = (1/4) integral of 2cos^2(pi z) * 2cos^2(pi (z+u)) over the overlap,
// reduced in closed form. g(0) = 3/8.
double overlap_weight(double u) {
    return 0.25 * ((1.0 - u) * (1.0 + 0.5 * std::cos(2.0 * M_PI * u)) +
                   (3.0 / (4.0 * M_PI)) * std::sin(2.0 * M_PI * u));
}

// Moments of the transverse density (en) and of the coordinate difference
// of two independent transverse coordinates (ee), at unit width.
struct TailMoments {
    double m2, m4;
};

TailMoments tail_moments(WKind kind) {
    static const TailMoments en = [] {
        auto opt = pot_quad();
        double m2 = num::integrate(
            [](double s) { return 4.0 * s * s * std::pow(std::cos(M_PI * s), 2); }, 0.0,
            0.5, opt);
        double m4 = num::integrate(
            [](double s) {
                return 4.0 * s * s * s * s * std::pow(std::cos(M_PI * s), 2);
            },
            0.0, 0.5, opt);
        return TailMoments{m2, m4};
    }();
    if (kind == WKind::en) return en;
    // difference of two independent symmetric coordinates
    return {2.0 * en.m2, 2.0 * en.m4 + 6.0 * en.m2 * en.m2};
}

} // namespace

double v1_en(double x) {
    if (!(x > 0.0)) throw ConfigInvalid("v1_en: radius must be positive");
    auto opt = pot_quad();
    // cos^2 - 1 vanishes quadratically at 0, so the subtracted integrand is
    // regular; the split-off Coulomb piece integrates to asinh
    double smooth = num::integrate(
        [x](double s) {
            double c = std::cos(M_PI * s);
            return (c * c - 1.0) / std::sqrt(x * x + s * s);
        },
        0.0, 0.5, opt);
    return 4.0 * (smooth + std::asinh(0.5 / x));
}

double v1_ee(double x) {
    if (!(x > 0.0)) throw ConfigInvalid("v1_ee: radius must be positive");
    auto opt = pot_quad();
    const double g0 = overlap_weight(0.0);
    double smooth = num::integrate(
        [x, g0](double u) {
            return (overlap_weight(u) - g0) / std::sqrt(x * x + u * u);
        },
        0.0, 1.0, opt);
    return 8.0 * (smooth + g0 * std::asinh(1.0 / x));
}

double v_en(double a, double rho) {
    check_point(a, rho);
    return v1_en(rho / a) / a;
}

double v_ee(double a, double rho) {
    check_point(a, rho);
    return v1_ee(rho / a) / a;
}

double w_integral(WKind kind) {
    const double cutoff = 1e4;
    auto w = [kind](double rho) {
        double v = (kind == WKind::en) ? v1_en(rho) : v1_ee(rho);
        return 1.0 - rho * v;
    };
    num::QuadOptions opt;
    opt.abs_tol = 1e-10;
    opt.rel_tol = 1e-10;
    opt.max_intervals = 4000;
    // split so the adaptive scheduler does not chase the rho^{-2} decay with
    // one global error budget
    double head = num::integrate(w, 0.0, 1.0, opt);
    double mid = num::integrate(w, 1.0, 100.0, opt);
    double far = num::integrate(w, 100.0, cutoff, opt);
    // W(rho) = m2/(2 rho^2) - (3 m4/8) rho^{-4} + O(rho^{-6}) past the cutoff
    auto m = tail_moments(kind);
    double tail = m.m2 / (2.0 * cutoff) - m.m4 / (8.0 * cutoff * cutoff * cutoff);
    return head + mid + far + tail;
}

WProfile w_profile(WKind kind, const std::vector<double>& nodes) {
    if (nodes.empty()) throw InvalidGrid("w_profile: empty node list");
    for (size_t i = 0; i < nodes.size(); ++i) {
        if (!(nodes[i] > 0.0)) throw InvalidGrid("w_profile: nodes must be positive");
        if (i > 0 && !(nodes[i] > nodes[i - 1]))
            throw InvalidGrid("w_profile: nodes must increase strictly");
    }
    WProfile prof{kind, nodes, {}};
    prof.w.reserve(nodes.size());
    for (double rho : nodes) {
        double v = (kind == WKind::en) ? v1_en(rho) : v1_ee(rho);
        double wv = 1.0 - rho * v;
        if (wv < -1e-12 || wv > 1.0 + 1e-12)
            throw ComputationFailed("w_profile_range",
                                    "w_profile: W outside [0, 1] at rho = " +
                                        std::to_string(rho));
        prof.w.push_back(std::clamp(wv, 0.0, 1.0));
    }
    return prof;
}

TabulatedPotential tabulate(PotentialKind kind, double a, std::vector<double> nodes) {
    if (!(a > 0.0)) throw ConfigInvalid("tabulate: width a must be positive");
    if (nodes.empty()) throw InvalidGrid("tabulate: empty node list");
    for (size_t i = 0; i < nodes.size(); ++i) {
        if (!(nodes[i] > 0.0)) throw InvalidGrid("tabulate: nodes must be positive");
        if (i > 0 && !(nodes[i] > nodes[i - 1]))
            throw InvalidGrid("tabulate: nodes must increase strictly");
    }
    TabulatedPotential tab{kind, a, std::move(nodes), {}, 1.0};
    tab.values.reserve(tab.nodes.size());
    for (double rho : tab.nodes) {
        double v;
        switch (kind) {
        case PotentialKind::en: v = v_en(a, rho); break;
        case PotentialKind::ee: v = v_ee(a, rho); break;
        default: v = 1.0 / rho; break;
        }
        tab.values.push_back(v);
    }
    for (size_t i = 0; i < tab.nodes.size(); ++i) {
        double cap = 1.0 / tab.nodes[i];
        if (tab.values[i] < 0.0 || tab.values[i] > cap * (1.0 + 1e-12))
            throw ComputationFailed("tabulate_bounds",
                                    "tabulate: value escapes [0, 1/rho] at rho = " +
                                        std::to_string(tab.nodes[i]));
        if (i > 0 && !(tab.values[i] < tab.values[i - 1]))
            throw ComputationFailed("tabulate_monotonicity",
                                    "tabulate: values not strictly decreasing");
    }
    return tab;
}

} // namespace thinlayer
