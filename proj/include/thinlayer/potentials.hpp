#pragma once

#include <vector>

namespace thinlayer {

enum class PotentialKind { en, ee, coulomb2d };
enum class WKind { en, ee };

// Effective in-plane potentials for a layer of width a, evaluated by adaptive
// quadrature to an absolute error of 1e-10 * max(1, value). Both scale as
// v(a, rho) = v1(rho / a) / a.
double v_en(double a, double rho);
double v_ee(double a, double rho);

// Unit-width profiles.
double v1_en(double x);
double v1_ee(double x);

// Integral over (0, inf) of W(rho) = 1 - rho * v1(rho), computed numerically
// with an analytic tail model. The closed forms live in the tests as oracles.
double w_integral(WKind kind);

struct WProfile {
    WKind kind;
    std::vector<double> rho;
    std::vector<double> w;
};

// Samples W on the given nodes and verifies 0 <= W <= 1 at each.
WProfile w_profile(WKind kind, const std::vector<double>& nodes);

struct TabulatedPotential {
    PotentialKind kind;
    double a;
    std::vector<double> nodes;
    std::vector<double> values;
    double tail_coeff; // lim rho * V(rho), equal to 1 for every kind
};

// Evaluates the chosen potential on the nodes and checks the type invariants
// (positivity, the 1/rho bound, strict decrease). Throws InvalidGrid for a
// bad node list.
TabulatedPotential tabulate(PotentialKind kind, double a, std::vector<double> nodes);

} // namespace thinlayer
