#pragma once

namespace thinlayer {

// Layer geometry and atomic data. Widths are in atomic units throughout.
struct LayerConfig {
    double a = 0.1; // layer width, > 0
    double Z = 1.0; // nuclear charge, > 0
    int N = 1;      // electron count, >= 1
};

// Throws ConfigInvalid if a field violates its range.
void check_config(const LayerConfig& cfg);

// Closed-form constants attached to a (N, Z) pair.
struct ConstantSet {
    double kato;  // Gamma(1/4)^4 / (4 pi^2), the |p|^{-1/2} 1/rho |p|^{-1/2} norm
    double c1;    // free vs Coulomb resolvent comparison
    double c2;    // potential difference integral bound
    double c3;    // second order (W-operator) coefficient
    double mu;    // reference energy strictly below the 2d spectrum
    double e_low; // lower bound on inf spec of the 2d Hamiltonian
};

ConstantSet constant_set(const LayerConfig& cfg);

// Solves c * x |ln x| = rhs for x in (0, 1/e]. The left side is strictly
// increasing there, so the root is unique. Throws NoRootInRange when
// rhs > c/e (the maximum attainable value).
double solve_xlnx(double c, double rhs);

// Width thresholds guarding the various resolvent comparisons; d is the
// spectral distance they are evaluated at.
struct ThresholdSet {
    double a0; // effective vs 2d comparison regime (capped at 1/e)
    double a1; // full vs effective comparison regime
    double a2; // same with the d/2 worst case substituted
    double a3; // full vs 2d comparison regime: min of its four candidates
    double d;
};

// a1 uses the substitution d_eff = d/2 (which makes a1 == a2). The overload
// lets a caller with sharper knowledge of the effective spectrum pass its own
// d_eff.
ThresholdSet thresholds(const LayerConfig& cfg, double d);
ThresholdSet thresholds(const LayerConfig& cfg, double d, double d_eff);

enum class BoundKind {
    eff_vs_2d,   // effective resolvent vs planar atom, O(a|ln a|)
    full_vs_eff, // confined resolvent vs effective one, O(a)
    full_vs_2d,  // confined resolvent vs planar atom, sum of the two above
    gen_dif      // sandwiched potential difference for one W profile
};

// Right-hand side of the inequality selected by `kind`, evaluated at width a
// and spectral distance d. For full_vs_eff, d is understood as the distance
// to the effective spectrum. gen_dif ignores d and cfg and instead needs the
// integral of the W profile in w_integral. Throws InvalidWidth outside
// (0, 1/e].
double resolvent_bound(BoundKind kind, const LayerConfig& cfg, double a, double d,
                       double w_integral = 0.0);

// Spectral projection comparison over a circle of radius d. K is the
// full_vs_2d coefficient divided by a|ln a| at the working point; proj_bound
// the resulting projection difference estimate. valid means every smallness
// condition held, including a < a3(d); when one fails the struct is returned
// with valid = false instead of throwing.
struct LocalizationWindow {
    double K = 0.0;
    double proj_bound = 0.0;
    bool valid = false;
};

LocalizationWindow localization_window(double d, double a, const LayerConfig& cfg);

} // namespace thinlayer
