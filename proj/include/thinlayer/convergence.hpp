#pragma once

#include <string>
#include <vector>

#include "thinlayer/constants.hpp"
#include "thinlayer/radial.hpp"

// Width sweeps against the planar reference levels, rate fits in a|ln a|,
// and eigenvalue counting in localization windows.

namespace thinlayer {

struct ConvergenceEntry {
    double a = 0.0;
    double eigenvalue = 0.0; // level with the transverse threshold removed
    double reference = 0.0;
    double error = 0.0; // |eigenvalue - reference|
};

struct ConvergenceReport {
    std::vector<ConvergenceEntry> entries; // sorted by a descending

    // layer sweeps only; aligned with entries, empty for effective sweeps
    std::vector<double> gaps;       // |(lambda_full - edge) - projected ground|
    std::vector<double> raw_levels; // absolute lambda_full per width

    // one-term fit error ~ c * a|ln a| over entries with a <= 0.2; left at
    // zero when fewer than four such entries survive
    double fitted_c = 0.0;
    double fit_quality = 0.0;
    // two-term refinement error ~ c1 * a|ln a| + c2 * a on the same entries
    double fitted_c1 = 0.0;
    double fitted_c2 = 0.0;
    double fit2_quality = 0.0;

    // effective sweeps: errors strictly decreasing with a.
    // layer sweeps: raw levels strictly decreasing as a grows.
    bool monotone = false;

    bool partial = false; // some widths failed and were dropped
    std::vector<std::string> entry_errors;
};

// Ground level of the effective planar operator -Delta_rho - Z V_en^a per
// width, Richardson-extrapolated over two grid resolutions, against the
// exact reference -Z^2. Requires at least four widths, each in (0, 0.5),
// and Z > 0. Failed widths are dropped and reported in entry_errors.
ConvergenceReport sweep_eff(const std::vector<double>& a_values, double Z);

// Same reference, but the level is the slab ground state minus the discrete
// transverse threshold. Also records the matched-grid full-vs-effective gap
// and the absolute level per width.
ConvergenceReport sweep_layer(const std::vector<double>& a_values, double Z);

struct FitResult {
    double c = 0.0;
    double quality = 0.0; // max relative deviation from the fitted model
};

// Least squares error ~ c * a|ln a| over the report entries with a <= 0.2.
// Needs at least four such entries (ConfigInvalid), not all of which may be
// below 1e-12 (DegenerateFit). Entries with error <= 1e-12 carry no rate
// information and are excluded from the quality maximum.
FitResult fit_alog(const ConvergenceReport& report);

struct Fit2Result {
    double c1 = 0.0;
    double c2 = 0.0;
    double quality = 0.0;
};

// Two-term refinement error ~ c1 * a|ln a| + c2 * a, same entry filter and
// error conditions as fit_alog.
Fit2Result fit_alog2(const ConvergenceReport& report);

struct LocalizeResult {
    double lo = 0.0; // window (lo, hi), open
    double hi = 0.0;
    int count_inside = 0;
    bool certified = false;
    LocalizationWindow window; // projection certificate at (d, a)
    std::string diagnostics;   // empty when certified
};

// Counts spectrum eigenvalues in (lambda_2d + N*edge - d, ... + d), with the
// threshold shift taken from spectrum.edge. The count is certified when the
// projection certificate at (d, a) is valid, lambda_2d sits on the planar
// reference spectrum with d below half its isolation distance, and the count
// equals the expected multiplicity. Never throws: failures are reported via
// certified=false and the diagnostics string.
LocalizeResult localize(double lambda_2d, double d, double a, const LayerConfig& cfg,
                        const EigenResult& spectrum, int multiplicity = 1);

} // namespace thinlayer
