#pragma once

#include "thinlayer/radial.hpp"

#include <array>
#include <vector>

namespace thinlayer {

// Eigenmode of the 1D Dirichlet Laplacian across a slab of width a,
// sampled on the interior nodes z_j = -a/2 + j*h, h = a/(n_z+1).
// The sampled profile satisfies h * sum(values^2) = 1 exactly.
struct TransverseMode {
    int n = 1;
    double a = 1.0;
    double energy = 0.0; // (n*pi/a)^2
    enum class Parity { even_cos, odd_sin } parity = Parity::even_cos;
    std::vector<double> nodes;
    std::vector<double> values;
};

// requires n >= 1, a > 0 and n_z >= 2n so the sampled profile resolves the mode
TransverseMode transverse_mode(int n, double a, int n_z = 1000);

// eigenvalue of the discrete 3-point Dirichlet Laplacian on n_z interior
// nodes: (2 - 2cos(n*pi*h/a)) / h^2; approaches (n*pi/a)^2 from below
double transverse_energy_disc(int n, double a, int n_z);

std::vector<double> layer_z_nodes(double a, int n_z);

// Tensor grid for the slab problem: radial line (finite volumes) times a
// uniform interior z-line whose width is supplied per call.
struct CylGrid {
    RadialGrid rho;
    int n_z = 48;
};

// k lowest eigenvalues of -Laplacian - Z/sqrt(rho^2+z^2) on the slab with
// Dirichlet plates, in the angular sector grid.rho.m. The result's edge
// field holds the discrete transverse threshold E_1,disc; eigenvalues are
// absolute (edge not subtracted). Residuals are relative to max(1, |lambda|).
// Throws InsufficientBoundStates when a requested level sits in the
// discretized continuum (above edge plus the radial-box offset allowance).
EigenResult solve_layer_n1(double a, double Z, const CylGrid& grid, int k);

// Ground level of the projected block chi_1 (H) chi_1 on the same discrete
// grid, reported relative to the discrete edge. This is the matched-grid
// effective level used for full-vs-effective gap studies.
double projected_ground(double a, double Z, const CylGrid& grid);

// max over probe radii of |sum_j h chi_1(z_j)^2 / sqrt(rho^2+z_j^2) - V_en^a(rho)|
double projection_consistency(double a, const std::vector<double>& probe_rhos,
                              int n_z = 1000);

// Block-decomposition check of the resolvent at shift xi: the slab operator
// is split by the rank-one-per-radial-node projector onto the sampled lowest
// transverse mode, all four blocks of the Schur-complement identity are
// assembled from the discrete matrices, and each is compared against the
// directly solved resolvent. Residuals are Frobenius norms relative to the
// dominant block scale; the PQ and QQ comparisons are evaluated on a fixed
// random probe subspace (seeded, deterministic).
struct FeshbachReport {
    double xi = 0.0;
    std::array<double, 4> block_residuals{}; // PP, PQ, QP, QQ
    double w_norm = 0.0;     // spectral norm of the coupling Schur term
    double r_bot_norm = 0.0; // spectral norm of the complement resolvent
};

// requires xi below the discrete transverse threshold and outside a 1e-8
// neighborhood of the discrete spectrum (else SingularShift)
FeshbachReport feshbach_residual(double a, double Z, double xi, const CylGrid& grid);

// largest eigenvalue of (T_2d + alpha)^(-1/2) W (T_2d + alpha)^(-1/2) where
// W is the coupling Schur term at shift xi, T_2d the discrete in-plane
// kinetic operator, and alpha = -mu from the closed-form constants
double w_operator_norm(double a, double Z, double xi, const CylGrid& grid);

} // namespace thinlayer
