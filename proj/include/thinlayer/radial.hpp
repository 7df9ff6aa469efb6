#pragma once

#include "thinlayer/potentials.hpp"

#include <string>
#include <vector>

namespace thinlayer {

// Discretization of the planar radial operator -(1/rho)(rho f')' + m^2/rho^2
// on (0, rho_max) with a Dirichlet wall at rho_max. The flux form keeps the
// matrix symmetric after the weight rescaling and is second-order accurate;
// nodes are cell centers, so none of them touches rho = 0.
struct RadialGrid {
    double rho_max = 200.0;
    int n_nodes = 800;
    enum class Spacing { uniform, graded } spacing = Spacing::graded;
    int m = 0;          // angular momentum sector
    double core = 1e-3; // length scale of the node clustering (graded only)
};

struct EigenResult {
    std::vector<double> eigenvalues; // ascending
    std::vector<double> residuals;   // ||H psi - lambda psi|| per pair
    RadialGrid grid;
    std::string potential_kind;
    double edge = 0.0; // continuum onset the eigenvalues are reported against
    // discretization support, for downstream quadrature and checks
    std::vector<double> centers;
    std::vector<double> weights; // cell masses rho_i * delta_i
    // eigenvectors, orthonormal in the plain Euclidean sense; the radial
    // profile is vectors[j][i] / sqrt(weights[i])
    std::vector<std::vector<double>> vectors;
};

// Exact planar hydrogen levels -Z^2/(2n-1)^2, n = 1..count.
std::vector<double> hydrogen2d_levels(double Z, int count);

// Lowest k eigenvalues of -(1/rho)(rho f')' + m^2/rho^2 + coupling * V(rho).
// The potential is re-evaluated exactly at the cell centers from pot's kind
// and width; pot's nodes must cover the grid support. coupling = -Z gives the
// attractive electron-nucleus problem; 0 gives the free half-line (which has
// no bound states and therefore throws InsufficientBoundStates).
EigenResult solve_radial(const TabulatedPotential& pot, const RadialGrid& grid, int k,
                         double coupling = -1.0);

// Single-electron effective layer problem in angular sector m: eigenvalues of
// -Delta_rho - Z V_en^a, i.e. the effective Hamiltonian with the transverse
// shift removed. The grid is auto-selected from a.
EigenResult eff_levels_n1(double a, double Z, int m, int k);

// Largest eigenvalue of (T+2)^{-1/2} (1/rho - V^a) (T+2)^{-1/2} on the m = 0
// sector, T the discrete radial Laplacian; coulomb2d gives identically zero.
double sandwich_norm(double a, PotentialKind kind, const RadialGrid& grid);

// Internal discretization, exposed for tests and for the layer solver which
// reuses the radial factor of its tensor grid.
struct RadialOperator {
    std::vector<double> centers, weights; // cell data
    std::vector<double> diag, offdiag;    // symmetric tridiagonal matrix
};

RadialOperator build_radial_operator(const RadialGrid& grid);

} // namespace thinlayer
