#pragma once

#include <vector>

#include "thinlayer/radial.hpp"

// Small configuration-interaction model of the two-electron effective
// Hamiltonian in the total angular momentum M = 0 sector, with the spatial
// antisymmetrizer and the closed-form lower bounds as the validation targets.

namespace thinlayer {

struct Orbital {
    int m = 0;        // signed angular sector
    int index = 0;    // radial excitation within the sector
    double energy = 0.0;
    std::vector<double> radial; // profile f(rho_i), weighted-orthonormal
};

struct OrbitalBasis {
    double a = 0.0;
    double Z = 0.0;
    std::vector<Orbital> orbitals;        // energy-ascending
    std::vector<double> centers, weights; // shared radial grid
};

enum class CISymmetry { fermionic, distinguishable };

struct CIResult {
    double ground_energy = 0.0; // transverse shift removed
    CISymmetry symmetry = CISymmetry::fermionic;
    int basis_size = 0;                 // dimension of the CI space
    double interaction_tolerance = 0.0; // declared integral error estimate
};

// The n_orb lowest one-electron levels of -Delta_rho - Z V_en^a across the
// sectors |m| <= m_max, on one shared radial grid. Sectors with m > 0
// contribute both signed copies. Needs n_orb >= 2 (a pair must be
// constructible); radial-solver errors propagate.
OrbitalBasis build_orbital_basis(double a, double Z, int n_orb, int m_max);

// Lowest eigenvalue of the CI matrix over M = 0 two-orbital products
// (restricted to antisymmetric combinations for the fermionic flag). The
// interaction enters through the radial multipole expansion of V_ee^a,
// truncated at |k| <= 8; interaction_scale = 0 is the noninteracting test
// mode. Throws SingularOverlap when the product basis degenerates and
// ConfigInvalid when the fermionic sector is empty.
CIResult ci_ground_state(const OrbitalBasis& basis, CISymmetry symmetry,
                         double interaction_scale = 1.0);

// Max residual of the antisymmetrizer algebra on the M = 0 product basis:
// idempotence, symmetry, and the commutator with the CI Hamiltonian at the
// given interaction scale.
double antisymmetrizer_check(const OrbitalBasis& basis, double interaction_scale = 1.0);

// Radial multipole coefficient v_k(rho1, rho2) of V_ee^a, from the same
// angular quadrature the CI assembly uses; k in [0, 16].
double multipole_coefficient(double a, int k, double rho1, double rho2);

} // namespace thinlayer
