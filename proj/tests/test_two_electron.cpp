#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "thinlayer/constants.hpp"
#include "thinlayer/errors.hpp"
#include "thinlayer/numerics.hpp"
#include "thinlayer/potentials.hpp"
#include "thinlayer/radial.hpp"
#include "thinlayer/two_electron.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <vector>

using namespace thinlayer;

namespace {

constexpr double kPi = 3.14159265358979323846;

// v_k(rho1, rho2) by direct adaptive quadrature over the relative angle,
// straight from the definition
double direct_vk(double a, int k, double r1, double r2) {
    num::QuadOptions opt;
    opt.rel_tol = 1e-10;
    auto f = [&](double th) {
        double s = std::sin(0.5 * th);
        double r12 = std::sqrt((r1 - r2) * (r1 - r2) + 4.0 * r1 * r2 * s * s);
        return v_ee(a, r12) * std::cos(k * th);
    };
    return num::integrate(f, 0.0, kPi, opt) / kPi;
}

// radial pair integral int int gl(r1) r1 v_k(r1,r2) gr(r2) r2 dr1 dr2 by
// nested adaptive quadrature in the plain (r1, r2) coordinates; independent
// of the CI assembly, which streams a fixed rotated-coordinate rule
double pair_adaptive(const OrbitalBasis& b, int k, const std::vector<num::Spline>& f,
                     int al, int ar, int bl, int br) {
    double hi = std::min(b.centers.back(), 60.0);
    auto outer = [&](double r1) {
        auto inner = [&](double r2) {
            return f[bl](r2) * f[br](r2) * r2 * multipole_coefficient(b.a, k, r1, r2);
        };
        return f[al](r1) * f[ar](r1) * r1 *
               num::integrate(inner, 1e-9, hi, {.rel_tol = 1e-8});
    };
    return num::integrate(outer, 1e-9, hi, {.rel_tol = 1e-7});
}

std::vector<num::Spline> profile_splines(const OrbitalBasis& b) {
    std::vector<num::Spline> f;
    for (const auto& o : b.orbitals) f.emplace_back(b.centers, o.radial);
    return f;
}

// noninteracting ground energy straight from the orbital energies and the
// M = 0 / antisymmetry counting rules
double free_ground(const OrbitalBasis& b, CISymmetry sym) {
    double best = 0.0;
    bool found = false;
    int n = static_cast<int>(b.orbitals.size());
    for (int al = 0; al < n; ++al)
        for (int be = 0; be < n; ++be) {
            if (b.orbitals[al].m + b.orbitals[be].m != 0) continue;
            if (sym == CISymmetry::fermionic && al == be) continue;
            double e = b.orbitals[al].energy + b.orbitals[be].energy;
            if (!found || e < best) best = e;
            found = true;
        }
    REQUIRE(found);
    return best;
}

OrbitalBasis prefix_basis(const OrbitalBasis& b, int n) {
    OrbitalBasis out = b;
    out.orbitals.resize(n);
    return out;
}

} // namespace

TEST_CASE("orbital basis collects the lowest sector levels in order") {
    OrbitalBasis b = build_orbital_basis(0.1, 2.0, 4, 1);
    REQUIRE(b.orbitals.size() == 4);
    CHECK(b.a == 0.1);
    CHECK(b.Z == 2.0);
    REQUIRE(b.centers.size() > 100);
    REQUIRE(b.weights.size() == b.centers.size());
    for (double w : b.weights) CHECK(w > 0.0);

    for (std::size_t i = 0; i + 1 < b.orbitals.size(); ++i)
        CHECK(b.orbitals[i].energy <= b.orbitals[i + 1].energy + 1e-14);

    // ground orbital is the m = 0 sector minimum, well below the rest
    CHECK(b.orbitals[0].m == 0);
    CHECK(b.orbitals[0].index == 0);
    CHECK(b.orbitals[0].energy > -4.0);
    CHECK(b.orbitals[0].energy < -3.0);

    // the +1 / -1 pair enters with bitwise equal energies and profiles
    int plus = -1, minus = -1;
    for (int i = 0; i < 4; ++i) {
        if (b.orbitals[i].m == 1) plus = i;
        if (b.orbitals[i].m == -1) minus = i;
    }
    REQUIRE(plus >= 0);
    REQUIRE(minus >= 0);
    CHECK(b.orbitals[plus].energy == b.orbitals[minus].energy);
    CHECK(b.orbitals[plus].radial == b.orbitals[minus].radial);

    // every level sits above its unconfined hydrogen counterpart but stays
    // bound; excited levels of Z = 2 lie above -4 * (1/9)
    for (const auto& o : b.orbitals) {
        CHECK(o.energy < -1e-3);
        if (o.index > 0 || o.m != 0) CHECK(o.energy > -4.0 / 9.0);
    }

    // weighted orthonormality within each sector
    for (int i = 0; i < 4; ++i)
        for (int j = i; j < 4; ++j) {
            if (b.orbitals[i].m != b.orbitals[j].m) continue;
            double s = 0.0;
            for (std::size_t q = 0; q < b.centers.size(); ++q)
                s += b.weights[q] * b.orbitals[i].radial[q] * b.orbitals[j].radial[q];
            CHECK(std::abs(s - (i == j ? 1.0 : 0.0)) < 1e-8);
        }
}

TEST_CASE("orbital basis rejects invalid requests") {
    CHECK_THROWS_AS(build_orbital_basis(0.1, 2.0, 1, 0), ConfigInvalid);
    CHECK_THROWS_AS(build_orbital_basis(0.1, 2.0, 4, -1), ConfigInvalid);
    CHECK_THROWS_AS(build_orbital_basis(0.1, 0.0, 2, 0), ConfigInvalid);
    CHECK_THROWS_AS(build_orbital_basis(1.2, 2.0, 2, 0), InvalidWidth);
}

TEST_CASE("noninteracting ground states are sums of orbital energies") {
    OrbitalBasis b = build_orbital_basis(0.1, 2.0, 4, 1);

    CIResult ferm = ci_ground_state(b, CISymmetry::fermionic, 0.0);
    CIResult dist = ci_ground_state(b, CISymmetry::distinguishable, 0.0);

    CHECK(ferm.ground_energy ==
          doctest::Approx(free_ground(b, CISymmetry::fermionic)).epsilon(1e-13));
    CHECK(dist.ground_energy ==
          doctest::Approx(free_ground(b, CISymmetry::distinguishable)).epsilon(1e-13));
    // distinguishable minimum doubles the ground orbital
    CHECK(dist.ground_energy == doctest::Approx(2.0 * b.orbitals[0].energy).epsilon(1e-13));
    // the Pauli-allowed minimum pairs the ground orbital with the second
    // m = 0 level: the +1/-1 combination lies higher
    CHECK(ferm.ground_energy > dist.ground_energy);

    CHECK(ferm.interaction_tolerance == 0.0);
    CHECK(dist.interaction_tolerance == 0.0);
    CHECK(ferm.symmetry == CISymmetry::fermionic);
    CHECK(dist.symmetry == CISymmetry::distinguishable);

    // M = 0 products of {0a, -1, +1, 0b}: four same-|m| combinations plus
    // the (-1,+1) swap pair; antisymmetry keeps one per unordered pair
    CHECK(dist.basis_size == 6);
    CHECK(ferm.basis_size == 2);
}

TEST_CASE("multipole coefficients match direct angular quadrature") {
    struct Spot {
        double a, r1, r2;
        int k;
    };
    const Spot spots[] = {{0.1, 1.0, 1.0, 0},  {0.1, 0.5, 2.0, 1},  {0.1, 2.0, 2.0, 3},
                          {0.1, 0.3, 0.9, 0},  {0.05, 5.0, 1.0, 2}, {0.2, 1.0, 1.1, 8},
                          {0.1, 0.05, 0.07, 0}, {0.3, 10.0, 10.0, 5}};
    for (const auto& s : spots) {
        CAPTURE(s.a);
        CAPTURE(s.k);
        CAPTURE(s.r1);
        double lib = multipole_coefficient(s.a, s.k, s.r1, s.r2);
        double ref = direct_vk(s.a, s.k, s.r1, s.r2);
        CHECK(std::abs(lib - ref) <= 1e-6 * std::max(1.0, std::abs(ref)));
    }

    // exchange symmetry of the kernel, exactly as computed
    CHECK(multipole_coefficient(0.1, 2, 0.4, 1.7) == multipole_coefficient(0.1, 2, 1.7, 0.4));

    // the monopole dominates and is positive for a repulsive interaction
    double v0 = multipole_coefficient(0.1, 0, 1.0, 1.0);
    CHECK(v0 > 0.0);
    CHECK(std::abs(multipole_coefficient(0.1, 8, 1.0, 1.0)) < v0);

    CHECK_THROWS_AS(multipole_coefficient(0.1, 17, 1.0, 1.0), ConfigInvalid);
    CHECK_THROWS_AS(multipole_coefficient(0.1, -1, 1.0, 1.0), ConfigInvalid);
    CHECK_THROWS_AS(multipole_coefficient(0.1, 0, 0.0, 1.0), ConfigInvalid);
    CHECK_THROWS_AS(multipole_coefficient(1.0, 0, 1.0, 1.0), InvalidWidth);
}

TEST_CASE("fermionic pair energy matches an independently assembled 2x2") {
    OrbitalBasis b = build_orbital_basis(0.1, 2.0, 2, 0);
    REQUIRE(b.orbitals[0].m == 0);
    REQUIRE(b.orbitals[1].m == 0);
    auto f = profile_splines(b);

    // (|01> - |10>)/sqrt(2) diagonalizes the 2x2 swap-symmetric interaction,
    // so the fermionic ground is e0 + e1 + J - K with monopole integrals
    double J = pair_adaptive(b, 0, f, 0, 0, 1, 1);
    double K = pair_adaptive(b, 0, f, 0, 1, 0, 1);
    double oracle = b.orbitals[0].energy + b.orbitals[1].energy + J - K;

    CIResult lib = ci_ground_state(b, CISymmetry::fermionic, 1.0);
    CHECK(lib.basis_size == 1);
    CHECK(J > 0.0);
    CHECK(K > 0.0);
    CHECK(K < J);
    CHECK(std::abs(lib.ground_energy - oracle) <= lib.interaction_tolerance + 1e-6);
    CHECK(lib.interaction_tolerance > 0.0);
    CHECK(lib.interaction_tolerance < 1e-3);
}

TEST_CASE("distinguishable CI matches an independently assembled 3x3") {
    // {0, -1, +1} exercises the k = 1 and k = 2 selection rules: the (0,0)
    // product couples to (-1,+1) through one unit of angular transfer and
    // the (-1,+1) <-> (+1,-1) swap moves two units
    OrbitalBasis b = build_orbital_basis(0.1, 2.0, 3, 1);
    REQUIRE(b.orbitals[0].m == 0);
    REQUIRE(b.orbitals[1].m == -1);
    REQUIRE(b.orbitals[2].m == 1);
    auto f = profile_splines(b);

    double e0 = b.orbitals[0].energy;
    double em = b.orbitals[1].energy;
    double ep = b.orbitals[2].energy;
    double J00 = pair_adaptive(b, 0, f, 0, 0, 0, 0);
    double J11 = pair_adaptive(b, 0, f, 1, 1, 2, 2);
    double c1 = pair_adaptive(b, 1, f, 0, 1, 0, 2);
    double c2 = pair_adaptive(b, 2, f, 1, 2, 2, 1);

    Eigen::Matrix3d H;
    H << 2 * e0 + J00, c1, c1,
         c1, em + ep + J11, c2,
         c1, c2, em + ep + J11;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(H);
    double oracle = es.eigenvalues()(0);

    CIResult lib = ci_ground_state(b, CISymmetry::distinguishable, 1.0);
    CHECK(lib.basis_size == 3);
    CHECK(std::abs(lib.ground_energy - oracle) <= lib.interaction_tolerance + 1e-6);

    // the angular-transfer couplings are alive: they push the ground state
    // strictly below the best uncoupled product
    CHECK(c1 != 0.0);
    CHECK(std::abs(c1) > 1e-4);
    CHECK(lib.ground_energy < 2 * e0 + J00 - 1e-5);
}

TEST_CASE("enlarging the basis never raises the ground energy") {
    OrbitalBasis b6 = build_orbital_basis(0.1, 2.0, 6, 0);
    double prev_f = 0.0, prev_d = 0.0;
    for (int n : {2, 4, 6}) {
        OrbitalBasis b = prefix_basis(b6, n);
        CIResult ferm = ci_ground_state(b, CISymmetry::fermionic, 1.0);
        CIResult dist = ci_ground_state(b, CISymmetry::distinguishable, 1.0);
        CHECK(ferm.basis_size == n * (n - 1) / 2);
        CHECK(dist.basis_size == n * n);
        if (n > 2) {
            CHECK(ferm.ground_energy <= prev_f + 1e-11);
            CHECK(dist.ground_energy <= prev_d + 1e-11);
        }
        prev_f = ferm.ground_energy;
        prev_d = dist.ground_energy;
    }

    // widening by angular sectors instead of radial excitations: the +-m
    // determinants decouple exactly from the m = 0 ones (the two coupling
    // signs cancel in the antisymmetric combination), so the fermionic
    // ground is bitwise stable while the distinguishable one may drop
    OrbitalBasis b41 = build_orbital_basis(0.1, 2.0, 4, 1);
    OrbitalBasis b62 = build_orbital_basis(0.1, 2.0, 6, 2);
    CIResult f41 = ci_ground_state(b41, CISymmetry::fermionic, 1.0);
    CIResult f62 = ci_ground_state(b62, CISymmetry::fermionic, 1.0);
    CIResult d41 = ci_ground_state(b41, CISymmetry::distinguishable, 1.0);
    CIResult d62 = ci_ground_state(b62, CISymmetry::distinguishable, 1.0);
    CHECK(std::abs(f62.ground_energy - f41.ground_energy) < 1e-9);
    CHECK(d62.ground_energy <= d41.ground_energy + 1e-9);
}

TEST_CASE("interacting ground states respect the closed-form lower bounds") {
    for (double Z : {1.0, 2.0}) {
        CAPTURE(Z);
        ConstantSet cs = constant_set({0.1, Z, 2});
        OrbitalBasis b = build_orbital_basis(0.1, Z, 6, 2);
        CIResult ferm = ci_ground_state(b, CISymmetry::fermionic, 1.0);
        CIResult dist = ci_ground_state(b, CISymmetry::distinguishable, 1.0);

        CHECK(ferm.ground_energy >= cs.e_low);
        CHECK(ferm.ground_energy >= cs.mu + 1.0);
        CHECK(dist.ground_energy >= cs.e_low);

        // repulsion on, both grounds stay below zero and the symmetric
        // (distinguishable) minimum lies at or below the fermionic one
        CHECK(ferm.ground_energy < 0.0);
        CHECK(dist.ground_energy <= ferm.ground_energy + 1e-9);

        CHECK(ferm.interaction_tolerance > 0.0);
        CHECK(ferm.interaction_tolerance < 1e-2);
    }

    // the repulsive interaction enters monotonically in its scale
    OrbitalBasis b = build_orbital_basis(0.1, 2.0, 4, 1);
    double g0 = ci_ground_state(b, CISymmetry::fermionic, 0.0).ground_energy;
    double g5 = ci_ground_state(b, CISymmetry::fermionic, 0.5).ground_energy;
    double g1 = ci_ground_state(b, CISymmetry::fermionic, 1.0).ground_energy;
    CHECK(g0 < g5);
    CHECK(g5 < g1);
}

TEST_CASE("two-electron ground lies below one free electron") {
    // with the second electron far away the system decays to the
    // one-electron ground; binding demands the CI minimum sit strictly
    // below that threshold
    double e1 = eff_levels_n1(0.1, 2.0, 0, 1).eigenvalues[0];
    OrbitalBasis b = build_orbital_basis(0.1, 2.0, 6, 2);
    CIResult ferm = ci_ground_state(b, CISymmetry::fermionic, 1.0);
    CIResult dist = ci_ground_state(b, CISymmetry::distinguishable, 1.0);
    CHECK(ferm.ground_energy < e1 - 0.05);
    CHECK(dist.ground_energy < e1 - 0.5);
}

TEST_CASE("antisymmetrizer is an orthogonal projector commuting with H") {
    OrbitalBasis b = build_orbital_basis(0.1, 2.0, 4, 1);
    CHECK(antisymmetrizer_check(b, 0.0) <= 1e-12);
    CHECK(antisymmetrizer_check(b, 1.0) <= 1e-10);

    // the same algebra spelled out on a two-orbital product basis
    // ordered (00, 01, 10, 11): P = (1 - S)/2 kills the symmetric states
    Eigen::Matrix4d S = Eigen::Matrix4d::Zero();
    S(0, 0) = S(3, 3) = 1.0;
    S(1, 2) = S(2, 1) = 1.0;
    Eigen::Matrix4d P = 0.5 * (Eigen::Matrix4d::Identity() - S);
    CHECK((P * P - P).norm() <= 1e-15);
    CHECK(std::abs(P.trace() - 1.0) <= 1e-15);
    Eigen::Vector4d v = P * Eigen::Vector4d(0.0, 1.0, 0.0, 0.0);
    CHECK(v(1) == doctest::Approx(0.5));
    CHECK(v(2) == doctest::Approx(-0.5));
}

TEST_CASE("degenerate or inconsistent bases are rejected") {
    OrbitalBasis b = build_orbital_basis(0.1, 2.0, 2, 0);

    OrbitalBasis dup = b;
    dup.orbitals[1] = dup.orbitals[0];
    CHECK_THROWS_AS(ci_ground_state(dup, CISymmetry::fermionic, 1.0), SingularOverlap);
    CHECK_THROWS_AS(antisymmetrizer_check(dup, 1.0), SingularOverlap);

    OrbitalBasis offgrid = b;
    offgrid.orbitals[1].radial.pop_back();
    CHECK_THROWS_AS(ci_ground_state(offgrid, CISymmetry::fermionic, 1.0), InvalidGrid);

    CHECK_THROWS_AS(ci_ground_state(b, CISymmetry::fermionic, -1.0), ConfigInvalid);

    OrbitalBasis single = b;
    single.orbitals.resize(1);
    CHECK_THROWS_AS(ci_ground_state(single, CISymmetry::fermionic, 1.0), ConfigInvalid);

    // no antisymmetric M = 0 determinant: (0, +7) only pairs in the
    // symmetric (0, 0) slot
    OrbitalBasis skew = b;
    skew.orbitals[1].m = 7;
    CHECK_THROWS_AS(ci_ground_state(skew, CISymmetry::fermionic, 1.0), ConfigInvalid);
    CHECK_NOTHROW(ci_ground_state(skew, CISymmetry::distinguishable, 0.0));

    // no M = 0 product at all
    OrbitalBasis empty = b;
    empty.orbitals[0].m = 3;
    empty.orbitals[1].m = 7;
    CHECK_THROWS_AS(ci_ground_state(empty, CISymmetry::distinguishable, 1.0), ConfigInvalid);
    CHECK_THROWS_AS(antisymmetrizer_check(empty, 1.0), ConfigInvalid);
}
