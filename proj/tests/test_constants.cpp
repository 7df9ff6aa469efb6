#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "thinlayer/constants.hpp"
#include "thinlayer/errors.hpp"
#include "thinlayer/numerics.hpp"

#include <cmath>
#include <random>

using namespace thinlayer;

namespace {

// Test-only transcriptions of every closed formula, written from scratch and
// kept textually different from the library versions on purpose.
struct Ref {
    double kato, c1, c2, c3, mu, e_low;
};

Ref ref_constants(int N, double Z) {
    const double G = 3.6256099082219083; // Gamma(1/4)
    const double G4 = G * G * G * G;
    Ref r{};
    r.kato = G4 / (4.0 * M_PI * M_PI);
    const double half_kzn = 0.5 * r.kato * Z * std::sqrt((double)N);
    r.c1 = half_kzn + std::hypot(half_kzn, 1.0);
    const double w_en = 0.25 - std::pow(M_PI, -2.0);
    const double w_ee = 1.0 / 3.0 - 1.25 * std::pow(M_PI, -2.0);
    r.c2 = (2.0 * std::sqrt(3.0) + 4.0 * std::sqrt(2.0)) *
           (Z * N * w_en + 0.5 * N * (N - 1.0) * w_ee);
    r.e_low = -std::pow(G4 * std::sqrt((double)N) * Z / (8.0 * M_PI * M_PI), 2.0);
    r.mu = r.e_low - 1.0;
    r.c3 = 2.0 * r.c1 * r.c1 * G4 * std::pow((double)N, 1.5) /
           (6.0 * M_PI * M_PI * M_PI * std::sqrt(-r.mu)) *
           (Z * Z + (N - 1.0) * (N - 1.0) / std::sqrt(2.0));
    return r;
}

} // namespace

TEST_CASE("constant_set pinned values for N=1, Z=1") {
    auto cs = constant_set({0.1, 1.0, 1});
    CHECK(cs.kato == doctest::Approx(4.3768792304529534).epsilon(1e-13));
    CHECK(cs.c1 == doctest::Approx(4.5945293786169881).epsilon(1e-13));
    CHECK(cs.c2 == doctest::Approx(1.3560929220036861).epsilon(1e-13));
    CHECK(cs.c3 == doctest::Approx(16.297600494601379).epsilon(1e-13));
    CHECK(cs.mu == doctest::Approx(-5.7892679494926087).epsilon(1e-13));
    CHECK(cs.e_low == doctest::Approx(-4.7892679494926087).epsilon(1e-13));
}

TEST_CASE("constant_set pinned values for N=2, Z=2") {
    auto cs = constant_set({0.1, 2.0, 2});
    CHECK(cs.c1 == doctest::Approx(12.459941138121637).epsilon(1e-13));
    CHECK(cs.c2 == doctest::Approx(7.3095077543658133).epsilon(1e-13));
    CHECK(cs.c3 == doctest::Approx(612.36455221267931).epsilon(1e-13));
    CHECK(cs.e_low == doctest::Approx(-38.31414359594087).epsilon(1e-13));
}

TEST_CASE("constant_set matches an independent transcription over a grid") {
    for (int N : {1, 2, 3, 4, 7}) {
        for (double Z : {0.5, 1.0, 1.5, 2.0, 6.0}) {
            auto cs = constant_set({0.1, Z, N});
            auto r = ref_constants(N, Z);
            CAPTURE(N);
            CAPTURE(Z);
            CHECK(cs.kato == doctest::Approx(r.kato).epsilon(1e-12));
            CHECK(cs.c1 == doctest::Approx(r.c1).epsilon(1e-12));
            CHECK(cs.c2 == doctest::Approx(r.c2).epsilon(1e-12));
            CHECK(cs.c3 == doctest::Approx(r.c3).epsilon(1e-12));
            CHECK(cs.mu == doctest::Approx(r.mu).epsilon(1e-12));
            CHECK(cs.e_low == doctest::Approx(r.e_low).epsilon(1e-12));
        }
    }
}

TEST_CASE("structural facts about the constants") {
    for (int N : {1, 2, 3}) {
        for (double Z : {0.5, 1.0, 2.0}) {
            auto cs = constant_set({0.1, Z, N});
            CHECK(cs.kato > 4.0);
            CHECK(cs.c1 >= 1.0);
            CHECK(cs.c2 > 0.0);
            CHECK(cs.c3 > 0.0);
            CHECK(cs.mu <= -1.0);
            // c1 solves x^2 - kato Z sqrt(N) x - 1 = 0
            double resid =
                cs.c1 * cs.c1 - cs.kato * Z * std::sqrt((double)N) * cs.c1 - 1.0;
            CHECK(std::abs(resid) <= 1e-10 * cs.c1 * cs.c1);
            // the reference point sits exactly one unit below the energy bound
            CHECK(cs.mu + 1.0 == doctest::Approx(cs.e_low).epsilon(1e-12));
        }
    }
    auto cs = constant_set({0.1, 1.5, 2});
    CHECK(cs.e_low <= -1.0);
}

TEST_CASE("config validation") {
    CHECK_THROWS_AS(check_config({-0.1, 1.0, 1}), ConfigInvalid);
    CHECK_THROWS_AS(check_config({0.1, 0.0, 1}), ConfigInvalid);
    CHECK_THROWS_AS(check_config({0.1, 1.0, 0}), ConfigInvalid);
    CHECK_NOTHROW(check_config({0.1, 1.0, 1}));
}

TEST_CASE("solve_xlnx fixed points and monotonicity") {
    const double inv_e = std::exp(-1.0);
    // the target sits at the flat maximum of x|ln x|, so the root is only
    // locatable to ~sqrt(eps) while the residual contract still holds
    double at_max = solve_xlnx(1.0, inv_e);
    CHECK(at_max == doctest::Approx(inv_e).epsilon(1e-7));
    CHECK(std::abs(at_max * std::abs(std::log(at_max)) - inv_e) <= 1e-12 * inv_e);
    CHECK(solve_xlnx(2.0, 0.5) == doctest::Approx(0.11610128014515556).epsilon(1e-12));
    // x(rhs) increases with rhs
    double prev = 0.0;
    for (double rhs = 1e-6; rhs < inv_e; rhs *= 10.0) {
        double x = solve_xlnx(1.0, rhs);
        CHECK(x > prev);
        prev = x;
    }
    CHECK_THROWS_AS(solve_xlnx(1.0, 1.0), NoRootInRange);
    CHECK_THROWS_AS(solve_xlnx(-1.0, 0.1), NoRootInRange);
}

TEST_CASE("solve_xlnx back-substitution over random targets") {
    std::mt19937_64 rng(20260814);
    std::uniform_real_distribution<double> uc(0.1, 100.0);
    std::uniform_real_distribution<double> ur(1e-10, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        double c = uc(rng);
        double rhs = ur(rng) * c * std::exp(-1.0);
        double x = solve_xlnx(c, rhs);
        CHECK(x > 0.0);
        CHECK(x <= std::exp(-1.0));
        CHECK(std::abs(c * x * std::abs(std::log(x)) - rhs) <= 1e-12 * rhs);
    }
}

TEST_CASE("thresholds: defining equations by back-substitution") {
    LayerConfig cfg{0.1, 1.0, 1};
    auto cs = constant_set(cfg);
    double d = 0.1;
    auto t = thresholds(cfg, d);
    double amp = std::max(1.0, -cs.mu / d);
    CHECK(amp * cs.c1 * cs.c1 * cs.c2 * t.a0 * std::abs(std::log(t.a0)) ==
          doctest::Approx(0.5).epsilon(1e-12));
    CHECK(cs.c3 * std::max(1.0, -2.0 * cs.mu / d) * t.a2 ==
          doctest::Approx(1.0).epsilon(1e-12));
    // default d_eff = d/2 collapses a1 onto a2
    CHECK(t.a1 == doctest::Approx(t.a2).epsilon(1e-15));
    // a sharper d_eff can only enlarge a1
    auto t2 = thresholds(cfg, d, d);
    CHECK(t2.a1 >= t.a1);
    CHECK(t2.a1 == doctest::Approx(1.0 / (cs.c3 * std::max(1.0, -cs.mu / d))).epsilon(1e-14));
}

TEST_CASE("thresholds: large d saturates the max at one") {
    LayerConfig cfg{0.1, 1.0, 1};
    auto cs = constant_set(cfg);
    auto t = thresholds(cfg, 1e12);
    CHECK(cs.c1 * cs.c1 * cs.c2 * t.a0 * std::abs(std::log(t.a0)) ==
          doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("thresholds: a0 saturates at 1/e when the equation has no root") {
    // tiny Z makes c2 so small that the defining level 1/2 is unreachable
    LayerConfig cfg{0.1, 0.01, 1};
    auto t = thresholds(cfg, 1e12);
    CHECK(t.a0 == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
}

TEST_CASE("thresholds: candidate arithmetic and the min property") {
    LayerConfig cfg{0.1, 2.0, 2};
    auto t = thresholds(cfg, 0.1);
    double cand = std::sqrt(3.0) * M_PI / 20.0;
    CHECK(cand == doctest::Approx(0.2720699046351327).epsilon(1e-14));
    CHECK(t.a3 <= cand + 1e-15);
    CHECK(t.a3 <= std::exp(-1.0));
    CHECK(t.a3 <= t.a0 + 1e-15);
    CHECK(t.a3 <= t.a2 + 1e-15);

    std::mt19937_64 rng(77);
    std::uniform_int_distribution<int> un(1, 4);
    std::uniform_real_distribution<double> uz(0.2, 6.0);
    std::uniform_real_distribution<double> ud(1e-3, 10.0);
    for (int trial = 0; trial < 50; ++trial) {
        LayerConfig c{0.1, uz(rng), un(rng)};
        double d = ud(rng);
        auto th = thresholds(c, d);
        auto cs = constant_set(c);
        double geom = std::sqrt(3.0) * M_PI / (2.0 * c.N * (c.N - 1 + 2.0 * c.Z));
        CHECK(th.a3 <= std::exp(-1.0) + 1e-15);
        CHECK(th.a3 <= geom + 1e-15);
        CHECK(th.a3 <= th.a0 + 1e-15);
        CHECK(th.a3 <= th.a2 + 1e-15);
        CHECK(th.a2 <= th.a1 + 1e-15); // d_eff = d/2 is the worst case
        (void)cs;
    }
}

TEST_CASE("resolvent_bound: independent transcription at a spot value") {
    LayerConfig cfg{0.1, 1.0, 1};
    auto r = ref_constants(1, 1.0);
    double a = 0.01, d = 0.1;
    double expect = (2.0 / d) * std::max(1.0, -r.mu / d) * r.c1 * r.c1 * r.c2 * a *
                    std::abs(std::log(a));
    CHECK(resolvent_bound(BoundKind::eff_vs_2d, cfg, a, d) ==
          doctest::Approx(expect).epsilon(1e-12));

    double lead = 8.0 * 1 / (std::sqrt(3.0) * M_PI) * (1 - 1 + 2.0 * 1.0);
    double expect_fe = (lead + r.c3 * std::max(1.0, -r.mu / d)) * a / d +
                       2.0 * a * a / (3.0 * M_PI * M_PI);
    CHECK(resolvent_bound(BoundKind::full_vs_eff, cfg, a, d) ==
          doctest::Approx(expect_fe).epsilon(1e-12));

    double expect_f2 = expect +
                       (2.0 / d) * (lead + r.c3 * std::max(1.0, -2.0 * r.mu / d)) * a +
                       2.0 * a * a / (3.0 * M_PI * M_PI);
    CHECK(resolvent_bound(BoundKind::full_vs_2d, cfg, a, d) ==
          doctest::Approx(expect_f2).epsilon(1e-12));
}

TEST_CASE("resolvent_bound: limits and degenerate inputs") {
    LayerConfig cfg{0.1, 1.0, 2};
    // vanishing W profile kills the sandwiched difference entirely
    for (double a : {1e-6, 1e-3, 0.2, 0.36})
        CHECK(resolvent_bound(BoundKind::gen_dif, cfg, a, 0.1, 0.0) == 0.0);
    // gen_dif spot check against the two-term formula
    double a = 0.05, w = 0.148;
    double expect = 2.0 * std::sqrt(3.0) * a * std::abs(std::log(a)) * w +
                    4.0 * std::sqrt(2.0) * a * std::sqrt(w);
    CHECK(resolvent_bound(BoundKind::gen_dif, cfg, a, 0.1, w) ==
          doctest::Approx(expect).epsilon(1e-13));
    // full_vs_eff vanishes linearly
    double tiny = resolvent_bound(BoundKind::full_vs_eff, cfg, 1e-9, 0.1);
    double tiny2 = resolvent_bound(BoundKind::full_vs_eff, cfg, 2e-9, 0.1);
    CHECK(tiny2 / tiny == doctest::Approx(2.0).epsilon(1e-6));

    CHECK_THROWS_AS(resolvent_bound(BoundKind::eff_vs_2d, cfg, 0.0, 0.1), InvalidWidth);
    CHECK_THROWS_AS(resolvent_bound(BoundKind::eff_vs_2d, cfg, 0.4, 0.1), InvalidWidth);
    CHECK_THROWS_AS(resolvent_bound(BoundKind::eff_vs_2d, cfg, -1.0, 0.1), InvalidWidth);
}

TEST_CASE("resolvent_bound: monotone in a, antitone in d") {
    LayerConfig cfg{0.1, 1.5, 2};
    for (auto kind : {BoundKind::eff_vs_2d, BoundKind::full_vs_eff, BoundKind::full_vs_2d}) {
        double prev = 0.0;
        for (double a : {0.01, 0.05, 0.1, 0.2, 0.3}) {
            double v = resolvent_bound(kind, cfg, a, 0.1);
            CHECK(v >= prev);
            prev = v;
        }
        double prev_d = std::numeric_limits<double>::infinity();
        for (double d : {0.01, 0.1, 1.0, 10.0}) {
            double v = resolvent_bound(kind, cfg, 0.1, d);
            CHECK(v <= prev_d);
            prev_d = v;
        }
    }
}

TEST_CASE("localization_window: regimes") {
    LayerConfig cfg{0.1, 1.0, 1};
    // far outside the smallness regime
    auto bad = localization_window(0.01, 0.3, cfg);
    CHECK_FALSE(bad.valid);
    // the constants are large: at d=0.05 validity needs a below ~5e-7
    CHECK_FALSE(localization_window(0.05, 1e-6, cfg).valid);
    // shrinking a drives the projection bound to zero
    auto w1 = localization_window(0.05, 1e-8, cfg);
    auto w2 = localization_window(0.05, 1e-10, cfg);
    CHECK(w1.valid);
    CHECK(w2.valid);
    CHECK(w2.proj_bound < w1.proj_bound);
    CHECK(w2.proj_bound < 1e-3);
    // out-of-range widths are reported, not thrown
    CHECK_FALSE(localization_window(0.05, 0.9, cfg).valid);
    CHECK_FALSE(localization_window(0.05, -1.0, cfg).valid);
}

TEST_CASE("localization_window: independent transcription at a spot value") {
    LayerConfig cfg{0.1, 1.0, 1};
    double d = 0.05, a = 1e-7;
    auto win = localization_window(d, a, cfg);
    auto r = ref_constants(1, 1.0);
    double xl = a * std::abs(std::log(a));
    double lead = 8.0 / (std::sqrt(3.0) * M_PI) * 2.0;
    double full = (2.0 / d) * std::max(1.0, -r.mu / d) * r.c1 * r.c1 * r.c2 * xl +
                  (2.0 / d) * (lead + r.c3 * std::max(1.0, -2.0 * r.mu / d)) * a +
                  2.0 * a * a / (3.0 * M_PI * M_PI);
    double K = full / xl;
    double expect = 9.0 * d * K * xl / (1.0 - 6.0 * d * K * xl);
    CHECK(win.K == doctest::Approx(K).epsilon(1e-12));
    CHECK(win.proj_bound == doctest::Approx(expect).epsilon(1e-12));
    CHECK(win.valid);
}
