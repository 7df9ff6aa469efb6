#include "thinlayer/two_electron.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <utility>

#include "thinlayer/errors.hpp"
#include "thinlayer/numerics.hpp"
#include "thinlayer/potentials.hpp"

namespace thinlayer {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr int kMultipoleCut = 8;  // CI truncation order
constexpr int kMultipoleMax = 16; // table depth, for the tail estimate

// Gauss-Legendre rules on [-1, 1]; positive half, mirrored on use.
constexpr int kGL16 = 8;
constexpr double kGL16X[kGL16] = {0.0950125098376374402, 0.281603550779258913,
                                  0.458016777657227386,  0.617876244402643748,
                                  0.755404408355003034,  0.865631202387831744,
                                  0.944575023073232576,  0.989400934991649933};
constexpr double kGL16W[kGL16] = {0.189450610455068496,  0.182603415044923589,
                                  0.169156519395002538,  0.149595988816576732,
                                  0.124628971255533872,  0.0951585116824927848,
                                  0.0622535239386478929, 0.0271524594117540949};
constexpr int kGL8 = 4;
constexpr double kGL8X[kGL8] = {0.183434642495649805, 0.525532409916328986,
                                0.796666477413626740, 0.960289856497536232};
constexpr double kGL8W[kGL8] = {0.362683783378361983, 0.313706645877887287,
                                0.222381034453374471, 0.101228536290376259};
constexpr int kGL10 = 5;
constexpr double kGL10X[kGL10] = {0.148874338981631211, 0.433395394129247191,
                                  0.679409568299024406, 0.865063366688984511,
                                  0.973906528517171720};
constexpr double kGL10W[kGL10] = {0.295524224714752870,  0.269266719309996355,
                                  0.219086362515982044,  0.149451349150580593,
                                  0.0666713443086881376};

struct QuadRule {
    std::vector<double> x, w;
};

QuadRule paneled_rule(const std::vector<double>& edges, const double* gx, const double* gw,
                      int half) {
    QuadRule rule;
    for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
        double mid = 0.5 * (edges[p] + edges[p + 1]);
        double rad = 0.5 * (edges[p + 1] - edges[p]);
        for (int i = half - 1; i >= 0; --i) {
            rule.x.push_back(mid - rad * gx[i]);
            rule.w.push_back(rad * gw[i]);
        }
        for (int i = 0; i < half; ++i) {
            rule.x.push_back(mid + rad * gx[i]);
            rule.w.push_back(rad * gw[i]);
        }
    }
    return rule;
}

// ---- scaled interaction potential, spline-accelerated ----
// v1_ee is width-independent, so a single log-grid table serves every call;
// outside the table the core and Coulomb asymptotes take over.
struct V1Table {
    num::Spline spline; // y(t) = v1_ee(e^t)
    double t_lo = 0.0, t_hi = 0.0;
    double core_offset = 0.0; // v1_ee(x) + 3 ln x at the left boundary
};

const V1Table& v1_table() {
    static const V1Table tab = [] {
        V1Table t;
        t.t_lo = std::log(1e-6);
        t.t_hi = std::log(5e3);
        const int n = 1400;
        std::vector<double> ts(n), ys(n);
        for (int i = 0; i < n; ++i) {
            ts[i] = t.t_lo + (t.t_hi - t.t_lo) * i / (n - 1.0);
            ys[i] = v1_ee(std::exp(ts[i]));
        }
        t.core_offset = ys[0] + 3.0 * ts[0];
        t.spline = num::Spline(ts, ys);
        return t;
    }();
    return tab;
}

double v_ee_fast(double a, double rho12) {
    const V1Table& tab = v1_table();
    double t = std::log(rho12 / a);
    if (t < tab.t_lo) return (tab.core_offset - 3.0 * t) / a;
    if (t > tab.t_hi) return 1.0 / rho12;
    return tab.spline(t) / a;
}

// Angular rule graded geometrically towards theta = 0, where the
// interaction is log-singular on the radial diagonal; on each decade the
// logarithm is smooth, so the fixed panels resolve it to ~1e-9.
const QuadRule& angular_rule() {
    static const QuadRule rule = paneled_rule(
        {0.0, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 0.1, 0.5, 1.5, kPi}, kGL16X, kGL16W, kGL16);
    return rule;
}

// v_k(rho1, rho2) for k = 0..kMultipoleMax in one sweep; the potential is
// sampled once per angle and the cosines follow the Chebyshev recurrence.
std::array<double, kMultipoleMax + 1> multipoles(double a, double r1, double r2) {
    const QuadRule& rule = angular_rule();
    std::array<double, kMultipoleMax + 1> out{};
    double dr2 = (r1 - r2) * (r1 - r2);
    for (std::size_t q = 0; q < rule.x.size(); ++q) {
        double th = rule.x[q];
        double s = std::sin(0.5 * th);
        double rho12 = std::sqrt(dr2 + 4.0 * r1 * r2 * s * s);
        double v = v_ee_fast(a, rho12) * rule.w[q] / kPi;
        double c0 = 1.0, c1 = std::cos(th);
        out[0] += v;
        out[1] += v * c1;
        for (int k = 2; k <= kMultipoleMax; ++k) {
            double ck = 2.0 * std::cos(th) * c1 - c0;
            out[k] += v * ck;
            c0 = c1;
            c1 = ck;
        }
    }
    return out;
}

// ---- radial pair quadrature in rotated coordinates ----
// u = (r1 + r2)/2, t = r1 - r2. The multipole kernels are smooth in u; all
// their short-range structure (a log ridge capped at scale a) sits on t = 0,
// so grading the t panels at scale a resolves every pair integral with a few
// thousand kernel samples. A plain tensor rule in (r1, r2) would need panel
// widths below a across the whole density bulk to do the same. `refine`
// subdivides both directions for the two-grid error estimate.

QuadRule u_rule(double Z, double rb, int refine) {
    double bulk = std::min(4.0 / Z, rb);
    int nb = refine * std::max(1, static_cast<int>(std::ceil(bulk / (0.5 / Z))));
    std::vector<double> edges;
    for (int i = 0; i <= nb; ++i) edges.push_back(bulk * i / nb);
    double grow = std::pow(1.8, 1.0 / refine);
    double x = bulk;
    while (x < rb - 1e-9) {
        x = std::min(x * grow, rb);
        edges.push_back(x);
    }
    return paneled_rule(edges, kGL10X, kGL10W, kGL10);
}

QuadRule t_rule(double a, double T, int refine) {
    std::vector<double> edges = {0.0};
    for (double c : {0.25 * a, a, 3.0 * a})
        if (c < T) edges.push_back(c);
    double grow = std::pow(2.5, 1.0 / refine);
    double x = edges.back();
    while (x < T) {
        x = std::min(std::max(x * grow, 1e-3), T);
        edges.push_back(x);
    }
    if (refine > 1) {
        std::vector<double> split;
        for (std::size_t p = 0; p + 1 < edges.size(); ++p)
            for (int s = 0; s < refine; ++s)
                split.push_back(edges[p] + (edges[p + 1] - edges[p]) * s / refine);
        split.push_back(edges.back());
        edges = std::move(split);
    }
    return paneled_rule(edges, kGL8X, kGL8W, kGL8);
}

struct ProductSpace {
    std::vector<std::pair<int, int>> pairs; // ordered (alpha, beta), M = 0
    std::vector<int> swapped;               // index of (beta, alpha)
};

ProductSpace m0_products(const OrbitalBasis& basis) {
    ProductSpace ps;
    int n = static_cast<int>(basis.orbitals.size());
    for (int al = 0; al < n; ++al)
        for (int be = 0; be < n; ++be)
            if (basis.orbitals[al].m + basis.orbitals[be].m == 0)
                ps.pairs.emplace_back(al, be);
    ps.swapped.resize(ps.pairs.size());
    for (std::size_t p = 0; p < ps.pairs.size(); ++p) {
        auto want = std::make_pair(ps.pairs[p].second, ps.pairs[p].first);
        ps.swapped[p] = static_cast<int>(
            std::find(ps.pairs.begin(), ps.pairs.end(), want) - ps.pairs.begin());
    }
    return ps;
}

void validate_basis(const OrbitalBasis& basis) {
    if (basis.orbitals.size() < 2)
        throw ConfigInvalid("CI needs a basis with at least two orbitals");
    if (!(basis.a > 0.0) || basis.a >= 1.0)
        throw InvalidWidth("orbital basis width must lie in (0, 1)");
    std::size_t n = basis.centers.size();
    if (n == 0 || basis.weights.size() != n)
        throw InvalidGrid("orbital basis carries no consistent radial grid");
    for (const auto& orb : basis.orbitals)
        if (orb.radial.size() != n)
            throw InvalidGrid("orbital sampled off the shared radial grid");

    // products of an orthonormal set are orthonormal; anything else makes
    // the plain CI eigenproblem meaningless
    int norb = static_cast<int>(basis.orbitals.size());
    for (int i = 0; i < norb; ++i)
        for (int j = i; j < norb; ++j) {
            double s = 0.0;
            if (basis.orbitals[i].m == basis.orbitals[j].m)
                for (std::size_t q = 0; q < n; ++q)
                    s += basis.weights[q] * basis.orbitals[i].radial[q] *
                         basis.orbitals[j].radial[q];
            if (std::abs(s - (i == j ? 1.0 : 0.0)) > 1e-6)
                throw SingularOverlap("orbital products are not orthonormal");
        }
}

// Dense CI matrix on the M = 0 product basis. The interaction couples bra
// and ket through a single multipole order k = m_bra - m_ket per electron;
// elements needing |k| beyond the truncation are dropped and accounted for
// in the declared tolerance.
// one CI element per (p, q) slot that survives the multipole truncation
struct StreamElement {
    int p, q;
    int al, bl; // bra orbital pair
    int ar, br; // ket orbital pair
    int k;      // |m_bra_alpha - m_ket_alpha|
};

// one streaming pass over the rotated rule; accumulates every element at
// once so the kernel is sampled a single time per node pair
std::vector<double> stream_elements(const OrbitalBasis& basis,
                                    const std::vector<num::Spline>& f, double rb,
                                    const std::vector<StreamElement>& elems,
                                    int refine, double* tail) {
    int norb = static_cast<int>(f.size());
    QuadRule ur = u_rule(basis.Z, rb, refine);
    int nu = static_cast<int>(ur.x.size());
    std::vector<std::vector<double>> rows(nu);
    std::vector<double> row_tail(nu, 0.0);
    num::parallel_for(nu, [&](int iu) {
        std::vector<double> acc(elems.size(), 0.0);
        double u = ur.x[iu];
        double T = 2.0 * std::min(u, rb - u);
        if (T > 0.0) {
            QuadRule tr = t_rule(basis.a, T, refine);
            std::vector<double> fr1(norb), fr2(norb);
            for (std::size_t it = 0; it < tr.x.size(); ++it) {
                for (double sgn : {1.0, -1.0}) {
                    double t = sgn * tr.x[it];
                    double r1 = u + 0.5 * t, r2 = u - 0.5 * t;
                    if (r1 <= 0.0 || r2 <= 0.0 || r1 > rb || r2 > rb) continue;
                    for (int o = 0; o < norb; ++o) {
                        fr1[o] = f[o](r1);
                        fr2[o] = f[o](r2);
                    }
                    auto ms = multipoles(basis.a, r1, r2);
                    double w = ur.w[iu] * tr.w[it] * r1 * r2;
                    for (std::size_t e = 0; e < elems.size(); ++e) {
                        const StreamElement& se = elems[e];
                        acc[e] += w * fr1[se.al] * fr1[se.ar] * ms[se.k] *
                                  fr2[se.bl] * fr2[se.br];
                    }
                    if (tail && (it & 3) == 0) {
                        double s = 0.0;
                        for (int k = kMultipoleCut + 1; k <= kMultipoleMax; ++k)
                            s += std::abs(ms[k]);
                        row_tail[iu] = std::max(row_tail[iu], 2.0 * s);
                    }
                }
            }
        }
        rows[iu] = std::move(acc);
    });
    std::vector<double> out(elems.size(), 0.0);
    for (int iu = 0; iu < nu; ++iu) {
        for (std::size_t e = 0; e < elems.size(); ++e) out[e] += rows[iu][e];
        if (tail) *tail = std::max(*tail, row_tail[iu]);
    }
    return out;
}

Eigen::MatrixXd ci_matrix(const OrbitalBasis& basis, const ProductSpace& ps, double scale,
                          double* tolerance) {
    int dim = static_cast<int>(ps.pairs.size());
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(dim, dim);
    for (int p = 0; p < dim; ++p)
        H(p, p) = basis.orbitals[ps.pairs[p].first].energy +
                  basis.orbitals[ps.pairs[p].second].energy;
    if (tolerance) *tolerance = 0.0;
    if (scale == 0.0) return H;

    int norb = static_cast<int>(basis.orbitals.size());
    std::vector<num::Spline> f;
    f.reserve(norb);
    for (const auto& orb : basis.orbitals) f.emplace_back(basis.centers, orb.radial);

    // density support radius; quadrature beyond it only adds noise
    double rb = 0.0;
    for (const auto& orb : basis.orbitals) {
        double mx = 0.0;
        for (double v : orb.radial) mx = std::max(mx, std::abs(v));
        for (std::size_t i = 0; i < basis.centers.size(); ++i)
            if (std::abs(orb.radial[i]) > 1e-8 * mx) rb = std::max(rb, basis.centers[i]);
    }
    rb = std::min(rb, basis.centers.back());

    bool truncated = false;
    std::vector<StreamElement> elems;
    for (int p = 0; p < dim; ++p) {
        auto [ap, bp] = ps.pairs[p];
        for (int q = p; q < dim; ++q) {
            auto [aq, bq] = ps.pairs[q];
            int k = basis.orbitals[ap].m - basis.orbitals[aq].m;
            if (std::abs(k) > kMultipoleCut) {
                truncated = true;
                continue;
            }
            elems.push_back({p, q, ap, bp, aq, bq, std::abs(k)});
        }
    }

    double tail = 0.0;
    std::vector<double> base = stream_elements(basis, f, rb, elems, 1, nullptr);
    std::vector<double> fine =
        stream_elements(basis, f, rb, elems, 2, truncated ? &tail : nullptr);

    double norm_defect = 0.0;
    {
        QuadRule nr = u_rule(basis.Z, rb, 2);
        for (int o = 0; o < norb; ++o) {
            double nrm = 0.0;
            for (std::size_t q = 0; q < nr.x.size(); ++q)
                nrm += nr.w[q] * nr.x[q] * f[o](nr.x[q]) * f[o](nr.x[q]);
            norm_defect = std::max(norm_defect, std::abs(nrm - 1.0));
        }
    }

    double vscale = 0.0, delta = 0.0;
    for (std::size_t e = 0; e < elems.size(); ++e) {
        const StreamElement& se = elems[e];
        H(se.p, se.q) += scale * fine[e];
        if (se.q != se.p) H(se.q, se.p) += scale * fine[e];
        if (se.q == se.p) vscale = std::max(vscale, std::abs(fine[e]));
        delta = std::max(delta, std::abs(fine[e] - base[e]));
    }

    if (tolerance)
        *tolerance = scale * (norm_defect * std::max(1.0, vscale) + 3.0 * delta +
                              1e-9 * std::max(1.0, vscale) + tail);
    return H;
}

} // namespace

OrbitalBasis build_orbital_basis(double a, double Z, int n_orb, int m_max) {
    if (n_orb < 2)
        throw ConfigInvalid("orbital basis needs at least two orbitals");
    if (m_max < 0) throw ConfigInvalid("m_max must be nonnegative");

    OrbitalBasis basis;
    basis.a = a;
    basis.Z = Z;
    std::vector<Orbital> pool;
    for (int m = 0; m <= m_max; ++m) {
        // a high sector may bind fewer states than asked on the finite grid;
        // take what it has
        EigenResult res;
        int got = 0;
        for (int want = n_orb; want >= 1; --want) {
            try {
                res = eff_levels_n1(a, Z, m, want);
                got = want;
                break;
            } catch (const InsufficientBoundStates&) {
            }
        }
        if (got == 0) continue;
        if (basis.centers.empty()) {
            basis.centers = res.centers;
            basis.weights = res.weights;
        } else if (res.centers.size() != basis.centers.size() ||
                   res.centers != basis.centers) {
            throw InvalidGrid("sector grids diverged");
        }
        for (int j = 0; j < got; ++j) {
            Orbital orb;
            orb.m = m;
            orb.index = j;
            orb.energy = res.eigenvalues[j];
            orb.radial.resize(res.centers.size());
            for (std::size_t i = 0; i < orb.radial.size(); ++i)
                orb.radial[i] = res.vectors[j][i] / std::sqrt(res.weights[i]);
            pool.push_back(orb);
            if (m > 0) {
                orb.m = -m;
                pool.push_back(orb);
            }
        }
    }
    if (static_cast<int>(pool.size()) < n_orb)
        throw InsufficientBoundStates("sectors up to |m| = " + std::to_string(m_max) +
                                      " bind only " + std::to_string(pool.size()) +
                                      " states");
    std::sort(pool.begin(), pool.end(), [](const Orbital& x, const Orbital& y) {
        if (x.energy != y.energy) return x.energy < y.energy;
        if (std::abs(x.m) != std::abs(y.m)) return std::abs(x.m) < std::abs(y.m);
        if (x.m != y.m) return x.m < y.m;
        return x.index < y.index;
    });
    pool.resize(n_orb);
    basis.orbitals = std::move(pool);
    validate_basis(basis);
    return basis;
}

CIResult ci_ground_state(const OrbitalBasis& basis, CISymmetry symmetry,
                         double interaction_scale) {
    validate_basis(basis);
    if (interaction_scale < 0.0)
        throw ConfigInvalid("interaction scale must be nonnegative");
    ProductSpace ps = m0_products(basis);
    if (ps.pairs.empty()) throw ConfigInvalid("no M = 0 product states in the basis");

    CIResult out;
    out.symmetry = symmetry;
    Eigen::MatrixXd H = ci_matrix(basis, ps, interaction_scale, &out.interaction_tolerance);

    if (symmetry == CISymmetry::fermionic) {
        // antisymmetric combinations (|ab> - |ba>)/sqrt(2), a < b
        std::vector<int> keep;
        for (std::size_t p = 0; p < ps.pairs.size(); ++p)
            if (ps.pairs[p].first < ps.pairs[p].second) keep.push_back(static_cast<int>(p));
        if (keep.empty())
            throw ConfigInvalid("no antisymmetric M = 0 determinant in the basis");
        Eigen::MatrixXd B = Eigen::MatrixXd::Zero(ps.pairs.size(), keep.size());
        const double r = 1.0 / std::sqrt(2.0);
        for (std::size_t c = 0; c < keep.size(); ++c) {
            B(keep[c], c) = r;
            B(ps.swapped[keep[c]], c) = -r;
        }
        Eigen::MatrixXd Hf = B.transpose() * H * B;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Hf);
        out.ground_energy = es.eigenvalues()(0);
        out.basis_size = static_cast<int>(keep.size());
    } else {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
        out.ground_energy = es.eigenvalues()(0);
        out.basis_size = static_cast<int>(ps.pairs.size());
    }
    return out;
}

double antisymmetrizer_check(const OrbitalBasis& basis, double interaction_scale) {
    validate_basis(basis);
    ProductSpace ps = m0_products(basis);
    if (ps.pairs.empty()) throw ConfigInvalid("no M = 0 product states in the basis");
    int dim = static_cast<int>(ps.pairs.size());
    Eigen::MatrixXd H = ci_matrix(basis, ps, interaction_scale, nullptr);

    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(dim, dim);
    for (int p = 0; p < dim; ++p) S(p, ps.swapped[p]) = 1.0;
    Eigen::MatrixXd P = 0.5 * (Eigen::MatrixXd::Identity(dim, dim) - S);

    double r_idem = (P * P - P).norm();
    double r_sym = (P - P.transpose()).norm();
    double r_comm = (P * H - H * P).norm();
    return std::max({r_idem, r_sym, r_comm});
}

double multipole_coefficient(double a, int k, double rho1, double rho2) {
    if (!(a > 0.0) || a >= 1.0) throw InvalidWidth("width must lie in (0, 1)");
    if (k < 0 || k > kMultipoleMax)
        throw ConfigInvalid("multipole order outside the tabulated range");
    if (!(rho1 > 0.0) || !(rho2 > 0.0))
        throw ConfigInvalid("radii must be positive");
    return multipoles(a, rho1, rho2)[k];
}

} // namespace thinlayer
