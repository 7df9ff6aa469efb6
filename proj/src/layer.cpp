#include "thinlayer/layer.hpp"

#include "thinlayer/constants.hpp"
#include "thinlayer/errors.hpp"
#include "thinlayer/numerics.hpp"
#include "thinlayer/potentials.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <utility>
#include <vector>

namespace thinlayer {
namespace {

constexpr double kPi = 3.14159265358979323846;

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

std::vector<double> z_nodes_impl(double a, int n_z) {
    const double h = a / (n_z + 1);
    std::vector<double> z(n_z);
    for (int j = 0; j < n_z; ++j) z[j] = -0.5 * a + (j + 1) * h;
    return z;
}

// sparse solver with one pass of extended-precision iterative refinement
class RefinedSolver {
public:
    RefinedSolver(SpMat mat, const char* singular_error) : mat_(std::move(mat)) {
        mat_.makeCompressed();
        lu_.compute(mat_);
        if (lu_.info() != Eigen::Success) {
            if (singular_error != nullptr) throw SingularShift(singular_error);
            throw ConvergenceFailure("sparse factorization failed");
        }
    }

    Eigen::VectorXd solve(const Eigen::VectorXd& b) const {
        Eigen::VectorXd x = lu_.solve(b);
        x += lu_.solve(residual(b, x));
        return x;
    }

    const SpMat& matrix() const { return mat_; }

private:
    Eigen::VectorXd residual(const Eigen::VectorXd& b, const Eigen::VectorXd& x) const {
        std::vector<long double> acc(static_cast<size_t>(b.size()));
        for (Eigen::Index i = 0; i < b.size(); ++i) acc[i] = b[i];
        for (int col = 0; col < mat_.outerSize(); ++col)
            for (SpMat::InnerIterator it(mat_, col); it; ++it)
                acc[it.row()] -= static_cast<long double>(it.value()) * x[col];
        Eigen::VectorXd r(b.size());
        for (Eigen::Index i = 0; i < b.size(); ++i) r[i] = static_cast<double>(acc[i]);
        return r;
    }

    SpMat mat_;
    Eigen::SparseLU<SpMat> lu_;
};

double resolvent_norm_estimate(const RefinedSolver& solver, int dim, int iters) {
    std::mt19937_64 rng(0x7f4a7c15u);
    std::normal_distribution<double> gauss;
    Eigen::VectorXd v(dim);
    for (int i = 0; i < dim; ++i) v[i] = gauss(rng);
    v.normalize();
    double nrm = 0.0;
    for (int it = 0; it < iters; ++it) {
        v = solver.solve(v);
        nrm = v.norm();
        if (!(nrm > 0.0)) return 0.0;
        v /= nrm;
    }
    return nrm;
}

struct Lowest {
    std::vector<double> values;
    std::vector<Eigen::VectorXd> vectors;
};

// k lowest eigenvalues of the symmetric sparse operator represented by the
// already shifted matrix (H - sigma); Lanczos on its inverse with full
// reorthogonalization
Lowest shift_invert_lowest(const SpMat& shifted, double sigma, int k) {
    const int dim = static_cast<int>(shifted.rows());
    if (k < 1 || k > dim / 4)
        throw ConfigInvalid("requested level count out of range for the grid");
    RefinedSolver solver(shifted, nullptr);

    const int m = std::min(dim, std::max(160, 12 * k + 80));
    Eigen::MatrixXd basis(dim, m);
    std::vector<double> alpha, beta;
    alpha.reserve(m);
    beta.reserve(m);

    std::mt19937_64 rng(0x51a7e2b9u);
    std::normal_distribution<double> gauss;
    Eigen::VectorXd v(dim);
    for (int i = 0; i < dim; ++i) v[i] = gauss(rng);
    v.normalize();
    basis.col(0) = v;

    int steps = m;
    for (int j = 0; j < m; ++j) {
        Eigen::VectorXd w = solver.solve(basis.col(j));
        alpha.push_back(basis.col(j).dot(w));
        w -= alpha[j] * basis.col(j);
        if (j > 0) w -= beta[j - 1] * basis.col(j - 1);
        for (int pass = 0; pass < 2; ++pass)
            for (int c = 0; c <= j; ++c) w -= basis.col(c).dot(w) * basis.col(c);
        if (j + 1 == m) break;
        const double nw = w.norm();
        if (nw < 1e-13) {
            steps = j + 1;
            break;
        }
        beta.push_back(nw);
        basis.col(j + 1) = w / nw;
    }

    Eigen::VectorXd dia = Eigen::Map<const Eigen::VectorXd>(alpha.data(), steps);
    Eigen::VectorXd sub = steps > 1
                              ? Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(
                                    beta.data(), steps - 1))
                              : Eigen::VectorXd();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(dia, sub, Eigen::ComputeEigenvectors);
    if (es.info() != Eigen::Success)
        throw ConvergenceFailure("Krylov tridiagonal eigensolve failed");

    if (steps < k) throw ConvergenceFailure("Krylov space exhausted before convergence");
    Lowest out;
    for (int j = 0; j < k; ++j) {
        const int idx = steps - 1 - j; // largest Ritz values of the inverse
        const double theta = es.eigenvalues()[idx];
        if (!(theta > 0.0))
            throw ConvergenceFailure("shift landed inside the spectrum");
        out.values.push_back(sigma + 1.0 / theta);
        Eigen::VectorXd x = basis.leftCols(steps) * es.eigenvectors().col(idx);
        x.normalize();
        out.vectors.push_back(std::move(x));
    }
    return out;
}

// transverse-mode decomposition of the slab operator: radial finite volumes
// tensor DST modes, with the Coulomb term rotated into the mode basis
struct ModeSpace {
    int nr = 0;
    int nz = 0;
    double a = 0.0;
    double Z = 0.0;
    RadialOperator rad;
    std::vector<double> en;            // discrete transverse energies
    std::vector<Eigen::MatrixXd> vhat; // per-node mode-basis potential (empty if Z=0)
    double edge = 0.0;
};

ModeSpace assemble_modes(double a, double Z, const CylGrid& grid) {
    if (!(a > 0.0) || !(a < 1.0)) throw InvalidWidth("width must lie in (0, 1)");
    if (Z < 0.0) throw ConfigInvalid("charge must be nonnegative");
    if (grid.n_z < 4) throw InvalidGrid("mode decomposition needs at least 4 z-nodes");
    if (Z > 0.0 && !(a < std::sqrt(3.0) * kPi / (4.0 * Z)))
        throw ConfigInvalid("width outside the decomposition hypothesis a < sqrt(3) pi / (4 Z)");

    ModeSpace ms;
    ms.nr = grid.rho.n_nodes;
    ms.nz = grid.n_z;
    ms.a = a;
    ms.Z = Z;
    ms.rad = build_radial_operator(grid.rho);
    ms.en.resize(ms.nz);
    for (int n = 1; n <= ms.nz; ++n) ms.en[n - 1] = transverse_energy_disc(n, a, ms.nz);
    ms.edge = ms.en[0];

    if (Z > 0.0) {
        const auto z = z_nodes_impl(a, ms.nz);
        Eigen::MatrixXd S(ms.nz, ms.nz);
        const double amp = std::sqrt(2.0 / (ms.nz + 1));
        for (int j = 0; j < ms.nz; ++j)
            for (int n = 0; n < ms.nz; ++n)
                S(j, n) = amp * std::sin(kPi * (n + 1) * (j + 1) / (ms.nz + 1));
        ms.vhat.reserve(ms.nr);
        Eigen::VectorXd vdiag(ms.nz);
        for (int i = 0; i < ms.nr; ++i) {
            const double rho = ms.rad.centers[i];
            for (int j = 0; j < ms.nz; ++j)
                vdiag[j] = -Z / std::sqrt(rho * rho + z[j] * z[j]);
            ms.vhat.push_back(S.transpose() * vdiag.asDiagonal() * S);
        }
    }
    return ms;
}

double vh(const ModeSpace& ms, int i, int n, int np) {
    return ms.vhat.empty() ? 0.0 : ms.vhat[i](n, np);
}

SpMat build_full_shifted(const ModeSpace& ms, double shift) {
    const int dim = ms.nr * ms.nz;
    std::vector<Triplet> trip;
    trip.reserve(static_cast<size_t>(ms.nr) * ms.nz * (ms.nz + 2));
    for (int i = 0; i < ms.nr; ++i) {
        for (int n = 0; n < ms.nz; ++n) {
            const int t = i * ms.nz + n;
            trip.emplace_back(t, t, ms.rad.diag[i] + ms.en[n] + vh(ms, i, n, n) - shift);
            for (int np = n + 1; np < ms.nz; ++np) {
                const double c = vh(ms, i, n, np);
                if (c != 0.0) {
                    trip.emplace_back(t, i * ms.nz + np, c);
                    trip.emplace_back(i * ms.nz + np, t, c);
                }
            }
            if (i + 1 < ms.nr) {
                trip.emplace_back(t, t + ms.nz, ms.rad.offdiag[i]);
                trip.emplace_back(t + ms.nz, t, ms.rad.offdiag[i]);
            }
        }
    }
    SpMat mat(dim, dim);
    mat.setFromTriplets(trip.begin(), trip.end());
    return mat;
}

SpMat build_qq_shifted(const ModeSpace& ms, double shift) {
    const int nzq = ms.nz - 1;
    const int dim = ms.nr * nzq;
    std::vector<Triplet> trip;
    trip.reserve(static_cast<size_t>(ms.nr) * nzq * (nzq + 2));
    for (int i = 0; i < ms.nr; ++i) {
        for (int n = 1; n < ms.nz; ++n) {
            const int t = i * nzq + (n - 1);
            trip.emplace_back(t, t, ms.rad.diag[i] + ms.en[n] + vh(ms, i, n, n) - shift);
            for (int np = n + 1; np < ms.nz; ++np) {
                const double c = vh(ms, i, n, np);
                if (c != 0.0) {
                    trip.emplace_back(t, i * nzq + (np - 1), c);
                    trip.emplace_back(i * nzq + (np - 1), t, c);
                }
            }
            if (i + 1 < ms.nr) {
                trip.emplace_back(t, t + nzq, ms.rad.offdiag[i]);
                trip.emplace_back(t + nzq, t, ms.rad.offdiag[i]);
            }
        }
    }
    SpMat mat(dim, dim);
    mat.setFromTriplets(trip.begin(), trip.end());
    return mat;
}

Eigen::VectorXd coupling_row(const ModeSpace& ms, int i) {
    Eigen::VectorXd b = Eigen::VectorXd::Zero(ms.nz - 1);
    if (!ms.vhat.empty())
        for (int n = 1; n < ms.nz; ++n) b[n - 1] = ms.vhat[i](0, n);
    return b;
}

Eigen::VectorXd apply_coupling(const ModeSpace& ms, const Eigen::VectorXd& qvec) {
    const int nzq = ms.nz - 1;
    Eigen::VectorXd out = Eigen::VectorXd::Zero(ms.nr);
    if (ms.vhat.empty()) return out;
    for (int i = 0; i < ms.nr; ++i)
        out[i] = coupling_row(ms, i).dot(qvec.segment(i * nzq, nzq));
    return out;
}

// X = R_perp B^T (column i solves the complement block against the coupling
// out of radial node i) and the Schur coupling term W = B X
void schur_coupling(const ModeSpace& ms, const RefinedSolver& qq, Eigen::MatrixXd& X,
                    Eigen::MatrixXd& W) {
    const int nzq = ms.nz - 1;
    const int nq = ms.nr * nzq;
    X.resize(nq, ms.nr);
    if (ms.vhat.empty()) {
        X.setZero();
        W = Eigen::MatrixXd::Zero(ms.nr, ms.nr);
        return;
    }
    Eigen::VectorXd rhs(nq);
    for (int i = 0; i < ms.nr; ++i) {
        rhs.setZero();
        rhs.segment(i * nzq, nzq) = coupling_row(ms, i);
        X.col(i) = qq.solve(rhs);
    }
    W.resize(ms.nr, ms.nr);
    for (int c = 0; c < ms.nr; ++c) {
        const Eigen::VectorXd col = X.col(c);
        for (int i = 0; i < ms.nr; ++i)
            W(i, c) = coupling_row(ms, i).dot(col.segment(i * nzq, nzq));
    }
    W = 0.5 * (W + W.transpose()).eval();
}

Eigen::MatrixXd dense_tridiag(const std::vector<double>& diag,
                              const std::vector<double>& off) {
    const int n = static_cast<int>(diag.size());
    Eigen::MatrixXd mat = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        mat(i, i) = diag[i];
        if (i + 1 < n) {
            mat(i, i + 1) = off[i];
            mat(i + 1, i) = off[i];
        }
    }
    return mat;
}

std::vector<double> projected_block_diag(const ModeSpace& ms, bool include_edge) {
    std::vector<double> diag(ms.nr);
    for (int i = 0; i < ms.nr; ++i)
        diag[i] = ms.rad.diag[i] + (include_edge ? ms.en[0] : 0.0) + vh(ms, i, 0, 0);
    return diag;
}

} // namespace

TransverseMode transverse_mode(int n, double a, int n_z) {
    if (n < 1) throw ConfigInvalid("mode index must be at least 1");
    if (!(a > 0.0)) throw InvalidWidth("width must be positive");
    if (n_z < 2 * n) throw ConfigInvalid("z resolution too small for the requested mode");
    TransverseMode mode;
    mode.n = n;
    mode.a = a;
    mode.energy = (n * kPi / a) * (n * kPi / a);
    mode.parity = (n % 2 == 1) ? TransverseMode::Parity::even_cos
                               : TransverseMode::Parity::odd_sin;
    mode.nodes = z_nodes_impl(a, n_z);
    mode.values.resize(n_z);
    const double amp = std::sqrt(2.0 / a);
    for (int j = 0; j < n_z; ++j) {
        const double arg = n * kPi * mode.nodes[j] / a;
        mode.values[j] = amp * (n % 2 == 1 ? std::cos(arg) : std::sin(arg));
    }
    return mode;
}

double transverse_energy_disc(int n, double a, int n_z) {
    if (n < 1 || n > n_z) throw ConfigInvalid("mode index outside the discrete range");
    if (!(a > 0.0)) throw InvalidWidth("width must be positive");
    const double h = a / (n_z + 1);
    const double theta = n * kPi / (n_z + 1);
    return (2.0 - 2.0 * std::cos(theta)) / (h * h);
}

std::vector<double> layer_z_nodes(double a, int n_z) {
    if (!(a > 0.0)) throw InvalidWidth("width must be positive");
    if (n_z < 1) throw InvalidGrid("z node count must be positive");
    return z_nodes_impl(a, n_z);
}

EigenResult solve_layer_n1(double a, double Z, const CylGrid& grid, int k) {
    if (!(a > 0.0) || !(a < 1.0)) throw InvalidWidth("width must lie in (0, 1)");
    if (Z < 0.0) throw ConfigInvalid("charge must be nonnegative");
    if (grid.n_z < 32) throw InvalidGrid("slab solves need at least 32 z-nodes");
    if (k < 1) throw ConfigInvalid("requested level count must be positive");

    const RadialOperator rad = build_radial_operator(grid.rho);
    const auto z = z_nodes_impl(a, grid.n_z);
    const double hz = a / (grid.n_z + 1);
    const double edge = transverse_energy_disc(1, a, grid.n_z);
    const int nr = grid.rho.n_nodes;
    const int nz = grid.n_z;
    const int dim = nr * nz;

    const double g4 = std::pow(num::gamma_quarter(), 4.0);
    const double elow = -std::pow(g4 * Z / (8.0 * kPi * kPi), 2.0);
    const double sigma = edge + 1.5 * elow - (Z > 0.0 ? 1.0 : 0.0);

    std::vector<Triplet> trip;
    trip.reserve(static_cast<size_t>(dim) * 5);
    const double zcoef = 1.0 / (hz * hz);
    for (int i = 0; i < nr; ++i) {
        const double rho = rad.centers[i];
        for (int j = 0; j < nz; ++j) {
            const int t = i * nz + j;
            double d = rad.diag[i] + 2.0 * zcoef - sigma;
            if (Z > 0.0) d -= Z / std::sqrt(rho * rho + z[j] * z[j]);
            trip.emplace_back(t, t, d);
            if (j + 1 < nz) {
                trip.emplace_back(t, t + 1, -zcoef);
                trip.emplace_back(t + 1, t, -zcoef);
            }
            if (i + 1 < nr) {
                trip.emplace_back(t, t + nz, rad.offdiag[i]);
                trip.emplace_back(t + nz, t, rad.offdiag[i]);
            }
        }
    }
    SpMat shifted(dim, dim);
    shifted.setFromTriplets(trip.begin(), trip.end());

    Lowest low = shift_invert_lowest(shifted, sigma, k);

    EigenResult result;
    result.grid = grid.rho;
    result.potential_kind = "layer";
    result.edge = edge;
    result.centers = rad.centers;
    result.weights = rad.weights;
    for (int j = 0; j < k; ++j) {
        const double lam = low.values[j];
        const Eigen::VectorXd& x = low.vectors[j];
        const double res = (shifted * x + (sigma - lam) * x).norm() /
                           std::max(1.0, std::abs(lam));
        if (res > 1e-6)
            throw ConvergenceFailure("layer eigenpair residual above tolerance");
        result.eigenvalues.push_back(lam);
        result.residuals.push_back(res);
    }
    for (int j = 1; j < k; ++j)
        if (result.eigenvalues[j] < result.eigenvalues[j - 1])
            throw ConvergenceFailure("layer eigenvalues not sorted after extraction");

    const double box = num::tridiag_lowest(rad.diag, rad.offdiag, 1)[0];
    const double allowance = edge + 1.5 * box + 1e-12 * std::abs(edge);
    for (double lam : result.eigenvalues)
        if (lam > allowance)
            throw InsufficientBoundStates(
                "requested level sits in the discretized continuum above the "
                "transverse threshold");
    return result;
}

double projected_ground(double a, double Z, const CylGrid& grid) {
    auto ms = assemble_modes(a, Z, grid);
    const auto diag = projected_block_diag(ms, false);
    return num::tridiag_lowest(diag, ms.rad.offdiag, 1)[0];
}

double projection_consistency(double a, const std::vector<double>& probe_rhos, int n_z) {
    if (!(a > 0.0)) throw InvalidWidth("width must be positive");
    if (n_z < 8) throw InvalidGrid("projection probe needs at least 8 z-nodes");
    if (probe_rhos.empty()) throw ConfigInvalid("at least one probe radius required");
    const double h = a / (n_z + 1);
    const auto z = z_nodes_impl(a, n_z);
    std::vector<double> weight(n_z);
    for (int j = 0; j < n_z; ++j) {
        const double c = std::cos(kPi * z[j] / a);
        weight[j] = (2.0 / a) * c * c;
    }
    double dev = 0.0;
    for (double rho : probe_rhos) {
        if (!(rho > 0.0)) throw ConfigInvalid("probe radii must be positive");
        long double acc = 0.0;
        for (int j = 0; j < n_z; ++j)
            acc += weight[j] / std::sqrt(rho * rho + z[j] * z[j]);
        const double projected = static_cast<double>(acc) * h;
        dev = std::max(dev, std::abs(projected - v_en(a, rho)));
    }
    return dev;
}

FeshbachReport feshbach_residual(double a, double Z, double xi, const CylGrid& grid) {
    auto ms = assemble_modes(a, Z, grid);
    if (!(xi < ms.edge))
        throw ConfigInvalid("shift must sit below the transverse threshold");

    const int nr = ms.nr;
    const int nzq = ms.nz - 1;
    const int nq = nr * nzq;
    const int nfull = nr * ms.nz;

    RefinedSolver full(build_full_shifted(ms, xi),
                       "shift too close to the discrete spectrum to factorize");
    if (resolvent_norm_estimate(full, nfull, 25) > 1e8)
        throw SingularShift("shift within 1e-8 of a discrete eigenvalue");
    RefinedSolver qq(build_qq_shifted(ms, xi), nullptr);

    Eigen::MatrixXd X, W;
    schur_coupling(ms, qq, X, W);

    const auto diagPP = projected_block_diag(ms, true);
    Eigen::MatrixXd heff = dense_tridiag(diagPP, ms.rad.offdiag) - W;
    for (int i = 0; i < nr; ++i) heff(i, i) -= xi;
    const Eigen::MatrixXd reff = Eigen::PartialPivLU<Eigen::MatrixXd>(heff).inverse();

    // direct resolvent columns along the lowest-mode coordinates
    Eigen::MatrixXd prp(nr, nr), qrp(nq, nr);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nfull);
    for (int i = 0; i < nr; ++i) {
        rhs.setZero();
        rhs[i * ms.nz] = 1.0;
        const Eigen::VectorXd x = full.solve(rhs);
        for (int i2 = 0; i2 < nr; ++i2) {
            prp(i2, i) = x[i2 * ms.nz];
            qrp.col(i).segment(i2 * nzq, nzq) = x.segment(i2 * ms.nz + 1, nzq);
        }
    }

    const Eigen::MatrixXd f_qp = -X * reff;
    const double r1 = (prp - reff).norm();
    const double r3 = (qrp - f_qp).norm();

    // probe-based comparison for the blocks whose full assembly would need
    // the complete inverse
    std::mt19937_64 rng(0x2c9277b5u);
    std::normal_distribution<double> gauss;
    double diff_pq = 0.0, diff_qq = 0.0;
    for (int p = 0; p < 32; ++p) {
        Eigen::VectorXd y(nq);
        for (int i = 0; i < nq; ++i) y[i] = gauss(rng);
        y.normalize();
        Eigen::VectorXd yfull = Eigen::VectorXd::Zero(nfull);
        for (int i = 0; i < nr; ++i)
            yfull.segment(i * ms.nz + 1, nzq) = y.segment(i * nzq, nzq);
        const Eigen::VectorXd x = full.solve(yfull);
        Eigen::VectorXd prq(nr), qrq(nq);
        for (int i = 0; i < nr; ++i) {
            prq[i] = x[i * ms.nz];
            qrq.segment(i * nzq, nzq) = x.segment(i * ms.nz + 1, nzq);
        }
        const Eigen::VectorXd rperp_y = qq.solve(y);
        const Eigen::VectorXd reff_b = reff * apply_coupling(ms, rperp_y);
        diff_pq += (prq + reff_b).squaredNorm();
        diff_qq += (qrq - rperp_y - X * reff_b).squaredNorm();
    }

    const double scale = std::max(prp.norm(), reff.norm());
    FeshbachReport report;
    report.xi = xi;
    report.block_residuals[0] = r1 / scale;
    report.block_residuals[1] = std::sqrt(diff_pq) / scale;
    report.block_residuals[2] = r3 / scale;
    report.block_residuals[3] = std::sqrt(diff_qq) / scale;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(W, Eigen::EigenvaluesOnly);
    report.w_norm = es.eigenvalues().cwiseAbs().maxCoeff();

    // power iteration on the complement resolvent (symmetric positive)
    Eigen::VectorXd v(nq);
    std::mt19937_64 rng2(0x1b5673c3u);
    for (int i = 0; i < nq; ++i) v[i] = gauss(rng2);
    v.normalize();
    double nrm = 0.0;
    for (int it = 0; it < 40; ++it) {
        v = qq.solve(v);
        nrm = v.norm();
        v /= nrm;
    }
    report.r_bot_norm = nrm;
    return report;
}

double w_operator_norm(double a, double Z, double xi, const CylGrid& grid) {
    auto ms = assemble_modes(a, Z, grid);
    if (!(xi < ms.edge))
        throw ConfigInvalid("shift must sit below the transverse threshold");
    if (Z == 0.0) return 0.0;

    RefinedSolver qq(build_qq_shifted(ms, xi), nullptr);
    Eigen::MatrixXd X, W;
    schur_coupling(ms, qq, X, W);

    const double alpha = -constant_set({a, Z, 1}).mu;
    Eigen::VectorXd dia = Eigen::Map<const Eigen::VectorXd>(ms.rad.diag.data(), ms.nr);
    dia.array() += alpha;
    const Eigen::VectorXd sub =
        Eigen::Map<const Eigen::VectorXd>(ms.rad.offdiag.data(), ms.nr - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(dia, sub, Eigen::ComputeEigenvectors);
    if (es.info() != Eigen::Success)
        throw ConvergenceFailure("in-plane kinetic eigendecomposition failed");
    const Eigen::VectorXd filt = es.eigenvalues().cwiseSqrt().cwiseInverse();
    const Eigen::MatrixXd half =
        es.eigenvectors() * filt.asDiagonal() * es.eigenvectors().transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es2(half * W * half,
                                                       Eigen::EigenvaluesOnly);
    return es2.eigenvalues().maxCoeff();
}

} // namespace thinlayer
