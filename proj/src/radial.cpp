#include "thinlayer/radial.hpp"

#include "thinlayer/errors.hpp"
#include "thinlayer/numerics.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

namespace thinlayer {

namespace {

void check_grid(const RadialGrid& grid) {
    if (!(grid.rho_max > 0.0)) throw InvalidGrid("radial grid: rho_max must be positive");
    if (grid.n_nodes < 16) throw InvalidGrid("radial grid: need at least 16 nodes");
    if (grid.spacing == RadialGrid::Spacing::graded && !(grid.core > 0.0))
        throw InvalidGrid("radial grid: graded spacing needs a positive core scale");
}

std::vector<double> cell_edges(const RadialGrid& grid) {
    const int n = grid.n_nodes;
    std::vector<double> e(n + 1);
    if (grid.spacing == RadialGrid::Spacing::uniform) {
        for (int j = 0; j <= n; ++j) e[j] = grid.rho_max * j / double(n);
    } else {
        const double beta = std::log1p(grid.rho_max / grid.core);
        for (int j = 0; j <= n; ++j)
            e[j] = grid.core * std::expm1(beta * j / double(n));
        e[n] = grid.rho_max;
    }
    return e;
}

double eval_potential(const TabulatedPotential& pot, double rho) {
    switch (pot.kind) {
    case PotentialKind::en: return v_en(pot.a, rho);
    case PotentialKind::ee: return v_ee(pot.a, rho);
    default: return 1.0 / rho;
    }
}

EigenResult solve_tridiag(std::vector<double> diag, const std::vector<double>& off,
                          const RadialOperator& op, const RadialGrid& grid, int k,
                          const std::string& kind_name, double edge) {
    const int n = static_cast<int>(diag.size());
    if (k < 1) throw ConfigInvalid("solver: need k >= 1");
    const int below = num::tridiag_count_below(diag, off, edge);
    if (below < k)
        throw InsufficientBoundStates("requested " + std::to_string(k) +
                                      " levels below the continuum edge, found " +
                                      std::to_string(below));
    EigenResult res;
    res.grid = grid;
    res.potential_kind = kind_name;
    res.edge = edge;
    res.centers = op.centers;
    res.weights = op.weights;
    auto lows = num::tridiag_lowest(diag, off, k);
    for (double lam : lows) {
        auto pair = num::tridiag_eigenpair(diag, off, lam);
        double scale = std::max(1.0, std::abs(pair.value));
        if (pair.residual > 1e-8 * scale)
            throw ConvergenceFailure("radial eigenpair residual " +
                                     std::to_string(pair.residual) + " at lambda = " +
                                     std::to_string(pair.value));
        res.eigenvalues.push_back(pair.value);
        res.residuals.push_back(pair.residual);
        res.vectors.push_back(std::move(pair.vector));
    }
    // bisection + inverse iteration must agree on the ordering
    for (size_t j = 1; j < res.eigenvalues.size(); ++j)
        if (res.eigenvalues[j] < res.eigenvalues[j - 1])
            throw ConvergenceFailure("radial eigenvalues came back unsorted");
    (void)n;
    return res;
}

} // namespace

RadialOperator build_radial_operator(const RadialGrid& grid) {
    check_grid(grid);
    const int n = grid.n_nodes;
    auto e = cell_edges(grid);
    RadialOperator op;
    op.centers.resize(n);
    op.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        op.centers[i] = 0.5 * (e[i] + e[i + 1]);
        op.weights[i] = op.centers[i] * (e[i + 1] - e[i]);
    }
    // flux coefficients at interior edges; no flux through rho = 0
    std::vector<double> flux(n);
    for (int i = 0; i + 1 < n; ++i)
        flux[i] = e[i + 1] / (op.centers[i + 1] - op.centers[i]);
    flux[n - 1] = e[n] / (e[n] - op.centers[n - 1]); // Dirichlet wall
    op.diag.resize(n);
    op.offdiag.resize(n - 1);
    const double m2 = double(grid.m) * double(grid.m);
    for (int i = 0; i < n; ++i) {
        double d = flux[i];
        if (i > 0) d += flux[i - 1];
        op.diag[i] = d / op.weights[i] + m2 / (op.centers[i] * op.centers[i]);
    }
    for (int i = 0; i + 1 < n; ++i)
        op.offdiag[i] = -flux[i] / std::sqrt(op.weights[i] * op.weights[i + 1]);
    return op;
}

std::vector<double> hydrogen2d_levels(double Z, int count) {
    if (!(Z > 0.0) || count < 1)
        throw ConfigInvalid("hydrogen2d_levels: need Z > 0 and count >= 1");
    std::vector<double> levels(count);
    for (int n = 1; n <= count; ++n)
        levels[n - 1] = -Z * Z / ((2.0 * n - 1.0) * (2.0 * n - 1.0));
    return levels;
}

EigenResult solve_radial(const TabulatedPotential& pot, const RadialGrid& grid, int k,
                         double coupling) {
    auto op = build_radial_operator(grid);
    if (pot.nodes.empty() || pot.nodes.front() > op.centers.front() ||
        pot.nodes.back() < op.centers.back())
        throw InvalidGrid("solve_radial: tabulated potential does not cover the grid");
    auto diag = op.diag;
    if (coupling != 0.0)
        for (int i = 0; i < grid.n_nodes; ++i)
            diag[i] += coupling * eval_potential(pot, op.centers[i]);
    const char* kind = pot.kind == PotentialKind::en
                           ? "en"
                           : (pot.kind == PotentialKind::ee ? "ee" : "coulomb2d");
    return solve_tridiag(std::move(diag), op.offdiag, op, grid, k, kind, 0.0);
}

EigenResult eff_levels_n1(double a, double Z, int m, int k) {
    if (!(a > 0.0) || a >= 1.0)
        throw InvalidWidth("eff_levels_n1: width must lie in (0, 1)");
    if (!(Z > 0.0)) throw ConfigInvalid("eff_levels_n1: Z must be positive");
    RadialGrid grid;
    grid.rho_max = std::max(200.0, 50.0 / Z);
    grid.n_nodes = 1600;
    grid.spacing = RadialGrid::Spacing::graded;
    grid.m = std::abs(m);
    grid.core = std::max(0.25 * a, 1e-4);
    auto op = build_radial_operator(grid);
    auto diag = op.diag;
    for (int i = 0; i < grid.n_nodes; ++i)
        diag[i] -= Z * v_en(a, op.centers[i]);
    return solve_tridiag(std::move(diag), op.offdiag, op, grid, k, "eff_en", 0.0);
}

double sandwich_norm(double a, PotentialKind kind, const RadialGrid& grid_in) {
    if (!(a > 0.0) || !(a < 0.5))
        throw InvalidWidth("sandwich_norm: width must lie in (0, 1/2)");
    if (kind == PotentialKind::coulomb2d) return 0.0; // W vanishes identically
    RadialGrid grid = grid_in;
    grid.m = 0;
    auto op = build_radial_operator(grid);
    const int n = grid.n_nodes;

    Eigen::VectorXd dia = Eigen::Map<const Eigen::VectorXd>(op.diag.data(), n);
    Eigen::VectorXd sub = Eigen::Map<const Eigen::VectorXd>(op.offdiag.data(), n - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(dia, sub, Eigen::ComputeEigenvectors);
    if (es.info() != Eigen::Success)
        throw ConvergenceFailure("sandwich_norm: tridiagonal eigensolver failed");

    Eigen::VectorXd filt = (es.eigenvalues().array() + 2.0).rsqrt();
    Eigen::MatrixXd half =
        es.eigenvectors() * filt.asDiagonal() * es.eigenvectors().transpose();

    Eigen::VectorXd gap(n);
    for (int i = 0; i < n; ++i) {
        double rho = op.centers[i];
        double v = kind == PotentialKind::en ? v_en(a, rho) : v_ee(a, rho);
        gap[i] = 1.0 / rho - v; // nonnegative by the potential bounds
    }
    Eigen::MatrixXd sandwiched = half * gap.asDiagonal() * half;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es2(sandwiched,
                                                       Eigen::EigenvaluesOnly);
    if (es2.info() != Eigen::Success)
        throw ConvergenceFailure("sandwich_norm: dense eigensolver failed");
    return es2.eigenvalues().maxCoeff();
}

} // namespace thinlayer
