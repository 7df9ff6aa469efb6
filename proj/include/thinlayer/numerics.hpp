#pragma once

#include <cstdint>
#include <functional>
#include <string_view>
#include <vector>

// Shared numerical kernels: adaptive Gauss-Kronrod quadrature, a symmetric
// tridiagonal eigensolver (Sturm bisection + inverse iteration), gamma,
// cubic splines, small least-squares fits, and the thread budget helper.

namespace thinlayer::num {

// ---- special functions ----

// Lanczos-series gamma, good to ~1e-14 relative on (0, 170).
double gamma_fn(double x);

// Gamma(1/4), cached. Validated in tests against the reflection formula.
double gamma_quarter();

// ---- quadrature ----

struct QuadOptions {
    double abs_tol = 1e-12;
    double rel_tol = 1e-12;
    int max_intervals = 4000;
};

// Adaptive G7K15 on [a, b]. Throws QuadratureFailure when the interval budget
// is exhausted before the tolerance is met.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadOptions& opt = {});

// ---- symmetric tridiagonal eigenproblems ----
// diag has n entries, offdiag n-1. Conventions match the assembled radial
// operators: row i couples to i+1 with offdiag[i].

// Number of eigenvalues strictly below x (Sturm sequence count).
int tridiag_count_below(const std::vector<double>& diag,
                        const std::vector<double>& offdiag, double x);

// The k lowest eigenvalues by bisection, each to abs tol ~1e-13*scale.
std::vector<double> tridiag_lowest(const std::vector<double>& diag,
                                   const std::vector<double>& offdiag, int k);

// Eigenvector for an isolated eigenvalue via inverse iteration; the returned
// vector is 2-normalized and lambda is refined by a Rayleigh quotient step.
struct EigenPair {
    double value;
    std::vector<double> vector;
    double residual; // ||T v - lambda v||_2
};
EigenPair tridiag_eigenpair(const std::vector<double>& diag,
                            const std::vector<double>& offdiag, double lambda_guess);

// ---- interpolation ----

// Natural cubic spline on strictly increasing abscissae.
class Spline {
  public:
    Spline() = default;
    Spline(std::vector<double> x, std::vector<double> y);
    double operator()(double x) const;
    bool empty() const { return x_.empty(); }

  private:
    std::vector<double> x_, y_, m_; // m_: second derivatives
};

// ---- small fits and extrapolation ----

// Least squares y ~ c*phi on matched samples; returns c.
double fit_single(const std::vector<double>& phi, const std::vector<double>& y);

// Least squares y ~ c1*phi1 + c2*phi2 via 2x2 normal equations.
struct Fit2 {
    double c1, c2;
};
Fit2 fit_pair(const std::vector<double>& phi1, const std::vector<double>& phi2,
              const std::vector<double>& y);

// Richardson extrapolation for an order-p method, from values at h and h/2.
inline double richardson(double coarse, double fine, double order) {
    double w = 1.0;
    for (int i = 0; i < static_cast<int>(order); ++i) w *= 2.0;
    return fine + (fine - coarse) / (w - 1.0);
}

// ---- misc ----

std::uint64_t fnv1a64(std::string_view bytes);

// Thread budget: THINLAYER_THREADS when set, else hardware concurrency.
int thread_budget();

// Runs fn(i) for i in [0, n) across at most thread_budget() threads.
// Deterministic partitioning; exceptions propagate to the caller.
void parallel_for(int n, const std::function<void(int)>& fn);

} // namespace thinlayer::num
