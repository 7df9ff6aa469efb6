#include "thinlayer/numerics.hpp"
#include "thinlayer/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <queue>
#include <thread>

namespace thinlayer::num {

// ---------------------------------------------------------------- gamma ----

double gamma_fn(double x) {
    // Lanczos approximation, g = 7, 9 coefficients (standard set).
    static const double g = 7.0;
    static const double c[9] = {
        0.99999999999980993,    676.5203681218851,     -1259.1392167224028,
        771.32342877765313,     -176.61502916214059,   12.507343278686905,
        -0.13857109526572012,   9.9843695780195716e-6, 1.5056327351493116e-7};

    if (x < 0.5) {
        // reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
        return M_PI / (std::sin(M_PI * x) * gamma_fn(1.0 - x));
    }
    x -= 1.0;
    double a = c[0];
    double t = x + g + 0.5;
    for (int i = 1; i < 9; ++i) a += c[i] / (x + i);
    return std::sqrt(2.0 * M_PI) * std::pow(t, x + 0.5) * std::exp(-t) * a;
}

double gamma_quarter() {
    static const double v = gamma_fn(0.25);
    return v;
}

// ----------------------------------------------------------- quadrature ----

namespace {

// Gauss 7 / Kronrod 15 nodes and weights on [-1, 1].
const double kron_x[8] = {0.991455371120813,  0.949107912342759, 0.864864423359769,
                          0.741531185599394,  0.586087235467691, 0.405845151377397,
                          0.207784955007898,  0.0};
const double kron_w[8] = {0.022935322010529,  0.063092092629979, 0.104790010322250,
                          0.140653259715525,  0.169004726639267, 0.190350578064785,
                          0.204432940075298,  0.209482141084728};
const double gauss_w[4] = {0.129484966168870, 0.279705391489277, 0.381830050505119,
                           0.417959183673469};

struct Panel {
    double a, b, value, err;
    bool operator<(const Panel& o) const { return err < o.err; }
};

Panel eval_panel(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double fv[15];
    fv[14] = f(c);
    for (int i = 0; i < 7; ++i) {
        fv[2 * i] = f(c - h * kron_x[i]);
        fv[2 * i + 1] = f(c + h * kron_x[i]);
    }
    double kron = kron_w[7] * fv[14];
    double gauss = gauss_w[3] * fv[14];
    double resabs = kron_w[7] * std::abs(fv[14]);
    for (int i = 0; i < 7; ++i) {
        double s = fv[2 * i] + fv[2 * i + 1];
        kron += kron_w[i] * s;
        resabs += kron_w[i] * (std::abs(fv[2 * i]) + std::abs(fv[2 * i + 1]));
        if (i % 2 == 1) gauss += gauss_w[i / 2] * s;
    }
    // variation around the mean, the scale QUADPACK sharpens against
    double mean = 0.5 * kron;
    double resasc = kron_w[7] * std::abs(fv[14] - mean);
    for (int i = 0; i < 7; ++i)
        resasc += kron_w[i] * (std::abs(fv[2 * i] - mean) + std::abs(fv[2 * i + 1] - mean));
    kron *= h;
    gauss *= h;
    resabs *= h;
    resasc *= h;
    double err = std::abs(kron - gauss);
    if (resasc != 0.0 && err != 0.0)
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    const double eps = std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps))
        err = std::max(50.0 * eps * resabs, err);
    return {a, b, kron, err};
}

} // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadOptions& opt) {
    if (!(b > a)) {
        if (a == b) return 0.0;
        return -integrate(f, b, a, opt);
    }
    std::priority_queue<Panel> panels;
    panels.push(eval_panel(f, a, b));
    double total = panels.top().value, total_err = panels.top().err;
    int used = 1;
    while (total_err > std::max(opt.abs_tol, opt.rel_tol * std::abs(total))) {
        if (used >= opt.max_intervals)
            throw QuadratureFailure("adaptive G7K15: interval budget exhausted, err=" +
                                    std::to_string(total_err));
        Panel worst = panels.top();
        panels.pop();
        double mid = 0.5 * (worst.a + worst.b);
        Panel left = eval_panel(f, worst.a, mid);
        Panel right = eval_panel(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_err += left.err + right.err - worst.err;
        panels.push(left);
        panels.push(right);
        ++used;
    }
    return total;
}

// ------------------------------------------------- tridiagonal spectrum ----

int tridiag_count_below(const std::vector<double>& diag,
                        const std::vector<double>& offdiag, double x) {
    const int n = static_cast<int>(diag.size());
    int count = 0;
    double q = diag[0] - x;
    if (q < 0.0) ++count;
    for (int i = 1; i < n; ++i) {
        double e2 = offdiag[i - 1] * offdiag[i - 1];
        if (q == 0.0) q = 1e-300;
        q = diag[i] - x - e2 / q;
        if (q < 0.0) ++count;
    }
    return count;
}

std::vector<double> tridiag_lowest(const std::vector<double>& diag,
                                   const std::vector<double>& offdiag, int k) {
    const int n = static_cast<int>(diag.size());
    if (k < 1 || k > n) throw std::invalid_argument("tridiag_lowest: bad k");
    // Gershgorin bracket
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int i = 0; i < n; ++i) {
        double r = (i > 0 ? std::abs(offdiag[i - 1]) : 0.0) +
                   (i + 1 < n ? std::abs(offdiag[i]) : 0.0);
        lo = std::min(lo, diag[i] - r);
        hi = std::max(hi, diag[i] + r);
    }
    const double scale = std::max(std::abs(lo), std::abs(hi));
    std::vector<double> out(k);
    for (int j = 0; j < k; ++j) {
        double a = lo, b = hi;
        // locate eigenvalue j (0-based): smallest x with count(x) >= j+1
        while (b - a > 1e-14 * scale + 1e-300) {
            double m = 0.5 * (a + b);
            if (m <= a || m >= b) break; // bisection hit machine resolution
            if (tridiag_count_below(diag, offdiag, m) >= j + 1)
                b = m;
            else
                a = m;
        }
        out[j] = 0.5 * (a + b);
    }
    return out;
}

EigenPair tridiag_eigenpair(const std::vector<double>& diag,
                            const std::vector<double>& offdiag, double lambda_guess) {
    const int n = static_cast<int>(diag.size());
    double lambda = lambda_guess;
    std::vector<double> v(n);
    // deterministic start with a mild profile, avoids accidental orthogonality
    for (int i = 0; i < n; ++i) v[i] = 1.0 / (1.0 + i % 7);

    auto solve_shifted = [&](std::vector<double>& x, double mu) {
        // LU of (T - mu I) with partial pivoting. A row swap pushes one fill
        // entry into a second superdiagonal; row i holds [a_i, b_i, c_i]
        // starting at column i.
        std::vector<double> a(n), b(n, 0.0), c(n, 0.0), rhs(x);
        for (int i = 0; i < n; ++i) a[i] = diag[i] - mu;
        for (int i = 0; i + 1 < n; ++i) b[i] = offdiag[i];
        for (int i = 0; i + 1 < n; ++i) {
            double sub = offdiag[i]; // entry (i+1, i)
            if (std::abs(a[i]) >= std::abs(sub)) {
                if (a[i] == 0.0) a[i] = 1e-300;
                double m = sub / a[i];
                a[i + 1] -= m * b[i];
                b[i + 1] -= m * c[i];
                rhs[i + 1] -= m * rhs[i];
            } else {
                double m = a[i] / sub;
                double bi = b[i], ci = c[i];
                a[i] = sub;
                b[i] = a[i + 1];
                c[i] = b[i + 1];
                a[i + 1] = bi - m * b[i];
                b[i + 1] = ci - m * c[i];
                c[i + 1] = 0.0;
                std::swap(rhs[i], rhs[i + 1]);
                rhs[i + 1] -= m * rhs[i];
            }
        }
        if (a[n - 1] == 0.0) a[n - 1] = 1e-300;
        x[n - 1] = rhs[n - 1] / a[n - 1];
        if (n >= 2) x[n - 2] = (rhs[n - 2] - b[n - 2] * x[n - 1]) / a[n - 2];
        for (int i = n - 3; i >= 0; --i)
            x[i] = (rhs[i] - b[i] * x[i + 1] - c[i] * x[i + 2]) / a[i];
    };

    auto normalize = [&](std::vector<double>& x) {
        double s = 0.0;
        for (double t : x) s += t * t;
        s = std::sqrt(s);
        for (double& t : x) t /= s;
        return s;
    };
    auto matvec = [&](const std::vector<double>& x, std::vector<double>& y) {
        for (int i = 0; i < n; ++i) {
            double t = diag[i] * x[i];
            if (i > 0) t += offdiag[i - 1] * x[i - 1];
            if (i + 1 < n) t += offdiag[i] * x[i + 1];
            y[i] = t;
        }
    };

    normalize(v);
    std::vector<double> w(n);
    double res = 0.0;
    for (int it = 0; it < 8; ++it) {
        solve_shifted(v, lambda);
        normalize(v);
        matvec(v, w);
        double rq = 0.0;
        for (int i = 0; i < n; ++i) rq += v[i] * w[i];
        res = 0.0;
        for (int i = 0; i < n; ++i) {
            double r = w[i] - rq * v[i];
            res += r * r;
        }
        res = std::sqrt(res);
        lambda = rq;
        if (res < 1e-11 * std::max(1.0, std::abs(rq))) break;
    }
    return {lambda, std::move(v), res};
}

// --------------------------------------------------------------- spline ----

Spline::Spline(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
    const int n = static_cast<int>(x_.size());
    if (n < 3 || y_.size() != x_.size()) throw std::invalid_argument("Spline: need >= 3 points");
    for (int i = 1; i < n; ++i)
        if (!(x_[i] > x_[i - 1])) throw std::invalid_argument("Spline: abscissae not increasing");
    // natural spline: solve tridiagonal for second derivatives
    std::vector<double> a(n, 0.0), b(n, 0.0), c(n, 0.0), r(n, 0.0);
    b[0] = b[n - 1] = 1.0;
    for (int i = 1; i + 1 < n; ++i) {
        double hm = x_[i] - x_[i - 1], hp = x_[i + 1] - x_[i];
        a[i] = hm / 6.0;
        b[i] = (hm + hp) / 3.0;
        c[i] = hp / 6.0;
        r[i] = (y_[i + 1] - y_[i]) / hp - (y_[i] - y_[i - 1]) / hm;
    }
    // Thomas algorithm (diagonally dominant here)
    for (int i = 1; i < n; ++i) {
        double m = a[i] / b[i - 1];
        b[i] -= m * c[i - 1];
        r[i] -= m * r[i - 1];
    }
    m_.assign(n, 0.0);
    m_[n - 1] = r[n - 1] / b[n - 1];
    for (int i = n - 2; i >= 0; --i) m_[i] = (r[i] - c[i] * m_[i + 1]) / b[i];
}

double Spline::operator()(double x) const {
    const int n = static_cast<int>(x_.size());
    if (x <= x_.front()) {
        double h = x_[1] - x_[0];
        double d = (y_[1] - y_[0]) / h - h * (2.0 * m_[0] + m_[1]) / 6.0;
        return y_[0] + d * (x - x_[0]);
    }
    if (x >= x_.back()) {
        double h = x_[n - 1] - x_[n - 2];
        double d = (y_[n - 1] - y_[n - 2]) / h + h * (m_[n - 2] + 2.0 * m_[n - 1]) / 6.0;
        return y_[n - 1] + d * (x - x_[n - 1]);
    }
    int lo = static_cast<int>(std::upper_bound(x_.begin(), x_.end(), x) - x_.begin()) - 1;
    double h = x_[lo + 1] - x_[lo];
    double t = (x - x_[lo]) / h;
    double u = 1.0 - t;
    return u * y_[lo] + t * y_[lo + 1] +
           h * h / 6.0 * ((u * u * u - u) * m_[lo] + (t * t * t - t) * m_[lo + 1]);
}

// ----------------------------------------------------------------- fits ----

double fit_single(const std::vector<double>& phi, const std::vector<double>& y) {
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < phi.size(); ++i) {
        num += phi[i] * y[i];
        den += phi[i] * phi[i];
    }
    if (den == 0.0) throw DegenerateFit("fit_single: zero design column");
    return num / den;
}

Fit2 fit_pair(const std::vector<double>& phi1, const std::vector<double>& phi2,
              const std::vector<double>& y) {
    double a11 = 0, a12 = 0, a22 = 0, b1 = 0, b2 = 0;
    for (size_t i = 0; i < y.size(); ++i) {
        a11 += phi1[i] * phi1[i];
        a12 += phi1[i] * phi2[i];
        a22 += phi2[i] * phi2[i];
        b1 += phi1[i] * y[i];
        b2 += phi2[i] * y[i];
    }
    double det = a11 * a22 - a12 * a12;
    if (std::abs(det) <= 1e-14 * a11 * a22)
        throw DegenerateFit("fit_pair: collinear design columns");
    return {(b1 * a22 - b2 * a12) / det, (a11 * b2 - a12 * b1) / det};
}

// ----------------------------------------------------------------- misc ----

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

int thread_budget() {
    static const int budget = [] {
        if (const char* env = std::getenv("THINLAYER_THREADS")) {
            int v = std::atoi(env);
            if (v >= 1) return v;
        }
        unsigned hw = std::thread::hardware_concurrency();
        return hw ? static_cast<int>(hw) : 1;
    }();
    return budget;
}

void parallel_for(int n, const std::function<void(int)>& fn) {
    const int workers = std::min(n, thread_budget());
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mtx;
    auto run = [&] {
        for (;;) {
            int i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lk(error_mtx);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t) pool.emplace_back(run);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

} // namespace thinlayer::num
