#include "sticky/specfun.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <string>

#include <Eigen/Eigenvalues>

#include "sticky/errors.hpp"

namespace sticky::specfun {

namespace {

void require_finite(double z, const char* who) {
    if (!std::isfinite(z)) {
        throw DomainError(std::string(who) + ": non-finite argument");
    }
}

// erf(z) = (2/sqrt(pi)) exp(-z^2) sum_n 2^n z^(2n+1) / (2n+1)!!; all terms positive.
long double erf_series(long double z) {
    long double term = z;
    long double sum = z;
    const long double z2 = 2.0L * z * z;
    for (int n = 1; n < 500; ++n) {
        term *= z2 / static_cast<long double>(2 * n + 1);
        sum += term;
        if (term < 1e-22L * sum) break;
    }
    return 2.0L / std::sqrt(std::numbers::pi_v<long double>) * std::exp(-z * z) * sum;
}

// Laplace continued fraction, evaluated with the modified Lentz scheme.
long double erfc_fraction(long double z) {
    constexpr long double tiny = 1e-300L;
    long double f = z;
    long double c = f;
    long double d = 0.0L;
    for (int k = 1; k < 5000; ++k) {
        const long double a = 0.5L * k;
        d = z + a * d;
        if (std::fabs(d) < tiny) d = tiny;
        d = 1.0L / d;
        c = z + a / c;
        if (std::fabs(c) < tiny) c = tiny;
        const long double delta = c * d;
        f *= delta;
        if (std::fabs(delta - 1.0L) < 1e-20L) break;
    }
    return std::exp(-z * z) / (std::sqrt(std::numbers::pi_v<long double>) * f);
}

constexpr double erfc_switchover = 3.0;

// sum_k (z/2)^(2k+nu) / (k! (k+nu)!)
long double bessel_i_series(int nu, long double z) {
    const long double half = 0.5L * z;
    const long double q = half * half;
    long double term = nu == 0 ? 1.0L : half;
    long double sum = term;
    for (int k = 1; k < 1000; ++k) {
        term *= q / (static_cast<long double>(k) * static_cast<long double>(k + nu));
        sum += term;
        if (term < 1e-21L * sum) break;
    }
    return sum;
}

long double bessel_i_asymptotic(int nu, long double z) {
    const long double mu = 4.0L * nu * nu;
    long double term = 1.0L;
    long double sum = 1.0L;
    long double prev = 1.0L;
    for (int k = 1; k < 60; ++k) {
        const long double odd = 2.0L * k - 1.0L;
        term *= -(mu - odd * odd) / (static_cast<long double>(k) * 8.0L * z);
        if (std::fabs(term) > std::fabs(prev)) break;
        sum += term;
        prev = term;
        if (std::fabs(term) < 1e-20L * std::fabs(sum)) break;
    }
    return std::exp(z) / std::sqrt(2.0L * std::numbers::pi_v<long double> * z) * sum;
}

constexpr double bessel_switchover = 25.0;

constexpr std::array<double, 8> kronrod_x = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kronrod_w = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> gauss_w = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a;
    double b;
    double value;
    double error;
    double abs_value;

    bool operator<(const Panel& other) const { return error < other.error; }
};

double checked(const RealFunction& g, double x) {
    const double v = g(x);
    if (!std::isfinite(v)) {
        throw DomainError("quadrature: integrand is non-finite at x = " + std::to_string(x));
    }
    return v;
}

Panel gauss_kronrod(const RealFunction& g, double a, double b) {
    const double centre = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = checked(g, centre);
    double kronrod = fc * kronrod_w[7];
    double gauss = fc * gauss_w[3];
    double abs_sum = std::fabs(fc) * kronrod_w[7];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kronrod_x[j];
        const double f1 = checked(g, centre - dx);
        const double f2 = checked(g, centre + dx);
        kronrod += kronrod_w[j] * (f1 + f2);
        abs_sum += kronrod_w[j] * (std::fabs(f1) + std::fabs(f2));
        if (j % 2 == 1) gauss += gauss_w[j / 2] * (f1 + f2);
    }
    return {a, b, kronrod * half, std::fabs((kronrod - gauss) * half), abs_sum * std::fabs(half)};
}

double adaptive_finite(const RealFunction& g, double a, double b, const QuadratureSpec& spec) {
    std::priority_queue<Panel> panels;
    Panel first = gauss_kronrod(g, a, b);
    double total = first.value;
    double total_err = first.error;
    panels.push(first);
    int subdivisions = 1;
    while (total_err > std::max(spec.abs_tol, spec.rel_tol * std::fabs(total))) {
        if (subdivisions >= spec.max_subdivisions) {
            throw AccuracyError("quadrature: subdivision limit reached on [" + std::to_string(a) +
                                    ", " + std::to_string(b) + "]",
                                total, total_err);
        }
        Panel worst = panels.top();
        panels.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {
            throw AccuracyError("quadrature: panel width hit machine resolution", total, total_err);
        }
        Panel left = gauss_kronrod(g, worst.a, mid);
        Panel right = gauss_kronrod(g, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        panels.push(left);
        panels.push(right);
        ++subdivisions;
    }
    // Re-sum to shed the drift of the running updates.
    total = 0.0;
    while (!panels.empty()) {
        total += panels.top().value;
        panels.pop();
    }
    return total;
}

// Finite bound beyond `start` (direction +1 or -1) past which the integrand is negligible.
double truncation_bound(const RealFunction& g, double start, int direction,
                        const QuadratureSpec& spec) {
    double width = 1.0;
    for (int k = 0; k < 80; ++k) {
        const double inner = start + direction * width;
        const double outer = start + direction * 2.0 * width;
        const Panel probe = direction > 0 ? gauss_kronrod(g, inner, outer)
                                          : gauss_kronrod(g, outer, inner);
        if (probe.abs_value < spec.abs_tol / 10.0) return inner;
        width *= 2.0;
    }
    throw AccuracyError("quadrature: integrand does not decay on the infinite range", 0.0,
                        std::numeric_limits<double>::infinity());
}

}  // namespace

void QuadratureSpec::validate() const {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) {
        throw DomainError("QuadratureSpec: tolerances must be positive");
    }
    if (max_subdivisions < 1) throw DomainError("QuadratureSpec: max_subdivisions must be >= 1");
    if (node_count < 2) throw DomainError("QuadratureSpec: node_count must be >= 2");
}

double erfc(double z) {
    require_finite(z, "erfc");
    if (z < 0.0) return 2.0 - erfc(-z);
    const long double x = z;
    if (z < erfc_switchover) return static_cast<double>(1.0L - erf_series(x));
    return static_cast<double>(erfc_fraction(x));
}

double bessel_i0(double z) {
    require_finite(z, "bessel_i0");
    const long double x = std::fabs(z);
    if (x <= bessel_switchover) return static_cast<double>(bessel_i_series(0, x));
    return static_cast<double>(bessel_i_asymptotic(0, x));
}

double bessel_i1(double z) {
    require_finite(z, "bessel_i1");
    const long double x = std::fabs(z);
    const long double v =
        x <= bessel_switchover ? bessel_i_series(1, x) : bessel_i_asymptotic(1, x);
    return static_cast<double>(z < 0.0 ? -v : v);
}

double normal_cdf(double z) { return 0.5 * erfc(-z / std::numbers::sqrt2); }

double normal_pdf(double z) {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

HermiteRule gauss_hermite_rule(int n) {
    if (n < 2) throw DomainError("gauss_hermite_rule: need at least 2 nodes");
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        const double beta = std::sqrt(0.5 * k);
        jacobi(k, k - 1) = beta;
        jacobi(k - 1, k) = beta;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
    HermiteRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const double mu0 = std::sqrt(std::numbers::pi);
    for (int i = 0; i < n; ++i) {
        rule.nodes[i] = solver.eigenvalues()(i);
        const double v0 = solver.eigenvectors()(0, i);
        rule.weights[i] = mu0 * v0 * v0;
    }
    return rule;
}

double gauss_expectation(const RealFunction& g, const QuadratureSpec& spec) {
    spec.validate();
    if (spec.method == QuadratureMethod::gauss_hermite) {
        const HermiteRule rule = gauss_hermite_rule(spec.node_count);
        double sum = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            sum += rule.weights[i] * checked(g, std::numbers::sqrt2 * rule.nodes[i]);
        }
        return sum / std::sqrt(std::numbers::pi);
    }
    // Gaussian mass beyond the window is below abs_tol / 10 per unit of sup|g|.
    const double cut = 0.1 * spec.abs_tol;
    const double window = std::max(8.0, std::sqrt(-2.0 * std::log(cut)));
    const RealFunction weighted = [&g](double z) { return g(z) * normal_pdf(z); };
    const double zero = 0.0;
    return integrate_piecewise(weighted, -window, window, std::span<const double>(&zero, 1), spec);
}

double integrate_interval(const RealFunction& g, double a, double b, const QuadratureSpec& spec) {
    spec.validate();
    if (std::isnan(a) || std::isnan(b) || a > b) {
        throw DomainError("integrate_interval: require a <= b");
    }
    if (a == b) return 0.0;
    const bool lower_inf = std::isinf(a);
    const bool upper_inf = std::isinf(b);
    if (lower_inf && upper_inf) {
        return integrate_interval(g, a, 0.0, spec) + integrate_interval(g, 0.0, b, spec);
    }
    if (upper_inf) b = truncation_bound(g, a, +1, spec);
    if (lower_inf) a = truncation_bound(g, b, -1, spec);
    return adaptive_finite(g, a, b, spec);
}

double integrate_piecewise(const RealFunction& g, double a, double b,
                           std::span<const double> breakpoints, const QuadratureSpec& spec) {
    if (std::isnan(a) || std::isnan(b) || a > b) {
        throw DomainError("integrate_piecewise: require a <= b");
    }
    if (a == b) return 0.0;
    std::vector<double> cuts{a};
    for (double p : breakpoints) {
        require_finite(p, "integrate_piecewise");
        if (p > a && p < b) cuts.push_back(p);
    }
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        sum += integrate_interval(g, cuts[i], cuts[i + 1], spec);
    }
    return sum;
}

}  // namespace sticky::specfun
