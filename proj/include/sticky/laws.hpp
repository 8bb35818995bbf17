#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <string>

#include "sticky/specfun.hpp"

// Closed-form laws of two-sided sticky Brownian motion started at (X_0, B_0) = (0, 0).
namespace sticky::laws {

// The printed variant reproduces the published expressions verbatim; the
// normalized variant is rebuilt from the resolvent of X and the Laplace law
// of the zero-clock Brownian motion, and is the one that integrates to one.
enum class Variant { printed, normalized };

struct ResolventParams {
    double theta;   // stickiness
    double lambda;  // transform rate
    double gamma;   // sqrt(2 lambda)
    double delta;   // sqrt(2 lambda + 2 theta gamma)
};

ResolventParams make_params(double theta, double lambda);

// Atom at the sticky point plus an absolutely continuous part.
struct MixedLaw {
    double atom_mass = 0.0;
    std::function<double(double)> density;
    std::string support_note;
};

/// Resolvent kernel p_lambda(0, dy) of X; total mass 1/lambda.
MixedLaw resolvent_measure(const ResolventParams& p);

/// Density of (X_T, B_T) on {X_T != 0} at an independent Exp(lambda) time T.
double joint_density(double y, double b, const ResolventParams& p, Variant v);

/// Density in b of B_T on the event {X_T = 0}.
double joint_atom_density(double b, const ResolventParams& p, Variant v);

/// Resolvent density of Brownian motion killed at 0.
double killed_resolvent(double x, double y, double lambda);

using JointFunction = std::function<double(double, double)>;

/// (1/lambda) E^{(x,a)} f(X_T, B_T): killed motion until X first hits zero,
/// then the zero-start joint law shifted by a - x and discounted by exp(-gamma |x|).
double joint_resolvent_apply(const JointFunction& f, double x, double a, const ResolventParams& p,
                             const specfun::QuadratureSpec& spec, Variant v);

/// P{X_T <= x | B_T = b}. Normalized: closed form, right-continuous in x.
double cond_cdf_exp(double x, double b, const ResolventParams& p, Variant v);

/// P{X_t <= x | F_t} for one-sided sticky BM given the reflected level B_t + L_t.
double warren_cdf(double reflected_level, double x, double theta);

/// P{A^0 > t} over [0, horizon].
double occ_zero_tail(double t, double theta, double horizon = 1.0);

/// One-sided P{A^+_s < t}.
double occ_pos_cdf_onesided(double s, double t, double theta);

/// P{A^+_1 > t}. Normalized uses |Z| in the Gaussian expectation; printed uses Z.
double occ_pos_tail(double t, double theta, const specfun::QuadratureSpec& spec = {},
                    Variant v = Variant::normalized);

/// Laplace density of B_T, (gamma/2) exp(-gamma |b|).
double marginal_bt_density(double b, const ResolventParams& p);

/// Arcsine tail 1 - (2/pi) asin(sqrt(t)).
double arcsine_tail(double t);

namespace detail {

// integral_u^v exp(alpha y + beta) dy; u may be -inf, v may be +inf (Re alpha of matching sign).
template <class T>
T exp_piece(T alpha, T beta, double u, double v) {
    using std::exp;
    const T upper = std::isinf(v) ? T(0) : exp(alpha * v + beta);
    const T lower = std::isinf(u) ? T(0) : exp(alpha * u + beta);
    return (upper - lower) / alpha;
}

// exp(shift) * integral_{-inf}^{x} exp(-gamma |y| - delta |b - y|) dy, piecewise exact.
// Works for real and complex (gamma, delta) with positive real parts.
template <class T>
T two_sided_exp_integral(double x, double b, T gamma, T delta, T shift) {
    const double lo = std::fmin(0.0, b);
    const double hi = std::fmax(0.0, b);
    const double inf = std::numeric_limits<double>::infinity();
    T sum(0);
    // y < min(0, b)
    sum += exp_piece<T>(gamma + delta, -delta * b + shift, -inf, std::fmin(x, lo));
    if (x <= lo) return sum;
    // between 0 and b
    if (hi > lo) {
        const double top = std::fmin(x, hi);
        if (b > 0.0) {
            sum += exp_piece<T>(delta - gamma, -delta * b + shift, lo, top);
        } else {
            sum += exp_piece<T>(gamma - delta, delta * b + shift, lo, top);
        }
    }
    if (x <= hi) return sum;
    // y > max(0, b)
    sum += exp_piece<T>(-(gamma + delta), delta * b + shift, hi, x);
    return sum;
}

}  // namespace detail

}  // namespace sticky::laws
