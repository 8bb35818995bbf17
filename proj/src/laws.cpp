#include "sticky/laws.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "sticky/errors.hpp"

namespace sticky::laws {

namespace {

using specfun::QuadratureSpec;

double sgn(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

void require(bool ok, const char* message) {
    if (!ok) throw DomainError(message);
}

// Probability-scaled joint law: density of (X_T, B_T) and the atom line, both
// with B shifted by the starting value a.
double scaled_density(double y, double b, const ResolventParams& p, Variant v) {
    const double coeff = p.theta * p.lambda / p.delta;
    const double base = coeff * std::exp(-p.gamma * std::fabs(y) - p.delta * std::fabs(b - y));
    return v == Variant::printed ? 0.5 * base : base;
}

double scaled_atom(double b, const ResolventParams& p, Variant v) {
    const double base = p.lambda / p.delta * std::exp(-p.delta * std::fabs(b));
    return v == Variant::printed ? 0.5 * base : base;
}

// (1/lambda) E^{(0,a)} f(X_T, B_T)
double zero_start_apply(const JointFunction& f, double a, const ResolventParams& p,
                        const QuadratureSpec& spec, Variant v) {
    const double inf = std::numeric_limits<double>::infinity();
    const std::array<double, 1> at_a{a};
    const auto inner = [&](double b) {
        const std::array<double, 2> kinks{0.0, b - a};
        const auto g = [&](double y) { return scaled_density(y, b - a, p, v) * f(y, b); };
        return specfun::integrate_piecewise(g, -inf, inf, kinks, spec);
    };
    const auto atom = [&](double b) { return scaled_atom(b - a, p, v) * f(0.0, b); };
    const double moving = specfun::integrate_piecewise(inner, -inf, inf, at_a, spec);
    const double stuck = specfun::integrate_piecewise(atom, -inf, inf, at_a, spec);
    return (moving + stuck) / p.lambda;
}

}  // namespace

ResolventParams make_params(double theta, double lambda) {
    require(std::isfinite(theta) && theta > 0.0, "make_params: theta must be positive and finite");
    require(std::isfinite(lambda) && lambda > 0.0, "make_params: lambda must be positive and finite");
    const double gamma = std::sqrt(2.0 * lambda);
    const double delta = std::sqrt(2.0 * lambda + 2.0 * theta * gamma);
    return {theta, lambda, gamma, delta};
}

MixedLaw resolvent_measure(const ResolventParams& p) {
    const double scale = 1.0 / (p.theta * p.gamma + p.lambda);
    MixedLaw law;
    law.atom_mass = scale;
    law.density = [coeff = p.theta * scale, gamma = p.gamma](double y) {
        return coeff * std::exp(-gamma * std::fabs(y));
    };
    law.support_note = "resolvent of X from 0: atom at 0 plus density on R\\{0}; total mass 1/lambda";
    return law;
}

double joint_density(double y, double b, const ResolventParams& p, Variant v) {
    return scaled_density(y, b, p, v);
}

double joint_atom_density(double b, const ResolventParams& p, Variant v) {
    return scaled_atom(b, p, v);
}

double killed_resolvent(double x, double y, double lambda) {
    require(std::isfinite(lambda) && lambda > 0.0, "killed_resolvent: lambda must be positive");
    if (x * y <= 0.0) return 0.0;
    const double gamma = std::sqrt(2.0 * lambda);
    const double value =
        (std::exp(-gamma * std::fabs(y - x)) - std::exp(-gamma * std::fabs(y + x))) / gamma;
    return std::max(value, 0.0);
}

double joint_resolvent_apply(const JointFunction& f, double x, double a, const ResolventParams& p,
                             const QuadratureSpec& spec, Variant v) {
    require(std::isfinite(x) && std::isfinite(a), "joint_resolvent_apply: start must be finite");
    if (x == 0.0) return zero_start_apply(f, a, p, spec, v);

    // Before hitting zero X moves in lockstep with B, so B - X stays at a - x.
    const double inf = std::numeric_limits<double>::infinity();
    const auto killed = [&](double y) {
        return killed_resolvent(x, y, p.lambda) * f(y, a + y - x);
    };
    const std::array<double, 1> at_x{x};
    const double before_zero = x > 0.0
                                   ? specfun::integrate_piecewise(killed, 0.0, inf, at_x, spec)
                                   : specfun::integrate_piecewise(killed, -inf, 0.0, at_x, spec);
    const double hit_discount = std::exp(-p.gamma * std::fabs(x));
    return before_zero + hit_discount * zero_start_apply(f, a - x, p, spec, v);
}

double cond_cdf_exp(double x, double b, const ResolventParams& p, Variant v) {
    require(!std::isnan(x) && std::isfinite(b), "cond_cdf_exp: invalid arguments");
    if (v == Variant::printed) {
        const double s = sgn(x);
        const double exponent =
            -p.delta * std::fabs(b - x) + p.gamma * (std::fabs(b) - s * x);
        const double indicator = b < x ? 1.0 : 0.0;
        if (std::isinf(x)) return 0.5 * indicator;
        return (sgn(b - x) / 4.0 + s * p.gamma / (4.0 * p.delta)) * std::exp(exponent) +
               indicator / 2.0;
    }
    // Divide through by the B_T density (gamma/2) exp(-gamma|b|): shift exponents by gamma|b|.
    const double shift = p.gamma * std::fabs(b);
    const double atom = x >= 0.0 ? std::exp(shift - p.delta * std::fabs(b)) : 0.0;
    const double spread = detail::two_sided_exp_integral<double>(x, b, p.gamma, p.delta, shift);
    const double value = (p.lambda / p.delta) * (atom + p.theta * spread) / (p.gamma / 2.0);
    return std::clamp(value, 0.0, 1.0);
}

double warren_cdf(double reflected_level, double x, double theta) {
    require(std::isfinite(reflected_level) && reflected_level >= 0.0,
            "warren_cdf: reflected level must be nonnegative");
    require(theta > 0.0, "warren_cdf: theta must be positive");
    require(!std::isnan(x), "warren_cdf: x is NaN");
    if (x < 0.0) return 0.0;
    if (x >= reflected_level) return 1.0;
    return std::exp(-2.0 * theta * (reflected_level - x));
}

double occ_zero_tail(double t, double theta, double horizon) {
    require(theta > 0.0 && std::isfinite(horizon) && horizon > 0.0,
            "occ_zero_tail: theta and horizon must be positive");
    require(t >= 0.0 && t < horizon, "occ_zero_tail: require 0 <= t < horizon");
    return specfun::erfc(theta * t / std::sqrt(2.0 * (horizon - t)));
}

double occ_pos_cdf_onesided(double s, double t, double theta) {
    require(theta > 0.0, "occ_pos_cdf_onesided: theta must be positive");
    require(t > 0.0 && t <= s && std::isfinite(s), "occ_pos_cdf_onesided: require 0 < t <= s");
    return specfun::erfc(theta * (s - t) / std::sqrt(2.0 * t));
}

double occ_pos_tail(double t, double theta, const QuadratureSpec& spec, Variant v) {
    require(theta > 0.0 && std::isfinite(theta), "occ_pos_tail: theta must be positive");
    require(t > 0.0 && t < 1.0, "occ_pos_tail: require 0 < t < 1");
    const double c = theta * theta * (1.0 - t);
    const double scale = theta * std::sqrt(2.0 * t);
    // Positive root of t - 1 + (2/theta) s + s^2 / z^2, written without cancellation.
    const auto g = [=](double z) {
        const double az = std::fabs(z);
        double root;
        if (v == Variant::normalized || z >= 0.0) {
            root = az * c / (std::sqrt(z * z + c) + az);
        } else {
            root = -az * (az + std::sqrt(z * z + c));
        }
        return specfun::erfc(root / scale);
    };
    return 1.0 - specfun::gauss_expectation(g, spec);
}

double marginal_bt_density(double b, const ResolventParams& p) {
    return 0.5 * p.gamma * std::exp(-p.gamma * std::fabs(b));
}

double arcsine_tail(double t) {
    require(t >= 0.0 && t <= 1.0, "arcsine_tail: require 0 <= t <= 1");
    return 1.0 - 2.0 / std::numbers::pi * std::asin(std::sqrt(t));
}

}  // namespace sticky::laws
