#include "sticky/invlap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "sticky/errors.hpp"
#include "sticky/laws.hpp"

namespace sticky::invlap {

namespace {

using cplx = std::complex<double>;
using specfun::QuadratureSpec;
using specfun::RealFunction;

constexpr double pi = std::numbers::pi;

double sgn(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

cplx checked(const Transform& transform, cplx lambda) {
    const cplx v = transform.complex(lambda);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
        throw InversionError("invert: transform is non-finite at lambda = (" +
                             std::to_string(lambda.real()) + ", " + std::to_string(lambda.imag()) +
                             ")");
    }
    return v;
}

// Fixed Talbot contour lambda(phi) = r phi (cot phi + i), r = 2M / (5t).
double talbot(const Transform& transform, double t, int nodes) {
    const double r = 2.0 * nodes / (5.0 * t);
    double sum = 0.5 * checked(transform, cplx(r, 0.0)).real() * std::exp(r * t);
    for (int k = 1; k < nodes; ++k) {
        const double phi = k * pi / nodes;
        const double cot = std::cos(phi) / std::sin(phi);
        const cplx lambda(r * phi * cot, r * phi);
        const double sigma = phi + (phi * cot - 1.0) * cot;
        sum += (std::exp(t * lambda) * checked(transform, lambda) * cplx(1.0, sigma)).real();
    }
    return r / nodes * sum;
}

const std::vector<Precise>& stehfest_weights(int order) {
    thread_local std::map<int, std::vector<Precise>> cache;
    auto it = cache.find(order);
    if (it != cache.end()) return it->second;
    const int half = order / 2;
    std::vector<Precise> factorial(2 * order + 1);
    factorial[0] = 1;
    for (int i = 1; i <= 2 * order; ++i) factorial[i] = factorial[i - 1] * i;
    std::vector<Precise> weights(order + 1);
    for (int k = 1; k <= order; ++k) {
        Precise sum = 0;
        for (int j = (k + 1) / 2; j <= std::min(k, half); ++j) {
            sum += boost::multiprecision::pow(Precise(j), half) * factorial[2 * j] /
                   (factorial[half - j] * factorial[j] * factorial[j - 1] * factorial[k - j] *
                    factorial[2 * j - k]);
        }
        weights[k] = (k + half) % 2 == 0 ? sum : Precise(-sum);
    }
    return cache.emplace(order, std::move(weights)).first->second;
}

double stehfest(const Transform& transform, double t, int order) {
    const auto& weights = stehfest_weights(order);
    const Precise step = boost::multiprecision::log(Precise(2)) / t;
    Precise sum = 0;
    for (int k = 1; k <= order; ++k) {
        const Precise value = transform.real(step * k);
        if (!boost::multiprecision::isfinite(value)) {
            throw InversionError("invert: transform is non-finite at lambda = " +
                                 std::to_string(static_cast<double>(step * k)));
        }
        sum += weights[k] * value;
    }
    return static_cast<double>(step * sum);
}

void require(bool ok, const char* message) {
    if (!ok) throw DomainError(message);
}

void check_time_theta(double t, double theta, const char* who) {
    if (!(std::isfinite(t) && t > 0.0)) throw DomainError(std::string(who) + ": t must be positive");
    if (!(std::isfinite(theta) && theta > 0.0)) {
        throw DomainError(std::string(who) + ": theta must be positive");
    }
}

template <class T>
struct Rates {
    T gamma;
    T delta;
};

// Principal branches; both real parts stay positive on the Talbot contour.
template <class T>
Rates<T> rates(const T& lambda, double theta) {
    using std::sqrt;
    const T gamma = sqrt(2.0 * lambda);
    return {gamma, sqrt(2.0 * lambda + 2.0 * theta * gamma)};
}

InvertedCdf clamp_cdf(double raw) { return {std::clamp(raw, 0.0, 1.0), raw}; }

double gaussian_density(double b, double t) {
    return std::exp(-b * b / (2.0 * t)) / std::sqrt(2.0 * pi * t);
}

// Helpers for kernels written in the scaled variable xi = 2 sqrt(tau) w.
double bessel_i1_over_z(double z) { return z == 0.0 ? 0.5 : specfun::bessel_i1(z) / z; }

double tail_integral(const RealFunction& g, double from, const QuadratureSpec& spec) {
    return specfun::integrate_interval(g, from, std::numeric_limits<double>::infinity(), spec);
}

}  // namespace

void InversionSpec::validate() const {
    require(talbot_nodes >= 16, "InversionSpec: talbot_nodes must be >= 16");
    require(stehfest_order % 2 == 0 && stehfest_order >= 8 && stehfest_order <= 40,
            "InversionSpec: stehfest_order must be even and within [8, 40]");
    require(target_rel_err > 0.0, "InversionSpec: target_rel_err must be positive");
}

double invert(const Transform& transform, double t, const InversionSpec& spec) {
    spec.validate();
    if (!(std::isfinite(t) && t > 0.0)) throw DomainError("invert: t must be positive");
    return spec.method == InversionMethod::talbot ? talbot(transform, t, spec.talbot_nodes)
                                                  : stehfest(transform, t, spec.stehfest_order);
}

CrossCheck cross_check(const Transform& transform, double t, const InversionSpec& spec) {
    InversionSpec talbot_spec = spec;
    talbot_spec.method = InversionMethod::talbot;
    InversionSpec stehfest_spec = spec;
    stehfest_spec.method = InversionMethod::stehfest;
    CrossCheck check{};
    check.talbot = invert(transform, t, talbot_spec);
    check.stehfest = invert(transform, t, stehfest_spec);
    const double scale = std::max(std::fabs(check.talbot), std::numeric_limits<double>::min());
    check.rel_diff = std::fabs(check.talbot - check.stehfest) / scale;
    check.agrees = check.rel_diff <= spec.target_rel_err;
    return check;
}

InvertedCdf marginal_cdf_t(double x, double t, double theta, const InversionSpec& spec) {
    check_time_theta(t, theta, "marginal_cdf_t");
    require(!std::isnan(x), "marginal_cdf_t: x is NaN");
    const Transform transform = make_transform([x, theta](auto lambda) {
        using T = decltype(lambda);
        using std::exp;
        const auto [gamma, delta] = rates(lambda, theta);
        const T scale = T(1.0) / (theta * gamma + lambda);
        // integral_{-inf}^{x} exp(-gamma |y|) dy
        T spread;
        if (std::isinf(x)) {
            spread = x > 0.0 ? T(2.0) / gamma : T(0.0);
        } else if (x < 0.0) {
            spread = exp(gamma * x) / gamma;
        } else {
            spread = (2.0 - exp(-gamma * x)) / gamma;
        }
        return T((x >= 0.0 ? scale : T(0.0)) + theta * scale * spread);
    });
    return clamp_cdf(invert(transform, t, spec));
}

InvertedCdf atom_mass_t(double t, double theta, const InversionSpec& spec) {
    check_time_theta(t, theta, "atom_mass_t");
    const Transform transform = make_transform([theta](auto lambda) {
        using T = decltype(lambda);
        const auto [gamma, delta] = rates(lambda, theta);
        return T(1.0 / (lambda + theta * gamma));
    });
    return clamp_cdf(invert(transform, t, spec));
}

double joint_cdf_density_t(double x, double b, double t, double theta, const InversionSpec& spec) {
    check_time_theta(t, theta, "joint_cdf_density_t");
    require(!std::isnan(x) && std::isfinite(b), "joint_cdf_density_t: invalid arguments");
    const Transform transform = make_transform([x, b, theta](auto lambda) {
        using T = decltype(lambda);
        using std::exp;
        const auto [gamma, delta] = rates(lambda, theta);
        const T atom = x >= 0.0 ? T(exp(-delta * std::fabs(b))) : T(0.0);
        const T spread = laws::detail::two_sided_exp_integral<T>(x, b, gamma, delta, T(0.0));
        return T((atom + theta * spread) / delta);
    });
    return invert(transform, t, spec);
}

InvertedCdf cond_cdf_t(double x, double b, double t, double theta, const InversionSpec& spec) {
    check_time_theta(t, theta, "cond_cdf_t");
    if (std::fabs(b) / std::sqrt(t) > conditioning_limit) {
        throw ConditioningError("cond_cdf_t: |b| / sqrt(t) exceeds the conditioning limit");
    }
    return clamp_cdf(joint_cdf_density_t(x, b, t, theta, spec) / gaussian_density(b, t));
}

namespace {

struct KernelSet {
    double x;
    double b;
    double theta;
    bool derived;

    double c() const { return std::fabs(b - x); }

    double f1(double tau) const {
        const QuadratureSpec spec{};
        const double dist = c();
        const double root_tau = std::sqrt(tau);
        const double k_rate = theta / std::numbers::sqrt2;
        const double drift = 2.0 * k_rate * root_tau;
        const double w_start = std::numbers::sqrt2 * dist / (2.0 * root_tau);
        const double lead = dist / std::sqrt(2.0 * pi * tau * tau * tau);
        if (!derived) {
            // Radicand as printed: xi/2 - |b - x|^2, with xi/2 = sqrt(tau) w; clamped at 0.
            const double bessel = tail_integral(
                [&](double w) {
                    const double radicand = std::max(0.0, root_tau * w - dist * dist);
                    return w * std::exp(-w * w - drift * w) *
                           specfun::bessel_i1(theta * std::sqrt(radicand));
                },
                w_start, spec);
            return lead * std::exp(-2.0 * dist * dist / (4.0 * tau) - theta * dist) +
                   2.0 * theta / std::sqrt(2.0 * pi * tau) * bessel;
        }
        if (dist == 0.0) return 0.0;
        const double bessel = tail_integral(
            [&](double w) {
                const double z = drift * std::sqrt(std::max(0.0, w * w - w_start * w_start));
                return w * std::exp(-w * w - drift * w) * bessel_i1_over_z(z);
            },
            w_start, spec);
        return lead * std::exp(-dist * dist / (2.0 * tau) - theta * dist) +
               2.0 * theta * dist * k_rate / std::sqrt(pi * tau) * bessel;
    }

    double f2(double tau) const {
        if (!derived) return std::exp(-x * x / (2.0 * tau)) / std::sqrt(pi * tau);
        return gaussian_density(x, tau);
    }

    double f3(double tau) const {
        const QuadratureSpec spec{};
        const double root_tau = std::sqrt(tau);
        const double drift = std::numbers::sqrt2 * theta * root_tau;
        if (!derived) {
            const double plain = tail_integral(
                [&](double w) { return w * std::exp(-w * w - drift * w); }, 0.0, spec);
            return std::sqrt(2.0 / (pi * tau)) * plain;
        }
        const double w_start = std::numbers::sqrt2 * c() / (2.0 * root_tau);
        const double bessel = tail_integral(
            [&](double w) {
                const double z = drift * std::sqrt(std::max(0.0, w * w - w_start * w_start));
                return w * std::exp(-w * w - drift * w) * specfun::bessel_i0(z);
            },
            w_start, spec);
        return std::sqrt(2.0 / (pi * tau)) * bessel;
    }

    double f4(double tau) const {
        const double lead = std::fabs(x) / std::sqrt(2.0 * pi * tau * tau * tau);
        if (!derived) return lead * std::exp(-std::numbers::sqrt2 * x * x / (4.0 * tau));
        return lead * std::exp(-x * x / (2.0 * tau));
    }

    Kernels at(double tau) const { return {f1(tau), f2(tau), f3(tau), f4(tau)}; }

    // sgn(b-x)/4 f1*f2 + sgn(x)/4 f3*f4 + 1{b<x}/2 * indicator_density
    double bracket(double t, double indicator_density, const QuadratureSpec& spec) const {
        // At b = x the derived f1 is a unit mass at 0; both one-sided limits give f2(t)/4.
        const bool atom = derived && c() == 0.0;
        const double side = atom ? 1.0 : sgn(b - x);
        const double zero_side = sgn(x);
        const double first =
            atom ? f2(t)
            : side == 0.0 ? 0.0
                        : convolve([this](double s) { return f1(s); },
                                   [this](double s) { return f2(s); }, t, spec);
        const double second =
            zero_side == 0.0 ? 0.0
                             : convolve([this](double s) { return f3(s); },
                                        [this](double s) { return f4(s); }, t, spec);
        const double below = b < x ? 1.0 : 0.0;
        return side / 4.0 * first + zero_side / 4.0 * second + below / 2.0 * indicator_density;
    }
};

}  // namespace

Kernels corollary_kernels(double x, double b, double t, double theta) {
    check_time_theta(t, theta, "corollary_kernels");
    return KernelSet{x, b, theta, false}.at(t);
}

Kernels derived_kernels(double x, double b, double t, double theta) {
    check_time_theta(t, theta, "derived_kernels");
    return KernelSet{x, b, theta, true}.at(t);
}

double convolve(const RealFunction& f, const RealFunction& g, double t, const QuadratureSpec& spec) {
    if (!(std::isfinite(t) && t > 0.0)) throw DomainError("convolve: t must be positive");
    const double edge = std::sqrt(0.5 * t);
    const double head = specfun::integrate_interval(
        [&](double u) { return 2.0 * u * f(u * u) * g(t - u * u); }, 0.0, edge, spec);
    const double tail = specfun::integrate_interval(
        [&](double u) { return 2.0 * u * f(t - u * u) * g(u * u); }, 0.0, edge, spec);
    return head + tail;
}

CorollaryCheck corollary_crosscheck(double x, double b, double t, double theta,
                                    const InversionSpec& inversion,
                                    const QuadratureSpec& quadrature) {
    check_time_theta(t, theta, "corollary_crosscheck");
    CorollaryCheck out{};
    out.x = x;
    out.b = b;
    out.t = t;
    out.theta = theta;
    out.inversion = cond_cdf_t(x, b, t, theta, inversion).value;

    const KernelSet printed{x, b, theta, false};
    out.printed = std::sqrt(2.0 * pi * t) * std::exp(b * b / (2.0 * t)) *
                  printed.bracket(t, printed.f2(t), quadrature);

    // The indicator term inverts exp(-gamma|b|)/gamma, i.e. the density of B_t at b.
    const KernelSet derived{x, b, theta, true};
    const double density = gaussian_density(b, t);
    out.derived = 2.0 * derived.bracket(t, density, quadrature) / density;

    out.printed_diff = out.printed - out.inversion;
    out.derived_diff = out.derived - out.inversion;
    return out;
}

}  // namespace sticky::invlap
