#pragma once

#include <complex>
#include <functional>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "sticky/specfun.hpp"

// Fixed-time laws of sticky Brownian motion by numerical Laplace inversion.
namespace sticky::invlap {

enum class InversionMethod { talbot, stehfest };

// Real arithmetic for the Stehfest sum, whose alternating weights grow like 10^(N/2).
using Precise = boost::multiprecision::cpp_bin_float_50;

struct InversionSpec {
    InversionMethod method = InversionMethod::talbot;
    int talbot_nodes = 32;
    int stehfest_order = 32;
    // Agreement threshold used by cross_check between the two inverters.
    double target_rel_err = 1e-6;
    void validate() const;
};

/// A Laplace transform F(lambda) in two evaluations: complex double on the
/// Talbot contour, and 50-digit real on the Stehfest abscissae.
struct Transform {
    std::function<std::complex<double>(std::complex<double>)> complex;
    std::function<Precise(const Precise&)> real;
};

/// Builds both evaluations from one generic callable; the body should call
/// exp/sqrt unqualified after `using std::exp; using std::sqrt;`.
template <class F>
Transform make_transform(F f) {
    return {[f](std::complex<double> s) { return std::complex<double>(f(s)); },
            [f](const Precise& s) { return Precise(f(s)); }};
}

/// f(t) from its Laplace transform, analytic off the negative real axis.
double invert(const Transform& transform, double t, const InversionSpec& spec = {});

struct CrossCheck {
    double talbot;
    double stehfest;
    double rel_diff;
    bool agrees;  // rel_diff <= target_rel_err
};

CrossCheck cross_check(const Transform& transform, double t, const InversionSpec& spec = {});

// A CDF value clamped to [0, 1]; `unclamped` keeps the raw inversion output.
struct InvertedCdf {
    double value;
    double unclamped;

    double clamp_residual() const { return unclamped - value; }
};

/// P{X_t <= x}.
InvertedCdf marginal_cdf_t(double x, double t, double theta, const InversionSpec& spec = {});

/// P{X_t = 0}.
InvertedCdf atom_mass_t(double t, double theta, const InversionSpec& spec = {});

/// P{X_t <= x, B_t in db} / db.
double joint_cdf_density_t(double x, double b, double t, double theta,
                           const InversionSpec& spec = {});

/// P{X_t <= x | B_t = b}. Throws ConditioningError when |b| / sqrt(t) exceeds
/// conditioning_limit, where the Gaussian density of B_t is too small to divide by.
InvertedCdf cond_cdf_t(double x, double b, double t, double theta, const InversionSpec& spec = {});

inline constexpr double conditioning_limit = 6.0;

struct Kernels {
    double f1;
    double f2;
    double f3;
    double f4;
};

/// The four convolution kernels exactly as printed (Bessel radicand clamped at 0).
Kernels corollary_kernels(double x, double b, double t, double theta);

/// Inverse transforms of exp(-delta c), exp(-gamma|x|)/gamma, exp(-delta c)/delta
/// and exp(-gamma|x|) with c = |b - x|, derived by subordination in sqrt(lambda).
Kernels derived_kernels(double x, double b, double t, double theta);

struct CorollaryCheck {
    double x;
    double b;
    double t;
    double theta;
    double printed;    // printed kernels assembled by the printed formula
    double derived;    // derived kernels with the normalizing factor two
    double inversion;  // cond_cdf_t, the trusted route
    double printed_diff;
    double derived_diff;
};

/// Evaluates the printed conditional formula and a derived correction next to
/// cond_cdf_t. Reports differences; never asserts agreement.
CorollaryCheck corollary_crosscheck(double x, double b, double t, double theta,
                                    const InversionSpec& inversion = {},
                                    const specfun::QuadratureSpec& quadrature = {});

/// integral_0^t f(s) g(t - s) ds, robust to s^(-1/2) singularities at both ends.
double convolve(const specfun::RealFunction& f, const specfun::RealFunction& g, double t,
                const specfun::QuadratureSpec& spec = {});

}  // namespace sticky::invlap
