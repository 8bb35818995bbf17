#pragma once

#include <functional>
#include <span>
#include <vector>

namespace sticky::specfun {

enum class QuadratureMethod { adaptive_interval, gauss_hermite };

struct QuadratureSpec {
    QuadratureMethod method = QuadratureMethod::adaptive_interval;
    int max_subdivisions = 400;
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    int node_count = 64;  // Gauss-Hermite only

    // Throws DomainError when a field violates its invariant.
    void validate() const;
};

using RealFunction = std::function<double(double)>;

/// Complementary error function (2/sqrt(pi)) * integral_z^inf exp(-s^2) ds.
///
/// Extended-precision positive-term series below |z| = 3, Lentz continued
/// fraction above. Relative error stays below 1e-12 for |z| <= 26.
double erfc(double z);

/// Modified Bessel function of the first kind, order 0.
double bessel_i0(double z);

/// Modified Bessel function of the first kind, order 1.
double bessel_i1(double z);

/// Standard normal CDF and density.
double normal_cdf(double z);
double normal_pdf(double z);

/// E[g(Z)] for a standard Gaussian Z.
///
/// Adaptive mode integrates g * phi over a symmetric window no smaller than
/// (-8, 8), split at zero so that kinks of g(|z|)-type integrands sit on a
/// panel boundary. Gauss-Hermite mode uses `node_count` nodes.
double gauss_expectation(const RealFunction& g, const QuadratureSpec& spec = {});

/// Integral of g over [a, b]; either endpoint may be infinite.
///
/// Infinite ends are truncated at a bound located by doubling the span until
/// one 15-point panel beyond it contributes less than abs_tol / 10.
double integrate_interval(const RealFunction& g, double a, double b,
                          const QuadratureSpec& spec = {});

/// Same as integrate_interval, but splits the range at the given interior
/// breakpoints (kinks, integrable singularities) before integrating.
double integrate_piecewise(const RealFunction& g, double a, double b,
                           std::span<const double> breakpoints,
                           const QuadratureSpec& spec = {});

/// Gauss-Hermite nodes and weights for the weight exp(-x^2) (Golub-Welsch).
struct HermiteRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
HermiteRule gauss_hermite_rule(int n);

}  // namespace sticky::specfun
