#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

// Monte-Carlo construction of two-sided sticky Brownian motion by time change.
//
// A base Brownian motion W with running maximum S gives the reflected path
// R = S - W whose Skorohod local time is S. Stretching the clock by
// Gamma(s) = s + S_s / theta inserts literal zero-intervals of total length
// S / theta, and each excursion of R away from zero gets an independent sign.
// The driving motion is B_t = X_t + W0(A0_t) with W0 an independent Brownian
// motion run on the zero clock.
namespace sticky::pathsim {

// Stateless counter-based seed derivation (splitmix64 finalizer over the inputs).
std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index, std::uint64_t stream = 0);

struct BasePath {
    double step = 0.0;
    std::vector<double> values;       // W at grid nodes, values[0] = 0
    std::vector<double> running_max;  // S, including maxima inside each step
    std::vector<double> step_max;     // maximum of W over step i (entry 0 unused, = 0)
    std::uint64_t seed = 0;
};

/// Brownian path on a uniform grid with exact per-step maxima drawn from the
/// bridge law M = (w0 + w1 + sqrt((w1 - w0)^2 - 2 h ln U)) / 2.
BasePath sample_base(std::size_t n_steps, double step, std::uint64_t seed);

struct SPath {
    double theta = 0.0;
    std::vector<double> t_grid;
    std::vector<double> x;
    std::vector<double> b;
    std::vector<double> occ_zero;
    std::vector<double> occ_pos;
    std::vector<double> occ_neg;
    std::vector<double> local_time;  // l0(X) = theta * occ_zero

    std::size_t size() const { return t_grid.size(); }
};

struct BuildOptions {
    double grid_step = 0.0;     // spacing of t_grid; 0 uses the base step
    bool negate_signs = false;  // flips every excursion sign
};

/// Sticky path on t_grid = {0, d, 2d, ..., t_max}. theta may be +infinity, in
/// which case the clock is not stretched and X is the signed base path.
/// Throws InsufficientPathError when Gamma(end of base) does not exceed t_max.
SPath build_sticky(const BasePath& base, double theta, double t_max, std::uint64_t sign_seed,
                   std::uint64_t w0_seed, const BuildOptions& options = {});

struct JointSample {
    double x_T;
    double b_T;
    double a0_T;
    double T;
};

// State of one path at a single time, including the one-sided view.
struct Snapshot {
    double t;
    double x;
    double b;
    double a0;
    double apos;
    double aneg;
    double local_time;      // l0(X), the base running maximum
    double onesided_b;      // driving motion of |X|: |X| - theta A0 + (B - X)
    double onesided_level;  // onesided_b + running max of (-onesided_b) floored at 0
};

/// (X_T, B_T, A0_T, T) with T ~ Exp(lambda) independent of the path.
/// Sample k is seeded from (seed, k) only, so results do not depend on workers.
std::vector<JointSample> sample_at_exp(double theta, double lambda, std::size_t n, double step,
                                       std::uint64_t seed, unsigned workers = 0);

/// Snapshots of n independent paths at the fixed time t.
std::vector<Snapshot> sample_at_time(double theta, double t, std::size_t n, double step,
                                     std::uint64_t seed, unsigned workers = 0);

/// Snapshot of path k of the ensemble above at several increasing times.
std::vector<Snapshot> snapshot_path(double theta, const std::vector<double>& times, double step,
                                    std::uint64_t seed, std::size_t k);

enum class OccupationKind { zero, pos, neg };

/// Right-continuous inverse inf{u : A_u > t}, linear inside a grid cell.
/// Throws OutOfRangeError when t is not below the terminal occupation.
double occupation_inverse(const SPath& path, OccupationKind kind, double t);

/// |X| with its own driving motion; occ_pos gathers both signs, local time doubles.
SPath onesided_view(const SPath& path);

/// CSV with header t,x,b,a0,apos,aneg (path_id first when given); 17 significant digits.
void write_csv_header(std::ostream& out, bool with_path_id);
void write_csv_rows(std::ostream& out, const SPath& path, std::optional<std::size_t> path_id);

}  // namespace sticky::pathsim
