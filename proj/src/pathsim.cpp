#include "sticky/pathsim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <random>

#include "sticky/errors.hpp"
#include "sticky/parallel.hpp"

namespace sticky::pathsim {

namespace {

enum Stream : std::uint64_t { base_stream = 0, sign_stream, w0_stream, fill_stream, clock_stream };

struct BaseStep {
    double w;    // W at the end of the step
    double max;  // maximum of W over the step
};

// Live Brownian increments with bridge maxima.
class BrownianStepper {
public:
    BrownianStepper(double step, std::uint64_t seed) : step_(step), rng_(seed), normal_(0.0, std::sqrt(step)) {}

    bool next(BaseStep& out) {
        const double w1 = w_ + normal_(rng_);
        const double u = 1.0 - uniform_(rng_);
        const double dw = w1 - w_;
        out.max = 0.5 * (w_ + w1 + std::sqrt(dw * dw - 2.0 * step_ * std::log(u)));
        out.w = w1;
        w_ = w1;
        return true;
    }

private:
    double step_;
    double w_ = 0.0;
    std::mt19937_64 rng_;
    std::normal_distribution<double> normal_;
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

// Replays a stored base path.
class StoredSource {
public:
    explicit StoredSource(const BasePath& base) : base_(base) {}

    bool next(BaseStep& out) {
        if (index_ + 1 >= base_.values.size()) return false;
        ++index_;
        out.w = base_.values[index_];
        out.max = base_.step_max[index_];
        return true;
    }

private:
    const BasePath& base_;
    std::size_t index_ = 0;
};

struct Seeds {
    std::uint64_t sign;
    std::uint64_t w0;
    std::uint64_t fill;
};

struct State {
    double t = 0.0;
    double a0 = 0.0;
    double apos = 0.0;
    double aneg = 0.0;
    double w = 0.0;      // base W
    double s = 0.0;      // running max of W = local time l0(X)
    double w0 = 0.0;     // W0 at the current zero-clock A0
    double bhat_min = 0.0;
    int sign = 1;
};

// One base step laid out on the sticky clock: moving part, zero part, moving part.
// Without a touch of the running maximum only the first part is used.
struct Layout {
    bool touch = false;
    double half = 0.0;      // duration of each moving part around a touch
    double moving = 0.0;    // duration of the single moving part (no touch)
    double zero = 0.0;      // zero-interval duration dS / theta
    double r0 = 0.0;        // |X| at the step start
    double r1 = 0.0;        // |X| at the step end
    double new_s = 0.0;
    double w1 = 0.0;
    double step_max = 0.0;
    int new_sign = 1;
    double w0_after = 0.0;
    double w0_bridge_min = 0.0;  // minimum of W0 - w0_before over the zero part
    // Last bridge value sampled inside the zero part, for sequential queries.
    double fill_frac = 0.0;
    double fill_value = 0.0;

    double duration() const { return touch ? 2.0 * half + zero : moving; }
};

template <class Source>
class StickyWalker {
public:
    StickyWalker(Source& source, double theta, double step, const Seeds& seeds, bool negate)
        : source_(source),
          inv_theta_(std::isinf(theta) ? 0.0 : 1.0 / theta),
          step_(step),
          sign_rng_(seeds.sign),
          w0_rng_(seeds.w0),
          fill_rng_(seeds.fill),
          negate_(negate) {
        state_.sign = draw_sign();
    }

    // Snapshot at time tau >= the previous query.
    Snapshot at(double tau) {
        for (;;) {
            if (!pending_) plan();
            if (tau < state_.t + layout_.duration()) break;
            commit();
        }
        return evaluate(tau - state_.t);
    }

private:
    int draw_sign() {
        const int s = (sign_rng_() & 1u) ? 1 : -1;
        return negate_ ? -s : s;
    }

    void plan() {
        BaseStep step{};
        if (!source_.next(step)) {
            throw InsufficientPathError("build_sticky: base path too short for the horizon");
        }
        Layout l{};
        l.w1 = step.w;
        l.step_max = step.max;
        l.r0 = state_.s - state_.w;
        l.new_s = std::max(state_.s, step.max);
        l.r1 = l.new_s - step.w;
        l.new_sign = state_.sign;
        l.w0_after = state_.w0;
        if (step.max > state_.s) {
            l.touch = true;
            l.half = 0.5 * step_;
            l.zero = (l.new_s - state_.s) * inv_theta_;
            l.new_sign = draw_sign();
            const double dw0 = std::sqrt(l.zero) * normal_(w0_rng_);
            const double u = 1.0 - uniform_(w0_rng_);
            l.w0_after = state_.w0 + dw0;
            l.w0_bridge_min = 0.5 * (dw0 - std::sqrt(dw0 * dw0 - 2.0 * l.zero * std::log(u)));
        } else {
            l.moving = step_;
        }
        layout_ = l;
        pending_ = true;
    }

    void commit() {
        const Layout& l = layout_;
        double step_min;
        if (l.touch) {
            add_moving(state_, state_.sign, l.half);
            add_moving(state_, l.new_sign, l.half);
            state_.a0 += l.zero;
            step_min = -l.step_max + state_.w0 + std::min(0.0, l.w0_bridge_min);
        } else {
            add_moving(state_, state_.sign, l.moving);
            step_min = -l.step_max + state_.w0;
        }
        state_.bhat_min = std::min(state_.bhat_min, step_min);
        state_.t += l.duration();
        state_.w = l.w1;
        state_.s = l.new_s;
        state_.sign = l.new_sign;
        state_.w0 = l.w0_after;
        pending_ = false;
    }

    static void add_moving(State& s, int sign, double duration) {
        if (sign > 0) {
            s.apos += duration;
        } else {
            s.aneg += duration;
        }
    }

    Snapshot evaluate(double offset) {
        Layout& l = layout_;
        State s = state_;
        double x = 0.0;
        double local = state_.s;  // theta * A0 at the query time
        if (!l.touch) {
            const double f = offset / l.moving;
            x = s.sign * (l.r0 + f * (l.r1 - l.r0));
            add_moving(s, s.sign, offset);
        } else if (offset < l.half) {
            const double f = offset / l.half;
            x = s.sign * (1.0 - f) * l.r0;
            add_moving(s, s.sign, offset);
        } else if (offset < l.half + l.zero) {
            const double f = (offset - l.half) / l.zero;
            add_moving(s, s.sign, l.half);
            s.a0 += offset - l.half;
            local = state_.s + f * (l.new_s - state_.s);
            s.w0 = bridge(f);
        } else {
            const double rest = offset - l.half - l.zero;
            const double f = rest / l.half;
            x = l.new_sign * f * l.r1;
            add_moving(s, s.sign, l.half);
            add_moving(s, l.new_sign, rest);
            s.a0 += l.zero;
            local = l.new_s;
            s.w0 = l.w0_after;
            s.bhat_min = std::min(s.bhat_min, -l.step_max + state_.w0 + std::min(0.0, l.w0_bridge_min));
        }
        Snapshot snap{};
        snap.t = state_.t + offset;
        snap.x = x;
        snap.b = x + s.w0;
        snap.a0 = s.a0;
        snap.apos = s.apos;
        snap.aneg = s.aneg;
    snap.local_time = local;
        snap.onesided_b = std::fabs(x) - local + s.w0;
        const double running_min = std::min(s.bhat_min, snap.onesided_b);
        snap.onesided_level = snap.onesided_b + std::max(0.0, -running_min);
        return snap;
    }

    // W0 inside the zero part at fraction f, conditioned on the previous fill and the endpoint.
    double bridge(double f) {
        Layout& l = layout_;
        if (f <= l.fill_frac) return l.fill_frac == 0.0 ? state_.w0 : l.fill_value;
        const double prev_f = l.fill_frac;
        const double prev_v = prev_f == 0.0 ? state_.w0 : l.fill_value;
        const double span = 1.0 - prev_f;
        const double mean = prev_v + (f - prev_f) / span * (l.w0_after - prev_v);
        const double var = l.zero * (f - prev_f) * (1.0 - f) / span;
        const double v = mean + std::sqrt(std::max(0.0, var)) * normal_(fill_rng_);
        l.fill_frac = f;
        l.fill_value = v;
        return v;
    }

    Source& source_;
    double inv_theta_;
    double step_;
    std::mt19937_64 sign_rng_;
    std::mt19937_64 w0_rng_;
    std::mt19937_64 fill_rng_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
    bool negate_;
    State state_{};
    Layout layout_{};
    bool pending_ = false;
};

void require(bool ok, const char* message) {
    if (!ok) throw DomainError(message);
}

void check_theta(double theta) {
    require(!std::isnan(theta) && theta > 0.0, "pathsim: theta must be positive (or +inf)");
}

Seeds sample_seeds(std::uint64_t seed, std::size_t k) {
    return {mix_seed(seed, k, sign_stream), mix_seed(seed, k, w0_stream),
            mix_seed(seed, k, fill_stream)};
}

std::vector<double> uniform_grid(double t_max, double spacing) {
    const auto cells = static_cast<std::size_t>(std::ceil(t_max / spacing - 1e-9));
    std::vector<double> grid(cells + 1);
    for (std::size_t i = 0; i < cells; ++i) grid[i] = static_cast<double>(i) * spacing;
    grid[cells] = t_max;
    return grid;
}

void put(std::ostream& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf;
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index, std::uint64_t stream) {
    const auto finalize = [](std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    std::uint64_t h = finalize(master + 0x9e3779b97f4a7c15ULL);
    h = finalize(h ^ (index + 0x9e3779b97f4a7c15ULL * 2));
    h = finalize(h ^ (stream + 0x9e3779b97f4a7c15ULL * 3));
    return h;
}

BasePath sample_base(std::size_t n_steps, double step, std::uint64_t seed) {
    require(n_steps >= 1, "sample_base: need at least one step");
    require(std::isfinite(step) && step > 0.0, "sample_base: step must be positive");
    BasePath path;
    path.step = step;
    path.seed = seed;
    path.values.resize(n_steps + 1);
    path.running_max.resize(n_steps + 1);
    path.step_max.resize(n_steps + 1);
    path.values[0] = path.running_max[0] = path.step_max[0] = 0.0;
    BrownianStepper stepper(step, seed);
    BaseStep s{};
    for (std::size_t i = 1; i <= n_steps; ++i) {
        stepper.next(s);
        path.values[i] = s.w;
        path.step_max[i] = s.max;
        path.running_max[i] = std::max(path.running_max[i - 1], s.max);
    }
    return path;
}

SPath build_sticky(const BasePath& base, double theta, double t_max, std::uint64_t sign_seed,
                   std::uint64_t w0_seed, const BuildOptions& options) {
    check_theta(theta);
    require(std::isfinite(t_max) && t_max > 0.0, "build_sticky: t_max must be positive");
    require(base.values.size() >= 2 && base.step > 0.0, "build_sticky: empty base path");
    const double spacing = options.grid_step > 0.0 ? options.grid_step : base.step;

    StoredSource source(base);
    const Seeds seeds{sign_seed, w0_seed, mix_seed(w0_seed, 0, fill_stream)};
    StickyWalker<StoredSource> walker(source, theta, base.step, seeds, options.negate_signs);

    SPath path;
    path.theta = theta;
    path.t_grid = uniform_grid(t_max, spacing);
    const std::size_t n = path.t_grid.size();
    for (auto* v : {&path.x, &path.b, &path.occ_zero, &path.occ_pos, &path.occ_neg, &path.local_time}) {
        v->resize(n);
    }
    for (std::size_t i = 0; i < n; ++i) {
        const Snapshot s = walker.at(path.t_grid[i]);
        path.x[i] = s.x;
        path.b[i] = s.b;
        path.occ_zero[i] = s.a0;
        path.occ_pos[i] = s.apos;
        path.occ_neg[i] = s.aneg;
        path.local_time[i] = s.local_time;
    }
    return path;
}

std::vector<JointSample> sample_at_exp(double theta, double lambda, std::size_t n, double step,
                                       std::uint64_t seed, unsigned workers) {
    check_theta(theta);
    require(std::isfinite(lambda) && lambda > 0.0, "sample_at_exp: lambda must be positive");
    require(n >= 1, "sample_at_exp: need at least one sample");
    require(std::isfinite(step) && step > 0.0, "sample_at_exp: step must be positive");
    std::vector<JointSample> out(n);
    parallel_for(n, workers, [&](std::size_t k) {
        std::mt19937_64 clock(mix_seed(seed, k, clock_stream));
        const double T = std::exponential_distribution<double>(lambda)(clock);
        BrownianStepper stepper(step, mix_seed(seed, k, base_stream));
        StickyWalker<BrownianStepper> walker(stepper, theta, step, sample_seeds(seed, k), false);
        const Snapshot s = walker.at(T);
        out[k] = {s.x, s.b, s.a0, T};
    });
    return out;
}

std::vector<Snapshot> snapshot_path(double theta, const std::vector<double>& times, double step,
                                    std::uint64_t seed, std::size_t k) {
    check_theta(theta);
    require(std::isfinite(step) && step > 0.0, "snapshot_path: step must be positive");
    require(std::is_sorted(times.begin(), times.end()), "snapshot_path: times must increase");
    BrownianStepper stepper(step, mix_seed(seed, k, base_stream));
    StickyWalker<BrownianStepper> walker(stepper, theta, step, sample_seeds(seed, k), false);
    std::vector<Snapshot> out;
    out.reserve(times.size());
    for (double t : times) {
        require(t >= 0.0, "snapshot_path: times must be nonnegative");
        out.push_back(walker.at(t));
    }
    return out;
}

std::vector<Snapshot> sample_at_time(double theta, double t, std::size_t n, double step,
                                     std::uint64_t seed, unsigned workers) {
    require(std::isfinite(t) && t > 0.0, "sample_at_time: t must be positive");
    require(n >= 1, "sample_at_time: need at least one sample");
    std::vector<Snapshot> out(n);
    const std::vector<double> times{t};
    parallel_for(n, workers, [&](std::size_t k) { out[k] = snapshot_path(theta, times, step, seed, k)[0]; });
    return out;
}

double occupation_inverse(const SPath& path, OccupationKind kind, double t) {
    const std::vector<double>& occ = kind == OccupationKind::zero  ? path.occ_zero
                                     : kind == OccupationKind::pos ? path.occ_pos
                                                                   : path.occ_neg;
    require(!occ.empty(), "occupation_inverse: empty path");
    require(!std::isnan(t) && t >= 0.0, "occupation_inverse: t must be nonnegative");
    if (!(t < occ.back())) {
        throw OutOfRangeError("occupation_inverse: t beyond the terminal occupation");
    }
    const auto it = std::upper_bound(occ.begin(), occ.end(), t);
    const auto i = static_cast<std::size_t>(it - occ.begin());
    const double lo = occ[i - 1];
    const double frac = (t - lo) / (occ[i] - lo);
    return path.t_grid[i - 1] + frac * (path.t_grid[i] - path.t_grid[i - 1]);
}

SPath onesided_view(const SPath& path) {
    SPath view = path;
    for (std::size_t i = 0; i < path.size(); ++i) {
        const double ax = std::fabs(path.x[i]);
        view.x[i] = ax;
        view.b[i] = ax - path.local_time[i] + (path.b[i] - path.x[i]);
        view.occ_pos[i] = path.occ_pos[i] + path.occ_neg[i];
        view.occ_neg[i] = 0.0;
        view.local_time[i] = 2.0 * path.local_time[i];
    }
    return view;
}

void write_csv_header(std::ostream& out, bool with_path_id) {
    if (with_path_id) out << "path_id,";
    out << "t,x,b,a0,apos,aneg\n";
}

void write_csv_rows(std::ostream& out, const SPath& path, std::optional<std::size_t> path_id) {
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (path_id) out << *path_id << ',';
        put(out, path.t_grid[i]);
        for (double v : {path.x[i], path.b[i], path.occ_zero[i], path.occ_pos[i], path.occ_neg[i]}) {
            out << ',';
            put(out, v);
        }
        out << '\n';
    }
}

}  // namespace sticky::pathsim
