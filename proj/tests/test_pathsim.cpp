#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include "sticky/errors.hpp"
#include "sticky/mcstat.hpp"
#include "sticky/pathsim.hpp"
#include "sticky/specfun.hpp"

using namespace sticky;
using namespace sticky::pathsim;

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

SPath small_path(double theta, std::uint64_t seed, const BuildOptions& opts = {}) {
    const auto base = sample_base(4000, 1e-3, mix_seed(seed, 0, 0));
    return build_sticky(base, theta, 2.0, mix_seed(seed, 0, 1), mix_seed(seed, 0, 2), opts);
}

}  // namespace

TEST_CASE("mix_seed separates indices and streams") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t k = 0; k < 100; ++k) {
        for (std::uint64_t s = 0; s < 5; ++s) seen.insert(mix_seed(42, k, s));
    }
    CHECK(seen.size() == 500);
    CHECK(mix_seed(1, 2, 3) == mix_seed(1, 2, 3));
}

TEST_CASE("sample_base invariants") {
    const auto a = sample_base(500, 0.01, 9);
    const auto b = sample_base(500, 0.01, 9);
    CHECK(a.values == b.values);
    CHECK(a.running_max == b.running_max);
    CHECK(a.values[0] == 0.0);
    CHECK(a.running_max[0] == 0.0);
    double top = 0.0;
    for (std::size_t i = 1; i < a.values.size(); ++i) {
        CHECK(a.running_max[i] >= a.running_max[i - 1]);
        top = std::max(top, a.values[i]);
        CHECK(a.running_max[i] >= top);
        CHECK(a.step_max[i] >= std::max(a.values[i - 1], a.values[i]));
    }
    CHECK_THROWS_AS(sample_base(0, 0.1, 1), DomainError);
    CHECK_THROWS_AS(sample_base(10, 0.0, 1), DomainError);
}

TEST_CASE("sample_base marginals at s = 1") {
    const std::size_t n = 100000;
    std::vector<double> end(n), top(n);
    double sum2 = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const auto p = sample_base(100, 0.01, mix_seed(5, k));
        end[k] = p.values.back();
        top[k] = p.running_max.back();
        sum2 += end[k] * end[k];
    }
    CHECK(std::fabs(sum2 / n - 1.0) < 0.02);
    // Running maximum is exact in law, so only the DKW band applies.
    const double ks = mcstat::ks_distance(mcstat::ECDF(top), [](double x) {
        return x <= 0.0 ? 0.0 : 2.0 * specfun::normal_cdf(x) - 1.0;
    });
    CHECK(ks <= mcstat::dkw_epsilon(n, 0.01));
}

TEST_CASE("build_sticky bookkeeping") {
    for (double theta : {0.2, 1.0, 5.0}) {
        CAPTURE(theta);
        const auto p = small_path(theta, 11);
        REQUIRE(p.size() == 2001);
        CHECK(p.t_grid.front() == 0.0);
        CHECK(p.t_grid.back() == 2.0);
        std::size_t inside_zero = 0;
        for (std::size_t i = 0; i < p.size(); ++i) {
            CHECK(std::fabs(p.occ_zero[i] + p.occ_pos[i] + p.occ_neg[i] - p.t_grid[i]) < 1e-12);
            CHECK(p.occ_zero[i] * theta == doctest::Approx(p.local_time[i]).epsilon(1e-12));
            if (i > 0) {
                CHECK(p.occ_zero[i] >= p.occ_zero[i - 1]);
                CHECK(p.occ_pos[i] >= p.occ_pos[i - 1]);
                CHECK(p.occ_neg[i] >= p.occ_neg[i - 1]);
            }
            // A node whose neighbouring cells are spent entirely at zero sits in a zero-interval.
            if (i > 0 && i + 1 < p.size()) {
                const double left = p.occ_zero[i] - p.occ_zero[i - 1];
                const double right = p.occ_zero[i + 1] - p.occ_zero[i];
                const double h = p.t_grid[i] - p.t_grid[i - 1];
                if (left > h * (1.0 - 1e-9) && right > h * (1.0 - 1e-9)) {
                    ++inside_zero;
                    CHECK(p.x[i] == 0.0);
                }
            }
        }
        if (theta < 1.0) CHECK(inside_zero > 0);
    }
}

TEST_CASE("build_sticky with infinite theta is the signed reflected base path") {
    const auto base = sample_base(1000, 1e-3, 3);
    const auto p = build_sticky(base, inf, 1.0, 4, 5);
    for (std::size_t i = 0; i < p.size(); ++i) {
        CHECK(p.occ_zero[i] == 0.0);
        CHECK(std::fabs(std::fabs(p.x[i]) - (base.running_max[i] - base.values[i])) < 1e-9);
        CHECK(p.b[i] == p.x[i]);
    }
}

TEST_CASE("sign flip negates x and keeps the zero clock") {
    BuildOptions flipped;
    flipped.negate_signs = true;
    const auto p = small_path(1.0, 21);
    const auto q = small_path(1.0, 21, flipped);
    for (std::size_t i = 0; i < p.size(); ++i) {
        CHECK(q.x[i] == -p.x[i]);
        CHECK(q.occ_zero[i] == p.occ_zero[i]);
        CHECK(q.occ_pos[i] == p.occ_neg[i]);
    }
}

TEST_CASE("build_sticky needs a long enough base") {
    const auto base = sample_base(10, 0.01, 1);
    CHECK_THROWS_AS(build_sticky(base, inf, 0.5, 1, 2), InsufficientPathError);
    CHECK_THROWS_AS(build_sticky(base, -1.0, 0.05, 1, 2), DomainError);
}

TEST_CASE("samplers are independent of the worker count") {
    const auto a = sample_at_exp(1.0, 1.0, 300, 1e-3, 17, 1);
    const auto b = sample_at_exp(1.0, 1.0, 300, 1e-3, 17, 3);
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a[k].x_T == b[k].x_T);
        CHECK(a[k].b_T == b[k].b_T);
        CHECK(a[k].a0_T == b[k].a0_T);
        CHECK(a[k].T == b[k].T);
        CHECK(a[k].a0_T <= a[k].T);
    }
    const auto c = sample_at_time(1.0, 0.5, 200, 1e-3, 4, 1);
    const auto d = sample_at_time(1.0, 0.5, 200, 1e-3, 4, 2);
    for (std::size_t k = 0; k < c.size(); ++k) CHECK(c[k].x == d[k].x);
}

TEST_CASE("sample_at_exp: T and the sticky atom") {
    const std::size_t n = 20000;
    const double lambda = 1.0, theta = 1.0;
    const auto s = sample_at_exp(theta, lambda, n, 1e-3, 99);
    double mean = 0.0, zeros = 0.0;
    for (const auto& j : s) {
        mean += j.T;
        zeros += j.x_T == 0.0 ? 1.0 : 0.0;
    }
    mean /= n;
    CHECK(std::fabs(mean - 1.0 / lambda) < 3.0 / std::sqrt(static_cast<double>(n)) / lambda);
    CHECK(std::fabs(zeros / n - 1.0 / (1.0 + std::sqrt(2.0))) < 0.02);
}

TEST_CASE("snapshots agree with build_sticky on the one-sided driving motion") {
    const auto snaps = snapshot_path(1.0, {0.0, 0.25, 0.5, 1.0}, 1e-3, 8, 0);
    CHECK(snaps[0].x == 0.0);
    CHECK(snaps[0].onesided_level == 0.0);
    for (const auto& s : snaps) {
        CHECK(s.onesided_b == doctest::Approx(std::fabs(s.x) - s.local_time + (s.b - s.x)));
        CHECK(s.onesided_level >= 0.0);
        CHECK(s.onesided_level >= std::fabs(s.x) - 1e-12);
    }
    CHECK_THROWS_AS(snapshot_path(1.0, {0.5, 0.2}, 1e-3, 8, 0), DomainError);
}

TEST_CASE("occupation_inverse") {
    const auto p = small_path(1.0, 31);
    const double h = 1e-3;
    CHECK(occupation_inverse(p, OccupationKind::pos, 0.0) >= 0.0);
    for (double t : {0.0, 0.05, 0.1, 0.2}) {
        for (auto kind : {OccupationKind::zero, OccupationKind::pos, OccupationKind::neg}) {
            const auto& occ = kind == OccupationKind::zero ? p.occ_zero : kind == OccupationKind::pos ? p.occ_pos : p.occ_neg;
            if (!(t < occ.back())) continue;
            const double alpha = occupation_inverse(p, kind, t);
            const auto at = [&](double u) {
                if (u <= 0.0) return 0.0;
                const auto i = static_cast<std::size_t>(std::min(u / h, static_cast<double>(p.size() - 2)));
                const double f = (u - p.t_grid[i]) / h;
                return occ[i] + f * (occ[i + 1] - occ[i]);
            };
            CHECK(at(alpha) >= t - 1e-12);
            CHECK(at(alpha - h) <= t + 1e-12);
        }
    }
    CHECK_THROWS_AS(occupation_inverse(p, OccupationKind::zero, p.occ_zero.back() + 1.0), OutOfRangeError);
}

TEST_CASE("onesided_view") {
    const auto p = small_path(0.7, 41);
    const auto v = onesided_view(p);
    CHECK(v.occ_zero == p.occ_zero);
    for (std::size_t i = 0; i < p.size(); ++i) {
        CHECK(v.x[i] == std::fabs(p.x[i]));
        CHECK(v.occ_neg[i] == 0.0);
        CHECK(v.local_time[i] == 2.0 * p.local_time[i]);
    }
    CHECK(v.occ_pos.back() == doctest::Approx(p.t_grid.back() - p.occ_zero.back()).epsilon(1e-12));
}

TEST_CASE("positive part of the local time along the positive clock is a running maximum") {
    // theta/2 A0 at the inverse of A+ is distributed as sup_{s <= u} beta_s, i.e. |N(0, u)|.
    const std::size_t n = 4000;
    const double theta = 1.0, u = 0.1, h = 1e-3;
    std::vector<double> level;
    std::size_t dropped = 0;
    for (std::size_t k = 0; k < n; ++k) {
        bool done = false;
        for (double horizon = 4.0; horizon <= 256.0 && !done; horizon *= 4.0) {
            const auto base = sample_base(static_cast<std::size_t>(horizon / h) + 1, h, mix_seed(123, k, 0));
            BuildOptions opts;
            opts.grid_step = 4.0 * h;
            const auto p = build_sticky(base, theta, horizon, mix_seed(123, k, 1), mix_seed(123, k, 2), opts);
            if (!(u < p.occ_pos.back())) continue;
            const double alpha = occupation_inverse(p, OccupationKind::pos, u);
            const auto i = static_cast<std::size_t>(alpha / opts.grid_step);
            const double f = (alpha - p.t_grid[i]) / opts.grid_step;
            level.push_back(0.5 * theta * (p.occ_zero[i] + f * (p.occ_zero[i + 1] - p.occ_zero[i])));
            done = true;
        }
        if (!done) ++dropped;
    }
    CHECK(dropped < n / 50);
    const double ks = mcstat::ks_distance(mcstat::ECDF(level), [u](double x) {
        return x <= 0.0 ? 0.0 : 2.0 * specfun::normal_cdf(x / std::sqrt(u)) - 1.0;
    });
    CHECK(ks <= mcstat::dkw_epsilon(level.size(), 0.01) + static_cast<double>(dropped) / n + 0.01);
}

TEST_CASE("CSV dump") {
    const auto base = sample_base(20, 0.05, 2);
    const auto p = build_sticky(base, 1.0, 0.1, 3, 4);
    std::ostringstream single, batch;
    write_csv_header(single, false);
    write_csv_rows(single, p, std::nullopt);
    write_csv_header(batch, true);
    write_csv_rows(batch, p, 7);
    CHECK(single.str().rfind("t,x,b,a0,apos,aneg\n0,0,0,0,0,0\n0.050000000000000003,", 0) == 0);
    CHECK(batch.str().rfind("path_id,t,x,b,a0,apos,aneg\n7,0,", 0) == 0);
    std::size_t lines = 0;
    for (char c : single.str()) lines += c == '\n';
    CHECK(lines == p.size() + 1);
}
