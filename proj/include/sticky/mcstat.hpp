#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sticky/pathsim.hpp"

namespace sticky::mcstat {

// Empirical CDF over a sorted copy of the samples.
class ECDF {
public:
    explicit ECDF(std::vector<double> samples);

    const std::vector<double>& sorted_samples() const { return sorted_; }
    std::size_t n() const { return sorted_.size(); }

    double operator()(double x) const;  // (# samples <= x) / n
    double left(double x) const;        // (# samples < x) / n

private:
    std::vector<double> sorted_;
};

using Cdf = std::function<double(double)>;

/// sup over sample points of the gap between the ECDF and F, using both F-hat(x) and F-hat(x-).
double ks_distance(const ECDF& e, const Cdf& F);

/// Same, for a reference with atoms: F-hat(x-) is compared with the left limit F_left(x).
double ks_distance(const ECDF& e, const Cdf& F, const Cdf& F_left);

/// Two-sample statistic sup |F_a - F_b|.
double ks_two_sample(const ECDF& a, const ECDF& b);

/// sqrt(ln(2 / alpha) / (2 n)).
double dkw_epsilon(std::size_t n, double alpha);

struct BinnedCdf {
    std::vector<double> values;
    std::size_t retained = 0;
};

inline constexpr std::size_t min_bin_count = 500;

/// ECDF of x_T over samples with |b_T - b| <= bandwidth, evaluated on x_grid.
/// Throws InsufficientDataError when fewer than min_bin_count samples fall in the bin.
BinnedCdf conditional_cdf_binned(const std::vector<pathsim::JointSample>& samples, double b,
                                 double bandwidth, const std::vector<double>& x_grid);

struct ValidationReport {
    std::string experiment_id;
    std::map<std::string, double> parameters;
    double statistic = 0.0;
    double tolerance = 0.0;
    std::size_t n_samples = 0;
    std::uint64_t seed = 0;
    std::optional<bool> passed;  // empty for report-only experiments
    std::string notes;
};

/// JSON array, one object per report; floats at 17 significant digits, NaN as null.
std::string to_json(const std::vector<ValidationReport>& reports);

/// True when no gating report failed.
bool all_passed(const std::vector<ValidationReport>& reports);

enum class Suite { resolvent, joint, conditional, occupation, onesided, warren, corollary, all };

/// Throws std::invalid_argument for an unknown name.
Suite parse_suite(const std::string& name);
const char* suite_name(Suite s);

struct SuiteConfig {
    double step = 1e-4;
    unsigned workers = 0;
    double alpha = 0.01;
    double bandwidth = 0.05;
};

/// Runs one suite (or all). Errors inside an experiment become failed reports.
std::vector<ValidationReport> run_suite(Suite suite, std::size_t n, std::uint64_t seed,
                                        const SuiteConfig& config = {});

}  // namespace sticky::mcstat
