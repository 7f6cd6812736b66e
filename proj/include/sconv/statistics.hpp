#pragma once

#include <cstddef>
#include <span>

namespace sconv {

struct SampleSummary {
    std::size_t n = 0;
    double mean = 0.0;
    double variance = 0.0;  // unbiased
    double std_error() const;
};

/// Two-pass mean and variance, summed in index order.
SampleSummary summarize(std::span<const double> samples);

/// Monte-Carlo estimate of E[numerator] / E[denominator].
struct RatioEstimate {
    double numerator_mean = 0.0;
    double denominator_mean = 0.0;
    double ratio = 0.0;
    double std_error = 0.0;
    double half_width = 0.0;  // 95% delta-method interval
    std::size_t n = 0;
    bool degenerate = false;

    /// Interval [ratio - hw, ratio + hw] is finite and stays clear of zero.
    bool finite_interval() const;
};

inline constexpr double z95 = 1.959963984540054;

/// Degenerate when the denominator mean is not positive and finite; the
/// ratio is then NaN. Requires n >= 2 paired samples.
RatioEstimate estimate_ratio(std::span<const double> numerator, std::span<const double> denominator);

}  // namespace sconv
