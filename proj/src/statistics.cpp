#include "sconv/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sconv {

double SampleSummary::std_error() const
{
    return n > 0 ? std::sqrt(variance / static_cast<double>(n)) : 0.0;
}

SampleSummary summarize(std::span<const double> samples)
{
    SampleSummary s;
    s.n = samples.size();
    if (s.n == 0)
        return s;
    double sum = 0.0;
    for (double v : samples)
        sum += v;
    s.mean = sum / static_cast<double>(s.n);
    if (s.n > 1) {
        double ss = 0.0;
        for (double v : samples)
            ss += (v - s.mean) * (v - s.mean);
        s.variance = ss / static_cast<double>(s.n - 1);
    }
    return s;
}

bool RatioEstimate::finite_interval() const
{
    return !degenerate && std::isfinite(ratio) && std::isfinite(half_width) && ratio - half_width > 0.0;
}

RatioEstimate estimate_ratio(std::span<const double> numerator, std::span<const double> denominator)
{
    if (numerator.size() != denominator.size())
        throw std::invalid_argument("ratio estimate: sample size mismatch");
    if (numerator.size() < 2)
        throw std::invalid_argument("ratio estimate: need at least two samples");

    const SampleSummary num = summarize(numerator);
    const SampleSummary den = summarize(denominator);
    RatioEstimate r;
    r.n = numerator.size();
    r.numerator_mean = num.mean;
    r.denominator_mean = den.mean;
    if (!(den.mean > 0.0) || !std::isfinite(den.mean) || !std::isfinite(num.mean)) {
        r.degenerate = true;
        r.ratio = std::numeric_limits<double>::quiet_NaN();
        r.std_error = r.half_width = std::numeric_limits<double>::quiet_NaN();
        return r;
    }
    r.ratio = num.mean / den.mean;

    double cov = 0.0;
    for (std::size_t i = 0; i < r.n; ++i)
        cov += (numerator[i] - num.mean) * (denominator[i] - den.mean);
    cov /= static_cast<double>(r.n - 1);
    const double v = num.variance - 2.0 * r.ratio * cov + r.ratio * r.ratio * den.variance;
    r.std_error = std::sqrt(std::max(v, 0.0) / static_cast<double>(r.n)) / den.mean;
    r.half_width = z95 * r.std_error;
    return r;
}

}  // namespace sconv
