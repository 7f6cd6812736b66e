#include "sconv/levy.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace sconv {

namespace {

std::vector<std::string> default_labels(std::size_t m)
{
    std::vector<std::string> labels(m);
    for (std::size_t j = 0; j < m; ++j)
        labels[j] = "m" + std::to_string(j + 1);
    return labels;
}

// shortest text that round-trips
void write_number(std::ostream& os, double v)
{
    std::array<char, 32> buf{};
    const auto end = std::to_chars(buf.data(), buf.data() + buf.size(), v).ptr;
    os.write(buf.data(), end - buf.data());
}

}  // namespace

MarkSpace::MarkSpace(std::vector<std::string> labels, std::vector<double> nu)
    : labels_(std::move(labels)), nu_(std::move(nu)), total_rate_(0.0)
{
    if (nu_.empty())
        throw std::invalid_argument("mark space needs at least one mark");
    if (labels_.size() != nu_.size())
        throw std::invalid_argument("mark labels and weights differ in length");
    for (double v : nu_) {
        if (!(v > 0.0) || !std::isfinite(v))
            throw std::invalid_argument("mark intensities must be positive and finite");
        total_rate_ += v;
    }
}

MarkSpace::MarkSpace(const std::vector<double>& nu) : MarkSpace(default_labels(nu.size()), nu) {}

MarkSpace MarkSpace::scaled(double factor) const
{
    if (!(factor > 0.0))
        throw std::invalid_argument("intensity scale must be positive");
    std::vector<double> nu(nu_);
    for (double& v : nu)
        v *= factor;
    return MarkSpace(labels_, std::move(nu));
}

MarkedJumpPath sample_prm(const MarkSpace& space, double horizon, RngStream& stream)
{
    if (!(horizon >= 0.0))
        throw std::invalid_argument("horizon must be nonnegative");
    MarkedJumpPath path;
    path.horizon = horizon;
    if (horizon == 0.0)
        return path;
    const double rate = space.total_rate();
    double t = 0.0;
    for (;;) {
        t += stream.exponential(rate);
        if (t > horizon)
            break;
        const std::size_t mark = stream.categorical(space.nu());
        if (!path.events.empty() && t <= path.events.back().time)
            continue;  // coincident arrival (probability zero in exact arithmetic)
        path.events.push_back({t, mark});
    }
    return path;
}

void VectorCadlagPath::push(double t, StateVector left_limit, StateVector value, bool jump)
{
    times.push_back(t);
    left.push_back(std::move(left_limit));
    right.push_back(std::move(value));
    is_jump.push_back(jump ? 1 : 0);
}

const StateVector& VectorCadlagPath::at(double t) const
{
    auto it = std::lower_bound(times.begin(), times.end(), t);
    if (it == times.end() || *it != t)
        throw std::out_of_range("time is not a node of the path");
    return right[static_cast<std::size_t>(it - times.begin())];
}

VectorCadlagPath compensated_integral(const MarkedJumpPath& path, const MarkSpace& space,
                                      const MarkIntegrand& integrand, const TimeGrid& grid)
{
    require_jump_adapted(grid, path);
    const std::size_t dim = integrand(0.0, 0).dim();

    VectorCadlagPath out;
    out.push(0.0, StateVector(dim), StateVector(dim), false);
    std::size_t next_event = 0;
    for (std::size_t k = 1; k < grid.size(); ++k) {
        const double t0 = grid[k - 1];
        const double t1 = grid[k];
        const double mid = 0.5 * (t0 + t1);
        StateVector compensator(dim);
        for (std::size_t j = 0; j < space.size(); ++j)
            compensator += space.nu(j) * integrand(mid, j);
        StateVector left = out.right.back() - (t1 - t0) * compensator;
        StateVector right = left;
        bool jump = false;
        if (next_event < path.events.size() && path.events[next_event].time == t1) {
            const auto& e = path.events[next_event++];
            right += integrand(e.time, e.mark);
            jump = true;
        }
        out.push(t1, std::move(left), std::move(right), jump);
    }
    return out;
}

QuadraticVariationPath::QuadraticVariationPath(std::vector<double> jump_times,
                                               std::vector<double> cumulative)
    : times_(std::move(jump_times)), cumulative_(std::move(cumulative))
{
    if (times_.size() != cumulative_.size())
        throw std::invalid_argument("quadratic variation: size mismatch");
}

double QuadraticVariationPath::operator()(double t) const
{
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    if (it == times_.begin())
        return 0.0;
    return cumulative_[static_cast<std::size_t>(it - times_.begin()) - 1];
}

QuadraticVariationPath quadratic_variation(std::span<const JumpIncrement> jumps)
{
    std::vector<double> times;
    std::vector<double> cumulative;
    times.reserve(jumps.size());
    cumulative.reserve(jumps.size());
    double acc = 0.0;
    for (const auto& j : jumps) {
        if (!times.empty() && j.time < times.back())
            throw std::invalid_argument("quadratic variation: jump times must be sorted");
        acc += norm_squared(j.value);
        if (!times.empty() && j.time == times.back()) {
            cumulative.back() = acc;
            continue;
        }
        times.push_back(j.time);
        cumulative.push_back(acc);
    }
    return QuadraticVariationPath(std::move(times), std::move(cumulative));
}

FiniteVariationPath finite_variation_path(const std::function<StateVector(double)>& density,
                                          const TimeGrid& grid)
{
    const std::size_t dim = density(0.0).dim();
    FiniteVariationPath out;
    out.path.push(0.0, StateVector(dim), StateVector(dim), false);
    out.total_variation.push_back(0.0);
    for (std::size_t k = 1; k < grid.size(); ++k) {
        const double h = grid[k] - grid[k - 1];
        const StateVector g = density(grid[k - 1] + 0.5 * h);
        StateVector v = out.path.right.back() + h * g;
        out.total_variation.push_back(out.total_variation.back() + h * norm(g));
        out.path.push(grid[k], v, v, false);
    }
    return out;
}

void write_jump_path_csv(std::ostream& os, const MarkedJumpPath& path, const MarkSpace& space,
                         const MarkIntegrand& increments)
{
    const auto old_precision = os.precision(17);
    std::size_t dim = 0;
    if (!path.events.empty())
        dim = increments(path.events.front().time, path.events.front().mark).dim();
    os << "time,mark,label";
    for (std::size_t i = 0; i < dim; ++i)
        os << ",dz" << i;
    os << '\n';
    for (const auto& e : path.events) {
        write_number(os, e.time);
        os << ',' << (e.mark + 1) << ',' << space.label(e.mark);
        for (double c : increments(e.time, e.mark).coords()) {
            os << ',';
            write_number(os, c);
        }
        os << '\n';
    }
    os.precision(old_precision);
}

void write_cadlag_csv(std::ostream& os, const VectorCadlagPath& path)
{
    const auto old_precision = os.precision(17);
    const std::size_t dim = path.dim();
    os << "time";
    for (std::size_t i = 0; i < dim; ++i)
        os << ",left" << i;
    for (std::size_t i = 0; i < dim; ++i)
        os << ",right" << i;
    os << ",is_jump\n";
    for (std::size_t k = 0; k < path.size(); ++k) {
        write_number(os, path.times[k]);
        for (double c : path.left[k].coords()) {
            os << ',';
            write_number(os, c);
        }
        for (double c : path.right[k].coords()) {
            os << ',';
            write_number(os, c);
        }
        os << ',' << (path.is_jump[k] ? 1 : 0) << '\n';
    }
    os.precision(old_precision);
}

}  // namespace sconv
