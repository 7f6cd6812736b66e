#include "sconv/grid.hpp"

#include "sconv/levy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace sconv {

TimeGrid::TimeGrid(std::vector<double> nodes) : nodes_(std::move(nodes))
{
    if (nodes_.empty() || nodes_.front() != 0.0)
        throw std::invalid_argument("time grid must start at 0");
    for (std::size_t k = 1; k < nodes_.size(); ++k) {
        if (!(nodes_[k] > nodes_[k - 1]) || !std::isfinite(nodes_[k]))
            throw std::invalid_argument("time grid must be strictly increasing and finite");
    }
}

TimeGrid TimeGrid::uniform(double horizon, std::size_t cells)
{
    if (!(horizon >= 0.0))
        throw std::invalid_argument("horizon must be nonnegative");
    if (horizon == 0.0)
        return TimeGrid({0.0});
    if (cells == 0)
        throw std::invalid_argument("uniform grid needs at least one cell");
    std::vector<double> t(cells + 1);
    for (std::size_t k = 0; k <= cells; ++k)
        t[k] = horizon * (static_cast<double>(k) / static_cast<double>(cells));
    t.back() = horizon;
    return TimeGrid(std::move(t));
}

TimeGrid TimeGrid::jump_adapted(double horizon, std::size_t cells, const MarkedJumpPath& path)
{
    TimeGrid base = uniform(horizon, cells);
    std::vector<double> merged;
    merged.reserve(base.size() + path.events.size());
    std::vector<double> jumps;
    jumps.reserve(path.events.size());
    for (const auto& e : path.events) {
        if (!(e.time > 0.0 && e.time <= horizon))
            throw std::invalid_argument("jump time outside (0, horizon]");
        jumps.push_back(e.time);
    }
    std::merge(base.nodes_.begin(), base.nodes_.end(), jumps.begin(), jumps.end(),
               std::back_inserter(merged));
    merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
    return TimeGrid(std::move(merged));
}

bool TimeGrid::contains(double t) const
{
    return std::binary_search(nodes_.begin(), nodes_.end(), t);
}

std::size_t TimeGrid::index_of(double t) const
{
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), t);
    if (it == nodes_.end() || *it != t) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "time " << t << " is not a grid node";
        throw std::out_of_range(msg.str());
    }
    return static_cast<std::size_t>(it - nodes_.begin());
}

void require_jump_adapted(const TimeGrid& grid, const MarkedJumpPath& path)
{
    for (const auto& e : path.events) {
        if (!grid.contains(e.time)) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "grid is not jump-adapted: missing jump time " << e.time;
            throw std::invalid_argument(msg.str());
        }
    }
}

}  // namespace sconv
