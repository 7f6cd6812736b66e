#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sconv {

struct MarkedJumpPath;

/// Strictly increasing time nodes 0 = t_0 < ... < t_K = T.
class TimeGrid {
public:
    explicit TimeGrid(std::vector<double> nodes);

    /// t_k = T * (k / cells). Refinements by integer factors reproduce the
    /// coarse nodes bit-for-bit.
    static TimeGrid uniform(double horizon, std::size_t cells);

    /// Uniform grid merged with every event time of the path.
    static TimeGrid jump_adapted(double horizon, std::size_t cells, const MarkedJumpPath& path);

    std::span<const double> nodes() const noexcept { return nodes_; }
    double operator[](std::size_t k) const { return nodes_[k]; }
    std::size_t size() const noexcept { return nodes_.size(); }
    double horizon() const noexcept { return nodes_.back(); }

    bool contains(double t) const;
    /// Index of the node equal to t; throws std::out_of_range when absent.
    std::size_t index_of(double t) const;

private:
    std::vector<double> nodes_;
};

/// Throws std::invalid_argument when some event time of `path` is not a node.
void require_jump_adapted(const TimeGrid& grid, const MarkedJumpPath& path);

}  // namespace sconv
