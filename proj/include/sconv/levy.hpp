#pragma once

#include "sconv/grid.hpp"
#include "sconv/hilbert.hpp"
#include "sconv/rng.hpp"

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace sconv {

/// Finite mark space E = {0..m-1} with intensity weights nu_j > 0.
class MarkSpace {
public:
    MarkSpace(std::vector<std::string> labels, std::vector<double> nu);
    explicit MarkSpace(const std::vector<double>& nu);

    std::size_t size() const noexcept { return nu_.size(); }
    std::span<const double> nu() const noexcept { return nu_; }
    double nu(std::size_t j) const { return nu_[j]; }
    const std::string& label(std::size_t j) const { return labels_[j]; }
    /// Lambda = sum_j nu_j.
    double total_rate() const noexcept { return total_rate_; }

    /// Same labels with every nu_j multiplied by `factor` > 0.
    MarkSpace scaled(double factor) const;

private:
    std::vector<std::string> labels_;
    std::vector<double> nu_;
    double total_rate_;
};

struct JumpEvent {
    double time;
    std::size_t mark;
    bool operator==(const JumpEvent&) const = default;
};

/// One realization of the Poisson random measure on (0, T] x E.
struct MarkedJumpPath {
    double horizon = 0.0;
    std::vector<JumpEvent> events;  // strictly increasing times

    bool operator==(const MarkedJumpPath&) const = default;
};

/// Event count ~ Poisson(Lambda T), times uniform on (0, T] in increasing
/// order (generated as exponential inter-arrival times, which has the same
/// law), marks i.i.d. with P(j) = nu_j / Lambda.
MarkedJumpPath sample_prm(const MarkSpace& space, double horizon, RngStream& stream);

/// Cadlag path on a grid: right values X(t_k) and left limits X(t_k-).
/// Left and right differ only at jump nodes.
struct VectorCadlagPath {
    std::vector<double> times;
    std::vector<StateVector> left;
    std::vector<StateVector> right;
    std::vector<char> is_jump;

    std::size_t size() const noexcept { return times.size(); }
    std::size_t dim() const { return right.empty() ? 0 : right.front().dim(); }
    void push(double t, StateVector left_limit, StateVector value, bool jump);
    /// Right value at node time t (t must be a node).
    const StateVector& at(double t) const;
};

using MarkIntegrand = std::function<StateVector(double, std::size_t)>;

/// M(t) = sum_{s_i <= t} H(s_i, xi_i) - int_0^t sum_j H(s, j) nu_j ds.
///
/// The compensator is integrated with the midpoint rule on each grid cell,
/// which is exact when H does not depend on time.
VectorCadlagPath compensated_integral(const MarkedJumpPath& path, const MarkSpace& space,
                                      const MarkIntegrand& integrand, const TimeGrid& grid);

struct JumpIncrement {
    double time;
    StateVector value;
};

/// [M](t) = sum_{s_i <= t} ‖ΔM(s_i)‖². Pure-jump paths have no continuous
/// quadratic variation, so continuous_part is identically zero.
class QuadraticVariationPath {
public:
    QuadraticVariationPath() = default;
    QuadraticVariationPath(std::vector<double> jump_times, std::vector<double> cumulative);

    double operator()(double t) const;
    double continuous_part(double) const noexcept { return 0.0; }
    double total() const noexcept { return cumulative_.empty() ? 0.0 : cumulative_.back(); }
    std::span<const double> jump_times() const noexcept { return times_; }

private:
    std::vector<double> times_;
    std::vector<double> cumulative_;
};

QuadraticVariationPath quadratic_variation(std::span<const JumpIncrement> jumps);

struct FiniteVariationPath {
    VectorCadlagPath path;                // V(t) = int_0^t density
    std::vector<double> total_variation;  // |V|(t) = int_0^t ‖density‖
};

/// Midpoint quadrature per cell for both V and |V|.
FiniteVariationPath finite_variation_path(const std::function<StateVector(double)>& density,
                                          const TimeGrid& grid);

/// CSV columns: time, mark, label, increment coordinates.
void write_jump_path_csv(std::ostream& os, const MarkedJumpPath& path, const MarkSpace& space,
                         const MarkIntegrand& increments);

/// CSV columns: time, left-limit coordinates, right coordinates, is_jump.
void write_cadlag_csv(std::ostream& os, const VectorCadlagPath& path);

}  // namespace sconv
