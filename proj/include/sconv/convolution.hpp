#pragma once

#include "sconv/grid.hpp"
#include "sconv/hilbert.hpp"
#include "sconv/levy.hpp"

#include <functional>
#include <vector>

namespace sconv {

/// (e^z - 1) / z, switching to 1 + z/2 + z^2/6 + z^3/24 for |z| <= 1e-5.
double phi1(double z);

/// S_h x + h phi1(hA) g: exact solution at t+h of x' = Ax + g with constant g.
StateVector exponential_euler_step(const DiagonalGenerator& gen, double h, const StateVector& x,
                                   const StateVector& g);

/// Z = V + M with V(t) = int_0^t drift(s) ds and M the compensated Poisson
/// integral of jump_value over the marked path. Empty callables mean zero.
struct SemimartingaleDecomposition {
    std::size_t dim;
    std::function<StateVector(double)> drift;
    MarkIntegrand jump_value;
    MarkedJumpPath jumps;
    MarkSpace marks;

    static SemimartingaleDecomposition zero(std::size_t dim, double horizon, MarkSpace marks);

    StateVector drift_density(double t) const;
    /// ΔZ at the event.
    StateVector jump_at(const JumpEvent& e) const;
    /// -sum_j jump_value(t, j) nu_j, the density of the compensator of M.
    StateVector compensator_density(double t) const;
    /// Density used on the cell [t0, t1]: drift + compensator, both at the midpoint.
    StateVector cell_density(double t0, double t1) const;
};

/// X(t) = S_t x0 + int_0^t S_{t-s} dZ(s) on a jump-adapted grid.
///
/// Between nodes X(t_{k+1}-) = S_h X(t_k) + h phi1(hA) g_k where g_k is the
/// cell density; at a jump time X(s) = X(s-) + ΔZ(s). Nodal values are exact
/// whenever the drift density is constant on each cell.
VectorCadlagPath convolve(const DiagonalGenerator& gen, const StateVector& x0,
                          const SemimartingaleDecomposition& z, const TimeGrid& grid);

/// constant + oscillation * sin(frequency * t)
struct OscillatingField {
    StateVector constant;
    StateVector oscillation;
    double frequency = 0.0;

    StateVector operator()(double t) const;
};

/// Jump value map H(t, j) = base_j + oscillation_j * sin(frequency * t).
struct JumpMap {
    std::vector<StateVector> base;
    std::vector<StateVector> oscillation;
    double frequency = 0.0;

    StateVector operator()(double t, std::size_t mark) const;
    JumpMap scaled(double factor) const;
    std::size_t dim() const { return base.empty() ? 0 : base.front().dim(); }
    bool is_zero() const;
};

}  // namespace sconv
