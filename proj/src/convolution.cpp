#include "sconv/convolution.hpp"

#include <cmath>
#include <stdexcept>

namespace sconv {

double phi1(double z)
{
    if (std::abs(z) <= 1e-5)
        return 1.0 + z * (1.0 / 2.0 + z * (1.0 / 6.0 + z * (1.0 / 24.0)));
    return std::expm1(z) / z;
}

StateVector exponential_euler_step(const DiagonalGenerator& gen, double h, const StateVector& x,
                                   const StateVector& g)
{
    if (x.dim() != gen.dim() || g.dim() != gen.dim())
        throw std::invalid_argument("exponential_euler_step: dimension mismatch");
    StateVector out(x.dim());
    for (std::size_t i = 0; i < x.dim(); ++i) {
        const double ah = gen.eigenvalue(i) * h;
        out[i] = std::exp(ah) * x[i] + h * phi1(ah) * g[i];
    }
    return out;
}

SemimartingaleDecomposition SemimartingaleDecomposition::zero(std::size_t dim, double horizon,
                                                              MarkSpace marks)
{
    return SemimartingaleDecomposition{dim, {}, {}, MarkedJumpPath{horizon, {}}, std::move(marks)};
}

StateVector SemimartingaleDecomposition::drift_density(double t) const
{
    return drift ? drift(t) : StateVector(dim);
}

StateVector SemimartingaleDecomposition::jump_at(const JumpEvent& e) const
{
    return jump_value ? jump_value(e.time, e.mark) : StateVector(dim);
}

StateVector SemimartingaleDecomposition::compensator_density(double t) const
{
    StateVector out(dim);
    if (!jump_value)
        return out;
    for (std::size_t j = 0; j < marks.size(); ++j)
        out -= marks.nu(j) * jump_value(t, j);
    return out;
}

StateVector SemimartingaleDecomposition::cell_density(double t0, double t1) const
{
    const double mid = 0.5 * (t0 + t1);
    return drift_density(mid) + compensator_density(mid);
}

VectorCadlagPath convolve(const DiagonalGenerator& gen, const StateVector& x0,
                          const SemimartingaleDecomposition& z, const TimeGrid& grid)
{
    if (x0.dim() != gen.dim() || z.dim != gen.dim())
        throw std::invalid_argument("convolve: dimension mismatch");
    require_jump_adapted(grid, z.jumps);

    VectorCadlagPath out;
    out.times.reserve(grid.size());
    out.push(0.0, x0, x0, false);
    std::size_t next_event = 0;
    for (std::size_t k = 1; k < grid.size(); ++k) {
        const double t0 = grid[k - 1];
        const double t1 = grid[k];
        StateVector left = exponential_euler_step(gen, t1 - t0, out.right.back(), z.cell_density(t0, t1));
        if (next_event < z.jumps.events.size() && z.jumps.events[next_event].time == t1) {
            StateVector right = left + z.jump_at(z.jumps.events[next_event++]);
            out.push(t1, std::move(left), std::move(right), true);
        } else {
            StateVector right = left;
            out.push(t1, std::move(left), std::move(right), false);
        }
    }
    return out;
}

StateVector OscillatingField::operator()(double t) const
{
    if (oscillation.dim() == 0 || frequency == 0.0)
        return constant;
    return constant + std::sin(frequency * t) * oscillation;
}

StateVector JumpMap::operator()(double t, std::size_t mark) const
{
    if (mark >= base.size())
        throw std::out_of_range("jump map: mark index out of range");
    if (oscillation.empty() || frequency == 0.0)
        return base[mark];
    return base[mark] + std::sin(frequency * t) * oscillation[mark];
}

JumpMap JumpMap::scaled(double factor) const
{
    JumpMap out(*this);
    for (auto& b : out.base)
        b *= factor;
    for (auto& o : out.oscillation)
        o *= factor;
    return out;
}

bool JumpMap::is_zero() const
{
    for (const auto& b : base)
        if (norm_squared(b) != 0.0)
            return false;
    for (const auto& o : oscillation)
        if (norm_squared(o) != 0.0)
            return false;
    return true;
}

}  // namespace sconv
