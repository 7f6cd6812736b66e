#include "sconv/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sconv {

namespace {

StateVector compensator(const EquationSpec& spec, const StateVector& noise_state)
{
    StateVector out(noise_state.dim());
    if (spec.jump.is_zero())
        return out;
    for (std::size_t j = 0; j < spec.marks.size(); ++j)
        out -= spec.marks.nu(j) * spec.jump(j, noise_state);
    return out;
}

StateVector implicit_cell(const EquationSpec& spec, const DiagonalGenerator& folded, double t1, double h,
                          const StateVector& start, const StateVector& comp, StateVector guess)
{
    constexpr double damping = 0.5;
    for (int it = 0; it < 200; ++it) {
        const StateVector target =
            exponential_euler_step(folded, h, start, spec.drift.remainder(t1, guess) + comp);
        StateVector next = (1.0 - damping) * guess + damping * target;
        const double change = norm(next - guess);
        guess = std::move(next);
        if (change <= 1e-14 * (1.0 + norm(guess)))
            break;
    }
    return guess;
}

/// Shared time stepper; the noise coefficient reads `noise_state` when given, X otherwise.
VectorCadlagPath step_equation(const EquationSpec& spec, const MarkedJumpPath& prm, const TimeGrid& grid,
                               const StateVector& x0, const VectorCadlagPath* noise_state)
{
    if (x0.dim() != spec.gen.dim())
        throw std::invalid_argument("initial value dimension does not match the generator");
    require_jump_adapted(grid, prm);
    if (noise_state && noise_state->times != std::vector<double>(grid.nodes().begin(), grid.nodes().end()))
        throw std::invalid_argument("frozen noise state must live on the same grid");

    const DiagonalGenerator folded = spec.gen.shifted(spec.drift.diagonal_part());
    VectorCadlagPath out;
    out.times.reserve(grid.size());
    out.push(0.0, x0, x0, false);
    std::size_t next_event = 0;
    for (std::size_t k = 1; k < grid.size(); ++k) {
        const double t0 = grid[k - 1];
        const double t1 = grid[k];
        const double h = t1 - t0;
        const StateVector& start = out.right.back();
        const StateVector comp = compensator(spec, noise_state ? noise_state->right[k - 1] : start);
        StateVector left = exponential_euler_step(folded, h, start, spec.drift.remainder(t0, start) + comp);
        if (spec.scheme == DriftScheme::implicit_fixed_point)
            left = implicit_cell(spec, folded, t1, h, start, comp, std::move(left));

        if (next_event < prm.events.size() && prm.events[next_event].time == t1) {
            const std::size_t mark = prm.events[next_event++].mark;
            const StateVector& noise_left = noise_state ? noise_state->left[k] : left;
            StateVector right = left + spec.jump(mark, noise_left);
            out.push(t1, std::move(left), std::move(right), true);
        } else {
            StateVector right = left;
            out.push(t1, std::move(left), std::move(right), false);
        }
    }
    return out;
}

}  // namespace

void EquationSpec::validate() const
{
    const std::size_t d = gen.dim();
    if (drift.dim != d)
        throw std::invalid_argument("drift dimension does not match the generator");
    if (drift.family == DriftFamily::affine && (drift.offset.dim() != d || drift.linear.dim() != d))
        throw std::invalid_argument("affine drift dimension does not match the generator");
    if (jump.marks() != marks.size() || jump.beta.size() != marks.size())
        throw std::invalid_argument("jump coefficient needs one (gamma, beta) per mark");
    for (const auto& b : jump.beta) {
        if (b.dim() != d)
            throw std::invalid_argument("jump offset dimension does not match the generator");
    }
    if (initial.mean.dim() != d)
        throw std::invalid_argument("initial condition dimension does not match the generator");
    if (!(horizon > 0.0) || !std::isfinite(horizon))
        throw std::invalid_argument("horizon must be positive and finite");
    if (!(p >= 2.0))
        throw std::invalid_argument("equation exponent p must be >= 2");
}

VectorCadlagPath direct_solve(const EquationSpec& spec, const MarkedJumpPath& prm, const TimeGrid& grid,
                              const StateVector& x0)
{
    return step_equation(spec, prm, grid, x0, nullptr);
}

VectorCadlagPath direct_solve(const EquationSpec& spec, const MarkedJumpPath& prm, const TimeGrid& grid,
                              RngStream& stream)
{
    return step_equation(spec, prm, grid, spec.initial.sample(stream), nullptr);
}

VectorCadlagPath solve_with_frozen_noise(const EquationSpec& spec, const MarkedJumpPath& prm,
                                         const TimeGrid& grid, const StateVector& x0,
                                         const VectorCadlagPath& noise_state)
{
    return step_equation(spec, prm, grid, x0, &noise_state);
}

VectorCadlagPath additive_closed_form(const EquationSpec& spec, const MarkedJumpPath& prm,
                                      const TimeGrid& grid, const StateVector& x0)
{
    const bool constant_drift =
        spec.drift.family == DriftFamily::affine && spec.drift.linear.operator_norm() == 0.0;
    if (!constant_drift || !spec.jump.is_additive())
        throw std::invalid_argument("closed form needs a constant drift and additive jumps");
    require_jump_adapted(grid, prm);

    const std::size_t d = spec.gen.dim();
    // constant forcing: drift offset plus compensator of the additive jumps
    StateVector forcing(spec.drift.offset);
    for (std::size_t j = 0; j < spec.marks.size(); ++j)
        forcing -= spec.marks.nu(j) * spec.jump.beta[j];

    VectorCadlagPath out;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double t = grid[k];
        StateVector value(d);
        for (std::size_t i = 0; i < d; ++i) {
            const double a = spec.gen.eigenvalue(i);
            value[i] = std::exp(a * t) * x0[i] + t * phi1(a * t) * forcing[i];
        }
        StateVector jump_here(d);
        bool jumped = false;
        for (const auto& e : prm.events) {
            if (e.time > t)
                break;
            for (std::size_t i = 0; i < d; ++i)
                value[i] += std::exp(spec.gen.eigenvalue(i) * (t - e.time)) * spec.jump.beta[e.mark][i];
            if (e.time == t) {
                jump_here = spec.jump.beta[e.mark];
                jumped = true;
            }
        }
        out.push(t, value - jump_here, value, jumped);
    }
    return out;
}

double sup_distance(const VectorCadlagPath& coarse, const VectorCadlagPath& fine)
{
    double worst = 0.0;
    for (std::size_t k = 0; k < coarse.size(); ++k)
        worst = std::max(worst, norm(coarse.right[k] - fine.at(coarse.times[k])));
    return worst;
}

MarkedJumpPath ensemble_noise(const EquationSpec& spec, std::uint64_t seed, std::size_t index)
{
    RngStream stream = derive_stream(seed, index, StreamPurpose::jumps);
    return sample_prm(spec.marks, spec.horizon, stream);
}

}  // namespace sconv
