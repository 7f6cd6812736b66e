#include "sconv/parallel.hpp"
#include "sconv/solver.hpp"

#include <algorithm>
#include <cmath>

namespace sconv {

namespace {

/// X^0_t = S_t X0 at every node.
VectorCadlagPath semigroup_path(const DiagonalGenerator& gen, const TimeGrid& grid, const StateVector& x0)
{
    VectorCadlagPath out;
    for (double t : grid.nodes()) {
        StateVector v = apply_semigroup(gen, t, x0);
        out.push(t, v, v, false);
    }
    return out;
}

StateVector ensemble_initial(const EquationSpec& spec, std::uint64_t seed, std::size_t index)
{
    RngStream stream = derive_stream(seed, index, StreamPurpose::initial_condition);
    return spec.initial.sample(stream);
}

/// Below this fraction of h^0 the increments are dominated by roundoff.
constexpr double roundoff_floor = 1e-24;

}  // namespace

bool PicardDiagnostics::ratio_test_passed() const
{
    return std::all_of(iterations.begin(), iterations.end(), [](const PicardIterate& it) { return it.ratio_ok; });
}

PicardResult picard_solve(const EquationSpec& spec, std::size_t iterations, const EnsembleSettings& ensemble)
{
    spec.validate();
    if (iterations == 0)
        throw std::invalid_argument("picard_solve needs at least one iteration");
    if (ensemble.paths == 0 || ensemble.cells == 0)
        throw std::invalid_argument("picard_solve needs paths and cells");

    const HypothesisConstants constants =
        hypothesis_constants(spec.drift, spec.jump, spec.marks, spec.p, ensemble.seed);
    const double p = spec.p;
    const double horizon = spec.horizon;
    const double alpha = spec.gen.alpha();

    PicardDiagnostics diag;
    diag.p = p;
    diag.horizon = horizon;
    diag.beta = p * constants.monotonicity + 0.5 * (p - 1.0) * (p - 2.0) * constants.jump_lipschitz;
    diag.gamma_iter = 0.5 * (p - 1.0) * (2.0 * constants.jump_lipschitz + p * constants.jump_p_lipschitz);
    diag.c1 = diag.gamma_iter * std::exp(diag.beta * horizon);

    struct Member {
        MarkedJumpPath noise;
        TimeGrid grid;
        StateVector x0;
    };
    std::vector<Member> members = parallel_map(ensemble.paths, ensemble.workers, [&](std::size_t i) {
        MarkedJumpPath noise = ensemble_noise(spec, ensemble.seed, i);
        TimeGrid grid = TimeGrid::jump_adapted(horizon, ensemble.cells, noise);
        return Member{std::move(noise), std::move(grid), ensemble_initial(spec, ensemble.seed, i)};
    });

    std::vector<VectorCadlagPath> previous = parallel_map(ensemble.paths, ensemble.workers, [&](std::size_t i) {
        return semigroup_path(spec.gen, members[i].grid, members[i].x0);
    });

    const double paths = static_cast<double>(ensemble.paths);
    int consecutive_increases = 0;
    double h_first = 0.0;
    for (std::size_t n = 0; n < iterations; ++n) {
        std::vector<VectorCadlagPath> current =
            parallel_map(ensemble.paths, ensemble.workers, [&](std::size_t i) {
                return solve_with_frozen_noise(spec, members[i].noise, members[i].grid, members[i].x0,
                                               previous[i]);
            });

        double h = 0.0;
        for (std::size_t i = 0; i < ensemble.paths; ++i)
            h += norm_pow(current[i].right.back() - previous[i].right.back(), p);
        h = h / paths * std::exp(-p * alpha * horizon);

        if (n == 0) {
            double c0 = 0.0;
            for (std::size_t i = 0; i < ensemble.paths; ++i) {
                double sup = 0.0;
                for (std::size_t k = 0; k < current[i].size(); ++k) {
                    const double w = std::exp(-p * alpha * current[i].times[k]);
                    sup = std::max(sup, w * (norm_pow(current[i].right[k], p) + norm_pow(previous[i].right[k], p)));
                }
                c0 += sup;
            }
            diag.c0 = std::pow(2.0, p) * c0 / paths;
            h_first = h;
        }

        PicardIterate it;
        it.n = n;
        it.h = h;
        it.bound = diag.c0 * std::pow(diag.c1 * horizon, static_cast<double>(n)) / std::tgamma(static_cast<double>(n) + 1.0);
        if (n > 0) {
            const double prev_h = diag.iterations.back().h;
            const double floor = roundoff_floor * h_first;
            it.ratio = prev_h > 0.0 ? h / prev_h : 0.0;
            it.ratio_bound = diag.c1 * horizon / static_cast<double>(n);
            const bool resolved = prev_h > floor && h > floor;
            it.ratio_checked = n >= 3 && resolved;
            if (it.ratio_checked)
                it.ratio_ok = it.ratio <= diag.ratio_margin * it.ratio_bound;
            if (resolved && h > prev_h) {
                if (++consecutive_increases >= 3) {
                    diag.iterations.push_back(it);
                    throw PicardDivergence("Picard increments grew three iterations in a row", diag);
                }
            } else {
                consecutive_increases = 0;
            }
        }
        diag.iterations.push_back(it);
        previous = std::move(current);
    }

    PicardResult result;
    result.paths = std::move(previous);
    result.noise.reserve(members.size());
    for (auto& m : members)
        result.noise.push_back(std::move(m.noise));
    result.diagnostics = std::move(diag);
    return result;
}

bool SolverCrossCheck::within_band() const
{
    return distance <= direct_refinement + picard_refinement + 1e-13;
}

SolverCrossCheck picard_direct_cross_check(const EquationSpec& spec, std::size_t iterations,
                                           const EnsembleSettings& ensemble)
{
    spec.validate();
    struct PathCheck {
        double distance, direct_refinement, picard_refinement;
    };
    auto picard_limit = [&](const MarkedJumpPath& noise, const TimeGrid& grid, const StateVector& x0) {
        VectorCadlagPath x = semigroup_path(spec.gen, grid, x0);
        for (std::size_t n = 0; n < iterations; ++n)
            x = solve_with_frozen_noise(spec, noise, grid, x0, x);
        return x;
    };
    const auto checks = parallel_map(ensemble.paths, ensemble.workers, [&](std::size_t i) {
        const MarkedJumpPath noise = ensemble_noise(spec, ensemble.seed, i);
        const StateVector x0 = ensemble_initial(spec, ensemble.seed, i);
        const TimeGrid coarse = TimeGrid::jump_adapted(spec.horizon, ensemble.cells, noise);
        const TimeGrid fine = TimeGrid::jump_adapted(spec.horizon, 2 * ensemble.cells, noise);
        const VectorCadlagPath direct_coarse = direct_solve(spec, noise, coarse, x0);
        const VectorCadlagPath direct_fine = direct_solve(spec, noise, fine, x0);
        const VectorCadlagPath picard_coarse = picard_limit(noise, coarse, x0);
        const VectorCadlagPath picard_fine = picard_limit(noise, fine, x0);
        return PathCheck{sup_distance(picard_coarse, direct_coarse), sup_distance(direct_coarse, direct_fine),
                         sup_distance(picard_coarse, picard_fine)};
    });

    SolverCrossCheck out;
    out.paths = ensemble.paths;
    for (const auto& c : checks) {
        out.distance = std::max(out.distance, c.distance);
        out.direct_refinement = std::max(out.direct_refinement, c.direct_refinement);
        out.picard_refinement = std::max(out.picard_refinement, c.picard_refinement);
    }
    return out;
}

}  // namespace sconv
