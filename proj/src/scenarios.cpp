#include "sconv/config.hpp"

#include <array>
#include <cmath>

namespace sconv {

namespace {

constexpr std::string_view zero_noise = R"({
  "name": "zero-noise",
  "description": "Convolution with no drift and no jumps; both sides reduce to the semigroup bound.",
  "kind": "convolution",
  "seed": 101,
  "paths": 8,
  "grid": {"cells": 16, "levels": 3},
  "horizon": 1.0,
  "generator": {"family": "laplacian", "dim": 3, "scale": 0.5, "shift": 0.25},
  "marks": [{"label": "a", "nu": 1.0}],
  "x0": [1.0, -0.5, 0.25],
  "pathwise": {"p": [2, 3, 4]}
})";

constexpr std::string_view jump_battery = R"({
  "name": "jump-battery",
  "description": "1000 random convolution scenarios (d <= 8, p in {2,3,4}) refined over three grid levels.",
  "kind": "convolution",
  "seed": 2024,
  "paths": 1000,
  "grid": {"cells": 16, "levels": 3},
  "horizon": 1.0,
  "generator": {"family": "laplacian", "dim": 1, "scale": 1.0},
  "marks": [{"label": "a", "nu": 1.0}],
  "x0": [0.0],
  "pathwise": {"p": [2, 3, 4], "battery": true}
})";

constexpr std::string_view mixed_pathwise = R"({
  "name": "mixed-pathwise",
  "description": "Oscillating drift and time-dependent jumps with a growing mode (alpha > 0).",
  "kind": "convolution",
  "seed": 77,
  "paths": 50,
  "grid": {"cells": 16, "levels": 3},
  "horizon": 1.5,
  "generator": {"eigenvalues": [0.4, -0.5, -2.0, -6.0]},
  "marks": [{"label": "up", "nu": 1.5}, {"label": "down", "nu": 2.5}],
  "x0": [0.5, -1.0, 0.75, 0.2],
  "drift": {"constant": [0.2, -0.1, 0.0, 0.3], "oscillation": [0.5, 0.0, -0.4, 0.1], "frequency": 3.0},
  "jumps": {"base": [[0.3, 0.1, 0.0, -0.2], [-0.2, 0.4, 0.1, 0.0]],
            "oscillation": [[0.1, 0.0, 0.1, 0.0], [0.0, -0.1, 0.0, 0.2]], "frequency": 2.0},
  "pathwise": {"p": [2, 3, 4], "left_endpoint_diagnostic": true}
})";

constexpr std::string_view moment_bounds = R"({
  "name": "moment-bounds",
  "description": "Maximal, Burkholder, L^p and BDG-corollary ratios with intensity and scaling sweeps (alpha = 0).",
  "kind": "convolution",
  "seed": 4242,
  "paths": 10000,
  "grid": {"cells": 32, "levels": 1},
  "horizon": 1.0,
  "generator": {"eigenvalues": [0.0, -1.0, -3.0]},
  "marks": [{"label": "a", "nu": 1.0}, {"label": "b", "nu": 2.0}],
  "x0": [0.0, 0.0, 0.0],
  "jumps": {"base": [[0.5, -0.2, 0.1], [-0.3, 0.4, 0.2]]},
  "moments": {"intensity": [0.25, 0.5, 1, 2, 4], "scaling": [0.5, 1, 2],
              "burkholder_p": [2, 4], "bichteler_p": [1, 1.5, 2, 3],
              "bdg_p": 1, "bdg_k": [0.1, 1, 10]}
})";

constexpr std::string_view moment_zero = R"({
  "name": "moment-zero",
  "description": "Jump integrand identically zero: every ratio is flagged degenerate.",
  "kind": "convolution",
  "seed": 5,
  "paths": 200,
  "grid": {"cells": 16, "levels": 1},
  "horizon": 1.0,
  "generator": {"eigenvalues": [0.0, -1.0]},
  "marks": [{"label": "a", "nu": 1.0}],
  "x0": [0.0, 0.0],
  "jumps": {"base": [[0.0, 0.0]]}
})";

constexpr std::string_view ou_jump = R"({
  "name": "ou-jump",
  "description": "d = 1, a = -1, no drift, additive unit jumps: the solution has a closed form.",
  "kind": "equation",
  "seed": 9,
  "paths": 5,
  "grid": {"cells": 64, "levels": 4},
  "horizon": 2.0,
  "p": 2,
  "generator": {"eigenvalues": [-1.0]},
  "marks": [{"label": "unit", "nu": 2.0}],
  "x0": [1.0],
  "drift": {"family": "affine", "b": [0.0], "L": [[0.0]]},
  "jumps": {"gamma": [0.0], "beta": [[1.0]]}
})";

constexpr std::string_view lipschitz_small_t = R"({
  "name": "lipschitz-small-T",
  "description": "Affine drift with multiplicative jumps on a short horizon (C1 T < 1).",
  "kind": "equation",
  "seed": 31,
  "paths": 1000,
  "grid": {"cells": 32, "levels": 2},
  "horizon": 0.5,
  "p": 2,
  "generator": {"family": "laplacian", "dim": 2, "scale": 0.5},
  "marks": [{"label": "a", "nu": 1.0}, {"label": "b", "nu": 1.5}],
  "x0": {"mean": [1.0, -0.5], "stddev": 0.2, "radius": 1.0},
  "drift": {"family": "affine", "b": [0.2, -0.1], "L": [[-0.3, 0.2], [0.1, -0.4]]},
  "jumps": {"gamma": [0.4, -0.3], "beta": [[0.2, 0.0], [0.0, 0.1]]},
  "picard": {"iterations": 8, "cross_check_paths": 20, "cross_check_iterations": 40}
})";

constexpr std::string_view stability_affine_additive = R"({
  "name": "stability-affine-additive",
  "description": "Additive noise and linear drift mu x: the difference decays at exactly p(a + mu).",
  "kind": "equation",
  "seed": 17,
  "paths": 200,
  "grid": {"cells": 40, "levels": 1},
  "horizon": 2.0,
  "p": 2,
  "generator": {"eigenvalues": [-1.0]},
  "marks": [{"label": "a", "nu": 1.0}],
  "x0": [1.0],
  "y0": [-1.0],
  "drift": {"family": "affine", "b": [0.0], "L": [[-0.5]]},
  "jumps": {"gamma": [0.0], "beta": [[0.5]]}
})";

constexpr std::string_view stability_cubic = R"({
  "name": "stability-cubic",
  "description": "Monotone cubic drift with multiplicative jumps and negative stability exponent.",
  "kind": "equation",
  "seed": 23,
  "paths": 10000,
  "grid": {"cells": 50, "levels": 1},
  "horizon": 1.0,
  "p": 2,
  "generator": {"family": "laplacian", "dim": 3, "scale": 1.0},
  "marks": [{"label": "a", "nu": 1.0}, {"label": "b", "nu": 1.0}],
  "x0": [1.0, -0.5, 0.5],
  "y0": [-0.5, 1.0, 0.0],
  "drift": {"family": "cubic", "mu": -0.5, "c": 1.0, "radius": 10.0},
  "jumps": {"gamma": [0.3, 0.2], "beta": [[0.1, 0.0, 0.0], [0.0, -0.1, 0.05]]}
})";

constexpr std::array<BundledScenario, 9> library{{
    {"zero-noise", "pathwise check without noise", zero_noise},
    {"jump-battery", "random pathwise battery", jump_battery},
    {"mixed-pathwise", "pathwise check, oscillating drift and jumps", mixed_pathwise},
    {"moment-bounds", "moment-bound ratios and sweeps", moment_bounds},
    {"moment-zero", "degenerate moment ratios", moment_zero},
    {"ou-jump", "closed-form jump OU solve", ou_jump},
    {"lipschitz-small-T", "Picard iteration diagnostics", lipschitz_small_t},
    {"stability-affine-additive", "exact stability rate", stability_affine_additive},
    {"stability-cubic", "cubic drift stability", stability_cubic},
}};

StateVector normal_vector(RngStream& stream, std::size_t dim, double scale)
{
    StateVector v(dim);
    for (std::size_t i = 0; i < dim; ++i)
        v[i] = scale * stream.normal();
    return v;
}

}  // namespace

std::span<const BundledScenario> bundled_scenarios()
{
    return library;
}

ExperimentConfig bundled_config(std::string_view name, const ConfigOverrides& overrides)
{
    for (const auto& s : library) {
        if (s.name == name)
            return parse_config(s.json, std::string("bundled:") + std::string(name), overrides);
    }
    throw ConfigError("unknown scenario '" + std::string(name) + "' (see list-scenarios)");
}

ConvolutionScenario random_convolution_scenario(RngStream& stream)
{
    const auto d = static_cast<std::size_t>(stream.uniform_int(1, 8));

    std::vector<double> eigenvalues(d);
    switch (stream.uniform_int(0, 2)) {
    case 0: {
        const double scale = stream.uniform(0.1, 2.0);
        const double shift = stream.uniform(-0.5, 1.0);
        for (std::size_t i = 0; i < d; ++i) {
            const double k = static_cast<double>(i + 1);
            eigenvalues[i] = shift - scale * k * k;
        }
        break;
    }
    case 1:
        for (double& a : eigenvalues)
            a = stream.uniform(-5.0, 1.0);
        break;
    default:
        for (double& a : eigenvalues)
            a = stream.uniform(-0.5, 0.5);
        break;
    }

    const auto m = static_cast<std::size_t>(stream.uniform_int(1, 3));
    std::vector<double> nu(m);
    for (double& v : nu)
        v = stream.uniform(0.5, 3.0);

    JumpMap jumps;
    const double jump_scale = stream.uniform(0.1, 2.0);
    for (std::size_t j = 0; j < m; ++j) {
        jumps.base.push_back(normal_vector(stream, d, jump_scale));
        jumps.oscillation.push_back(normal_vector(stream, d, 0.5 * jump_scale));
    }
    jumps.frequency = stream.uniform(0.0, 6.0);

    OscillatingField drift{normal_vector(stream, d, stream.uniform(0.0, 1.0)),
                           normal_vector(stream, d, stream.uniform(0.0, 1.0)), stream.uniform(0.0, 6.0)};

    ConvolutionScenario s{"random", DiagonalGenerator(std::move(eigenvalues)), MarkSpace(std::move(nu)),
                          std::move(jumps), std::move(drift), normal_vector(stream, d, stream.uniform(0.0, 2.0)),
                          stream.uniform(0.5, 2.0)};
    return s;
}

}  // namespace sconv
