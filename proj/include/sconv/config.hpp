#pragma once

#include "sconv/inequalities.hpp"
#include "sconv/solver.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sconv {

/// Malformed or inconsistent configuration. The message names the source
/// and either a line/column (syntax) or a JSON pointer (field).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ScenarioKind { convolution, equation };

struct PathwiseSettings {
    std::vector<double> p{2.0, 3.0, 4.0};
    /// Replace the configured scenario by `paths` randomly generated ones.
    bool random_battery = false;
    /// Also run the O(h) left-endpoint quadrature and report its refinement sweep.
    bool left_endpoint_diagnostic = false;
    /// Per-node slack CSVs are written for the first this-many cases.
    std::size_t csv_cases = 20;
};

struct MomentSettings {
    std::vector<double> intensity{0.25, 0.5, 1.0, 2.0, 4.0};
    std::vector<double> scaling{0.5, 1.0, 2.0};
    std::vector<double> burkholder_p{2.0, 4.0};
    std::vector<double> bichteler_p{1.0, 1.5, 2.0, 3.0};
    double bdg_p = 1.0;
    std::vector<double> bdg_k{0.1, 1.0, 10.0};
    double bdg_x_weight = 1.0;
};

struct PicardSettings {
    std::size_t iterations = 8;
    std::size_t cross_check_paths = 20;
    std::size_t cross_check_iterations = 40;
};

struct ExperimentConfig {
    std::string scenario;
    std::string description;
    ScenarioKind kind = ScenarioKind::convolution;
    std::uint64_t seed = 1;
    std::size_t paths = 100;
    unsigned workers = 1;
    std::size_t cells = 32;
    std::size_t levels = 3;
    std::filesystem::path out_dir;

    std::optional<ConvolutionScenario> convolution;
    std::optional<EquationSpec> equation;
    std::optional<StateVector> y0;

    PathwiseSettings pathwise;
    MomentSettings moments;
    PicardSettings picard;

    /// The resolved configuration (defaults filled in, overrides applied) as JSON text.
    std::string resolved_json;
};

/// Command-line values that replace config fields.
struct ConfigOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> workers;
    std::optional<std::size_t> paths;
    std::optional<std::size_t> grid_levels;
    std::optional<std::filesystem::path> out_dir;
};

ExperimentConfig parse_config(std::string_view text, std::string_view source,
                              const ConfigOverrides& overrides = {});
ExperimentConfig load_config(const std::filesystem::path& path, const ConfigOverrides& overrides = {});

struct BundledScenario {
    std::string_view name;
    std::string_view summary;
    std::string_view json;
};

std::span<const BundledScenario> bundled_scenarios();
/// Throws ConfigError for an unknown name.
ExperimentConfig bundled_config(std::string_view name, const ConfigOverrides& overrides = {});

/// Random convolution scenario for the pathwise battery: d in 1..8, mixed
/// eigenvalue families (alpha may be positive), 1-3 marks with nu in
/// [0.5, 3], oscillating drift and jumps, T in [0.5, 2].
ConvolutionScenario random_convolution_scenario(RngStream& stream);

}  // namespace sconv
