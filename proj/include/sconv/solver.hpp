#pragma once

#include "sconv/convolution.hpp"
#include "sconv/hilbert.hpp"
#include "sconv/levy.hpp"
#include "sconv/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sconv {

/// Row-major square matrix acting on StateVector coordinates.
class SquareMatrix {
public:
    SquareMatrix() = default;
    explicit SquareMatrix(std::size_t dim) : dim_(dim), entries_(dim * dim, 0.0) {}
    explicit SquareMatrix(std::vector<std::vector<double>> rows);

    static SquareMatrix diagonal(std::span<const double> values);

    std::size_t dim() const noexcept { return dim_; }
    double operator()(std::size_t i, std::size_t j) const { return entries_[i * dim_ + j]; }
    double& operator()(std::size_t i, std::size_t j) { return entries_[i * dim_ + j]; }
    StateVector apply(const StateVector& x) const;
    std::vector<std::vector<double>> rows() const;

    /// Largest eigenvalue of (L + L^T) / 2.
    double max_symmetric_eigenvalue() const;
    /// Spectral norm ‖L‖_2.
    double operator_norm() const;

private:
    std::size_t dim_ = 0;
    std::vector<double> entries_;
};

enum class DriftFamily { affine, cubic, custom };

using DriftField = std::function<StateVector(double, const StateVector&)>;

/// Drift f(t, x) of the semilinear equation.
///
/// affine: f(x) = b + L x. cubic: f(x) = mu x - c x^3 (componentwise cube,
/// c >= 0). custom: any field; its constants are estimated by sampling.
struct DriftSpec {
    DriftFamily family = DriftFamily::affine;
    std::size_t dim = 0;
    StateVector offset;     // affine b
    SquareMatrix linear;    // affine L
    double mu = 0.0;        // cubic
    double cubic = 0.0;     // cubic c
    /// Cubic coefficients are only linearly bounded on a ball; this is its radius.
    double growth_radius = 10.0;
    DriftField field;       // custom

    static DriftSpec affine(StateVector b, SquareMatrix l);
    static DriftSpec monotone_cubic(std::size_t dim, double mu, double c, double growth_radius = 10.0);
    static DriftSpec custom(std::size_t dim, DriftField f, double sample_radius = 10.0);

    StateVector operator()(double t, const StateVector& x) const;
    /// Diagonal linear part folded into the exponential integrator.
    std::vector<double> diagonal_part() const;
    /// f(t, x) minus the diagonal part applied to x.
    StateVector remainder(double t, const StateVector& x) const;
    bool is_zero() const;
};

/// Per-mark affine jump coefficient k(j, x) = gamma_j x + beta_j.
struct JumpCoefficientSpec {
    std::vector<double> gamma;
    std::vector<StateVector> beta;

    static JumpCoefficientSpec none(std::size_t marks, std::size_t dim);

    std::size_t marks() const noexcept { return gamma.size(); }
    StateVector operator()(std::size_t mark, const StateVector& x) const;
    bool is_additive() const;
    bool is_zero() const;
};

/// Constants of the standing hypotheses on (f, k):
///   (a) <f(x)-f(y), x-y> <= M ‖x-y‖²
///   (b) int ‖k(x)-k(y)‖² nu <= C ‖x-y‖²
///   (c) ‖f(x)‖² + int ‖k(x)‖² nu <= D (1 + ‖x‖²),  D = D_f + D_k
///   (d) int ‖k(x)-k(y)‖^p nu <= F_lip ‖x-y‖^p,  int ‖k(x)‖^p nu <= F_growth (1 + ‖x‖^p)
struct HypothesisConstants {
    double p = 2.0;
    double monotonicity = 0.0;  // M
    double jump_lipschitz = 0.0;  // C
    double drift_growth = 0.0;  // D_f
    double jump_growth = 0.0;   // D_k
    double growth() const { return drift_growth + jump_growth; }  // D
    double jump_p_lipschitz = 0.0;  // F_lip
    double jump_p_growth = 0.0;     // F_growth
    double jump_p() const;          // F = max(F_lip, F_growth)
    /// True when M and D_f were estimated by sampling (custom drift).
    bool estimated = false;
    /// D_f only holds on ‖x‖ <= growth_radius (cubic drift); infinity otherwise.
    double growth_radius = 0.0;
};

/// Thrown when a custom drift shows no finite one-sided Lipschitz constant
/// or no finite linear-growth constant on the sampled region.
class HypothesisViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

HypothesisConstants hypothesis_constants(const DriftSpec& drift, const JumpCoefficientSpec& jump,
                                         const MarkSpace& marks, double p, std::uint64_t seed = 1);

struct AuditCheck {
    std::string name;
    std::size_t violations = 0;
    double worst_ratio = 0.0;  // max of lhs / rhs over sampled pairs
};

struct HypothesisAudit {
    std::size_t pairs = 0;
    std::vector<AuditCheck> checks;
    bool passed() const;
};

/// Samples `pairs` random (x, y) (inside growth_radius for cubic drift) and
/// checks every hypothesis inequality with the given constants, allowing
/// 1e-10 relative slack.
HypothesisAudit audit_hypothesis(const DriftSpec& drift, const JumpCoefficientSpec& jump,
                                 const MarkSpace& marks, const HypothesisConstants& constants,
                                 std::size_t pairs = 10000, std::uint64_t seed = 1);

/// Deterministic point, or Gaussian in coordinates truncated to
/// ‖x - mean‖ <= radius (so every moment is finite).
struct InitialCondition {
    StateVector mean;
    double stddev = 0.0;
    double radius = 0.0;

    static InitialCondition point(StateVector x) { return {std::move(x), 0.0, 0.0}; }
    static InitialCondition gaussian(StateVector mean, double stddev, double radius);

    bool is_deterministic() const noexcept { return stddev == 0.0; }
    StateVector sample(RngStream& stream) const;
};

enum class DriftScheme {
    /// Remainder of f evaluated at the left node.
    explicit_euler,
    /// Remainder of f evaluated at the right node, solved by damped fixed-point iteration.
    implicit_fixed_point,
};

struct EquationSpec {
    DiagonalGenerator gen;
    DriftSpec drift;
    JumpCoefficientSpec jump;
    MarkSpace marks;
    InitialCondition initial;
    double horizon = 1.0;
    double p = 2.0;
    DriftScheme scheme = DriftScheme::explicit_euler;

    void validate() const;
};

/// Mild solution on a jump-adapted grid starting from x0.
///
/// Each cell takes an exponential step with the diagonal part of f folded
/// into the generator; the rest of f and the compensator density
/// -sum_j nu_j k(j, X) are frozen over the cell. At a jump time
/// X(s) = X(s-) + k(xi, X(s-)).
VectorCadlagPath direct_solve(const EquationSpec& spec, const MarkedJumpPath& prm, const TimeGrid& grid,
                              const StateVector& x0);
/// Same, with X0 drawn from spec.initial using `stream`.
VectorCadlagPath direct_solve(const EquationSpec& spec, const MarkedJumpPath& prm, const TimeGrid& grid,
                              RngStream& stream);

/// Drift equation of one Picard step: the noise coefficient is evaluated
/// on `noise_state` (the previous iterate, on the same grid) instead of X.
VectorCadlagPath solve_with_frozen_noise(const EquationSpec& spec, const MarkedJumpPath& prm,
                                         const TimeGrid& grid, const StateVector& x0,
                                         const VectorCadlagPath& noise_state);

/// Closed form for f = 0 and additive jumps: S_t x0 + sum S_{t-s_i} beta_{xi_i}
/// - sum_j nu_j int_0^t S_{t-s} beta_j ds, evaluated at every grid node.
VectorCadlagPath additive_closed_form(const EquationSpec& spec, const MarkedJumpPath& prm,
                                      const TimeGrid& grid, const StateVector& x0);

/// sup over the nodes of `coarse` of ‖coarse(t) - fine(t)‖ (right values);
/// every node of `coarse` must be a node of `fine`.
double sup_distance(const VectorCadlagPath& coarse, const VectorCadlagPath& fine);

struct EnsembleSettings {
    std::size_t paths = 1000;
    std::uint64_t seed = 1;
    std::size_t cells = 64;
    unsigned workers = 1;
};

struct PicardIterate {
    std::size_t n = 0;
    double h = 0.0;            // E‖X^{n+1}_T - X^n_T‖^p e^{-p alpha T}
    double bound = 0.0;        // C0 (C1 T)^n / n!
    double ratio = 0.0;        // h^{n} / h^{n-1}; 0 for n = 0
    double ratio_bound = 0.0;  // C1 T / n
    bool ratio_checked = false;
    bool ratio_ok = true;
};

struct PicardDiagnostics {
    double p = 2.0;
    double horizon = 0.0;
    double beta = 0.0;        // p M + (p-1)(p-2) C / 2
    double gamma_iter = 0.0;  // (p-1)(2C + p F) / 2
    double c0 = 0.0;          // 2^p E sup(‖X^1‖^p + ‖X^0‖^p), rescaled
    double c1 = 0.0;          // gamma_iter e^{beta T}
    /// Allowed ratio h^{n+1}/h^n = ratio_margin * C1 T / (n+1).
    double ratio_margin = 1.5;
    std::vector<PicardIterate> iterations;

    bool ratio_test_passed() const;
};

class PicardDivergence : public std::runtime_error {
public:
    PicardDivergence(const std::string& what, PicardDiagnostics diagnostics)
        : std::runtime_error(what), diagnostics_(std::move(diagnostics))
    {
    }
    const PicardDiagnostics& diagnostics() const noexcept { return diagnostics_; }

private:
    PicardDiagnostics diagnostics_;
};

struct PicardResult {
    std::vector<VectorCadlagPath> paths;  // last iterate per path
    std::vector<MarkedJumpPath> noise;
    PicardDiagnostics diagnostics;
};

/// X^0 = S_t X0; X^n solves the drift equation with noise frozen at X^{n-1}.
/// Every iterate of a path sees the same Poisson realization. Throws
/// PicardDivergence when h^n grows three times in a row.
PicardResult picard_solve(const EquationSpec& spec, std::size_t iterations, const EnsembleSettings& ensemble);

struct SolverCrossCheck {
    std::size_t paths = 0;
    double distance = 0.0;            // max over paths of sup ‖picard - direct‖
    double direct_refinement = 0.0;   // max over paths of sup ‖direct(h) - direct(h/2)‖
    double picard_refinement = 0.0;   // same for the Picard limit
    bool within_band() const;
};

SolverCrossCheck picard_direct_cross_check(const EquationSpec& spec, std::size_t iterations,
                                           const EnsembleSettings& ensemble);

/// Both candidate exponents of the p-th moment stability bound.
struct StabilityRates {
    /// p alpha + p M + p(p-1) C / 2 + p(p-1)((2^{p-2}+1) C + 2^{p-2} F) / 2
    double gamma_stated = 0.0;
    /// The same without the p(p-1) C / 2 term, which multiplies d[M]^c = 0.
    double gamma_without_qv = 0.0;
    double gamma() const { return gamma_stated > gamma_without_qv ? gamma_stated : gamma_without_qv; }
};

StabilityRates stability_rates(const DiagonalGenerator& gen, const HypothesisConstants& constants);

struct StabilityPoint {
    double time = 0.0;
    double mean = 0.0;      // E‖X_t - Y_t‖^p
    double half_width = 0.0;
};

struct StabilityReport {
    double p = 2.0;
    std::size_t paths = 0;
    std::vector<StabilityPoint> series;
    double fitted_rate = 0.0;
    double fit_half_width = 0.0;
    StabilityRates rates;
    bool degenerate = false;  // x0 = y0
    bool passed = false;
};

/// Solves from x0 and y0 with the same Poisson path and grid for each path,
/// fits log E‖X - Y‖^p on the uniform nodes by least squares and passes when
/// the slope is <= gamma + 2 * CI half-width.
StabilityReport stability_experiment(const EquationSpec& spec, const StateVector& x0, const StateVector& y0,
                                     const EnsembleSettings& ensemble);

/// Sample the Poisson path of ensemble member `index`.
MarkedJumpPath ensemble_noise(const EquationSpec& spec, std::uint64_t seed, std::size_t index);

}  // namespace sconv
