#pragma once

#include "sconv/convolution.hpp"
#include "sconv/hilbert.hpp"
#include "sconv/levy.hpp"
#include "sconv/statistics.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace sconv {

/// How the absolutely continuous part of the stochastic integral is integrated.
///
/// `adaptive_gauss` integrates the exact intra-cell trajectory of the
/// convolution, so the only error left is roundoff. `left_endpoint` freezes
/// the integrand at the cell's left node and has O(h) error.
enum class DriftQuadrature { adaptive_gauss, left_endpoint };

struct PathwiseTerms {
    double initial = 0.0;          // e^{p alpha t} ‖X0‖^p
    double drift = 0.0;            // p int e^{p alpha (t-s)} ‖X‖^{p-2} <X, g> ds
    double jump_linear = 0.0;      // sum e^{p alpha (t-s)} p ‖X(s-)‖^{p-2} <X(s-), ΔZ(s)>
    double continuous_qv = 0.0;    // [M]^c term; no continuous martingale part exists here
    double jump_correction = 0.0;  // sum e^{p alpha (t-s)} (‖X(s)‖^p - ‖X(s-)‖^p - p‖X(s-)‖^{p-2}<X(s-),ΔX(s)>)
};

struct PathwiseNode {
    double time = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;
    /// Sum of magnitudes of everything entering lhs and rhs; sets the roundoff floor.
    double scale = 0.0;
    PathwiseTerms terms;
};

/// Relative roundoff allowance applied on top of the discretization tolerance.
inline constexpr double pathwise_roundoff = 1e-12;

struct PathwiseReport {
    double p = 2.0;
    std::vector<PathwiseNode> nodes;

    double min_slack() const;
    /// Nodes with slack < -(eps + pathwise_roundoff * scale).
    std::size_t violations(double eps) const;
    bool holds(double eps) const { return violations(eps) == 0; }
};

/// Both sides of the p-th power Itô-type inequality at every node of X.
///
/// X must be the convolution of (gen, X(0), z) on a jump-adapted grid. The
/// jump sets of X and z must coincide and ΔX = ΔZ at every jump; otherwise
/// std::invalid_argument is thrown. p < 2 throws std::domain_error.
PathwiseReport check_pth_power_ito(const VectorCadlagPath& x, const SemimartingaleDecomposition& z,
                                   const DiagonalGenerator& gen, double p,
                                   DriftQuadrature quadrature = DriftQuadrature::adaptive_gauss);

/// p = 2 form with the quadratic variation [Z] written out (its value is
/// stored in terms.jump_correction).
PathwiseReport check_ito_p2(const VectorCadlagPath& x, const SemimartingaleDecomposition& z,
                            const DiagonalGenerator& gen,
                            DriftQuadrature quadrature = DriftQuadrature::adaptive_gauss);

/// int_{t0}^{t1} w(s, X(s)) ds where X(t0 + tau) = S_tau x_start + tau phi1(tau A) g,
/// by adaptive Gauss-Legendre on the exact trajectory.
double integrate_cell(const DiagonalGenerator& gen, const StateVector& x_start, const StateVector& g,
                      double t0, double t1,
                      const std::function<double(double, const StateVector&)>& integrand);

struct TaylorCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = true;
};

/// ‖x+y‖^p - ‖x‖^p - p‖x‖^{p-2}<x,y>  <=  p(p-1)/2 (‖x‖^{p-2} + ‖x+y‖^{p-2}) ‖y‖².
TaylorCheck check_taylor_lemma(const StateVector& x, const StateVector& y, double p);

/// Convolution scenario: X = S_t x0 + int S_{t-s} dZ with Z built from the
/// drift density and the jump map over a freshly sampled Poisson measure.
struct ConvolutionScenario {
    std::string name;
    DiagonalGenerator gen;
    MarkSpace marks;
    JumpMap jumps;
    OscillatingField drift;
    StateVector x0;
    double horizon = 1.0;

    SemimartingaleDecomposition decomposition(MarkedJumpPath path) const;
    ConvolutionScenario with_intensity(double factor) const;
    ConvolutionScenario with_jump_scale(double factor) const;
};

/// Slack summary of one pathwise scenario at one grid level.
struct RefinementLevel {
    std::size_t cells = 0;
    double h = 0.0;
    double min_slack = 0.0;
    double eps = 0.0;
    std::size_t violations = 0;
    std::size_t nodes = 0;
    /// max over nodes of |slack(pth, p=2) - slack(ito_p2)| / max(1, scale); only filled when p == 2.
    double p2_discrepancy = 0.0;
};

struct RefinementSweep {
    double p = 2.0;
    /// eps(h) = c h with c = 10 |min_slack(h0) - min_slack(h0/2)| / h0.
    double c = 0.0;
    std::vector<RefinementLevel> levels;

    /// Violation counts never increase, drop strictly while positive, and
    /// reach zero at the finest level.
    bool refines_to_zero() const;
};

/// Runs the p-th power checker on grids with base_cells * 2^l cells,
/// l = 0..levels-1, for one fixed realization of the jump measure.
RefinementSweep pathwise_refinement(const ConvolutionScenario& scenario, const MarkedJumpPath& path,
                                    double p, std::size_t base_cells, std::size_t levels,
                                    DriftQuadrature quadrature = DriftQuadrature::adaptive_gauss);

struct MonteCarloSettings {
    std::size_t paths = 1000;
    std::uint64_t seed = 1;
    std::size_t cells = 64;
    unsigned workers = 1;
};

/// E sup_t ‖int_0^t S_{t-s} dM‖² / (e^{4 alpha T} E[M]_T). Requires alpha >= 0.
RatioEstimate estimate_kotelenez_ratio(const ConvolutionScenario& scenario, const MonteCarloSettings& mc);

/// E sup_t ‖int_0^t S_{t-s} dM‖^p / E[M]_T^{p/2}. Requires a contraction
/// generator (alpha <= 0) and p >= 2.
RatioEstimate estimate_burkholder_ratio(const ConvolutionScenario& scenario, double p,
                                        const MonteCarloSettings& mc);

/// E sup_t ‖int int k dÑ‖^p / (E (int int ‖k‖ nu ds)^p + E int int ‖k‖^p nu ds), p >= 1.
RatioEstimate estimate_bichteler_jacod(const ConvolutionScenario& scenario, double p,
                                       const MonteCarloSettings& mc);

struct BdgBound {
    double k = 1.0;
    double rhs = 0.0;              // E(X*)^{2p} / (2K) + K E[M]^p / 2
    double implied_constant = 0.0; // E sup|int <X,dM>|^p / rhs
    bool am_gm_holds = true;       // E (X*)^p [M]^{p/2} <= rhs
};

struct BdgCorollaryReport {
    double p = 1.0;
    /// E sup|int <X,dM>|^p / E (X*)^p [M]_T^{p/2}; its ratio is the implied BDG constant.
    RatioEstimate middle;
    double moment_sup_2p = 0.0;  // E (X*)^{2p}
    double moment_qv_p = 0.0;    // E [M]_T^p
    std::vector<BdgBound> bounds;
};

/// X is `x_weight` times the convolution path of M (adapted; zero when
/// x_weight = 0) and X* is its pathwise running supremum of the norm.
BdgCorollaryReport check_bdg_corollary(const ConvolutionScenario& scenario, double p,
                                       const std::vector<double>& k_values,
                                       const MonteCarloSettings& mc, double x_weight = 1.0);

}  // namespace sconv
