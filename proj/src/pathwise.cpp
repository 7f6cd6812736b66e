#include "sconv/inequalities.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iterator>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace sconv {

namespace {

// 5-point Gauss-Legendre nodes/weights on [-1, 1]
constexpr std::array<double, 5> gl_nodes{-0.9061798459386640, -0.5384693101056831, 0.0,
                                         0.5384693101056831, 0.9061798459386640};
constexpr std::array<double, 5> gl_weights{0.2369268850561891, 0.4786286704993665,
                                           0.5688888888888889, 0.4786286704993665,
                                           0.2369268850561891};

struct Quad {
    double value = 0.0;
    double magnitude = 0.0;
};

using CellIntegrand = std::function<double(double, const StateVector&)>;

Quad gauss_panel(const DiagonalGenerator& gen, const StateVector& x_start, const StateVector& g,
                 double t0, double a, double b, const CellIntegrand& f)
{
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    Quad q;
    for (std::size_t i = 0; i < gl_nodes.size(); ++i) {
        const double s = mid + half * gl_nodes[i];
        const double v = f(s, exponential_euler_step(gen, s - t0, x_start, g));
        q.value += gl_weights[i] * v;
        q.magnitude += gl_weights[i] * std::abs(v);
    }
    q.value *= half;
    q.magnitude *= half;
    return q;
}

// `tolerance` is absolute and fixed by the top-level panel: a per-subpanel
// relative test cannot be met where the integrand nearly vanishes and its
// evaluation is dominated by cancellation.
Quad adaptive(const DiagonalGenerator& gen, const StateVector& x_start, const StateVector& g, double t0,
              double a, double b, const CellIntegrand& f, const Quad& whole, double tolerance, int depth)
{
    const double m = 0.5 * (a + b);
    const Quad left = gauss_panel(gen, x_start, g, t0, a, m, f);
    const Quad right = gauss_panel(gen, x_start, g, t0, m, b, f);
    const double refined = left.value + right.value;
    const double magnitude = left.magnitude + right.magnitude;
    if (depth >= 30 || std::abs(refined - whole.value) <= tolerance)
        return {refined, magnitude};
    const Quad l = adaptive(gen, x_start, g, t0, a, m, f, left, tolerance, depth + 1);
    const Quad r = adaptive(gen, x_start, g, t0, m, b, f, right, tolerance, depth + 1);
    return {l.value + r.value, l.magnitude + r.magnitude};
}

/// Zero of the scalar trajectory inside (t0, t1) when its end values differ
/// in sign. The trajectory (x + g/a) e^{a tau} - g/a is monotone, so there is
/// at most one; ‖x‖^{p-2} has its kink there.
std::optional<double> scalar_zero(const DiagonalGenerator& gen, const StateVector& x_start, const StateVector& g,
                                  double t0, double t1)
{
    if (gen.dim() != 1)
        return std::nullopt;
    auto value = [&](double s) { return exponential_euler_step(gen, s - t0, x_start, g)[0]; };
    double lo = t0, hi = t1;
    const double v_lo = value(lo);
    const double v_hi = value(hi);
    if (!(v_lo * v_hi < 0.0))
        return std::nullopt;
    for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi)
            break;
        if ((value(mid) < 0.0) == (v_lo < 0.0))
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

Quad integrate_cell_quad(const DiagonalGenerator& gen, const StateVector& x_start, const StateVector& g,
                         double t0, double t1, const CellIntegrand& f)
{
    double rate = 0.0;
    for (double a : gen.eigenvalues())
        rate = std::max(rate, std::abs(a));
    // panels short enough that the fastest mode changes by at most a factor e
    const auto panels = static_cast<std::size_t>(std::max(1.0, std::ceil((t1 - t0) * rate)));
    std::vector<double> breaks;
    breaks.reserve(panels + 2);
    for (std::size_t i = 0; i < panels; ++i)
        breaks.push_back(t0 + (t1 - t0) * (static_cast<double>(i) / static_cast<double>(panels)));
    breaks.push_back(t1);
    if (const auto zero = scalar_zero(gen, x_start, g, t0, t1)) {
        const auto pos = std::lower_bound(breaks.begin(), breaks.end(), *zero);
        if (*pos != *zero && *std::prev(pos) != *zero)
            breaks.insert(pos, *zero);
    }
    Quad total;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const Quad whole = gauss_panel(gen, x_start, g, t0, breaks[i], breaks[i + 1], f);
        const Quad q =
            adaptive(gen, x_start, g, t0, breaks[i], breaks[i + 1], f, whole, 1e-14 * whole.magnitude + 1e-300, 0);
        total.value += q.value;
        total.magnitude += q.magnitude;
    }
    return total;
}

void validate_inputs(const VectorCadlagPath& x, const SemimartingaleDecomposition& z,
                     const DiagonalGenerator& gen)
{
    if (x.size() == 0 || x.times.front() != 0.0)
        throw std::invalid_argument("pathwise check: path must start at t = 0");
    if (x.dim() != gen.dim() || z.dim != gen.dim())
        throw std::invalid_argument("pathwise check: dimension mismatch");
    for (std::size_t k = 1; k < x.size(); ++k) {
        if (!(x.times[k] > x.times[k - 1]))
            throw std::invalid_argument("pathwise check: path times must increase");
    }
}

/// Returns ΔZ at node k and checks that it matches ΔX; advances the event cursor.
/// Returns false when node k is not a jump of either process.
bool matched_jump(const VectorCadlagPath& x, const SemimartingaleDecomposition& z, std::size_t k,
                  std::size_t& next_event, StateVector& dz)
{
    const bool z_jumps = next_event < z.jumps.events.size() && z.jumps.events[next_event].time == x.times[k];
    if (static_cast<bool>(x.is_jump[k]) != z_jumps) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "jump sets of X and Z differ at t = " << x.times[k];
        throw std::invalid_argument(msg.str());
    }
    if (!z_jumps)
        return false;
    dz = z.jump_at(z.jumps.events[next_event++]);
    const StateVector dx = x.right[k] - x.left[k];
    const double tol = 1e-12 * (norm(x.left[k]) + norm(dz)) + 1e-300;
    if (norm(dx - dz) > tol) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "ΔX != ΔZ at jump time " << x.times[k] << " (difference " << norm(dx - dz) << ")";
        throw std::invalid_argument(msg.str());
    }
    return true;
}

void require_all_events_used(const SemimartingaleDecomposition& z, std::size_t next_event)
{
    if (next_event != z.jumps.events.size())
        throw std::invalid_argument("Z has jumps that are not nodes of X");
}

}  // namespace

double integrate_cell(const DiagonalGenerator& gen, const StateVector& x_start, const StateVector& g,
                      double t0, double t1,
                      const std::function<double(double, const StateVector&)>& integrand)
{
    return integrate_cell_quad(gen, x_start, g, t0, t1, integrand).value;
}

double PathwiseReport::min_slack() const
{
    double best = std::numeric_limits<double>::infinity();
    for (const auto& n : nodes)
        best = std::min(best, n.slack);
    return best;
}

std::size_t PathwiseReport::violations(double eps) const
{
    std::size_t count = 0;
    for (const auto& n : nodes) {
        if (n.slack < -(eps + pathwise_roundoff * n.scale))
            ++count;
    }
    return count;
}

PathwiseReport check_pth_power_ito(const VectorCadlagPath& x, const SemimartingaleDecomposition& z,
                                   const DiagonalGenerator& gen, double p, DriftQuadrature quadrature)
{
    if (!(p >= 2.0))
        throw std::domain_error("p-th power inequality needs p >= 2");
    validate_inputs(x, z, gen);

    const double alpha = gen.alpha();
    const double x0_p = norm_pow(x.right.front(), p);

    PathwiseReport report;
    report.p = p;
    report.nodes.reserve(x.size());
    {
        PathwiseNode n0;
        n0.lhs = x0_p;
        n0.rhs = x0_p;
        n0.terms.initial = x0_p;
        n0.scale = 2.0 * x0_p;
        report.nodes.push_back(n0);
    }

    double drift = 0.0, drift_abs = 0.0;
    double jump_linear = 0.0, jump_linear_abs = 0.0;
    double correction = 0.0, correction_abs = 0.0;
    std::size_t next_event = 0;
    StateVector dz;

    for (std::size_t k = 1; k < x.size(); ++k) {
        const double t0 = x.times[k - 1];
        const double t1 = x.times[k];
        const double h = t1 - t0;
        const double decay = std::exp(p * alpha * h);
        const StateVector g = z.cell_density(t0, t1);
        const StateVector& start = x.right[k - 1];

        Quad cell;
        if (quadrature == DriftQuadrature::adaptive_gauss) {
            cell = integrate_cell_quad(gen, start, g, t0, t1, [&](double s, const StateVector& xs) {
                return std::exp(p * alpha * (t1 - s)) * p * norm_pow(xs, p - 2.0) * inner(xs, g);
            });
        } else {
            const double v = h * decay * p * norm_pow(start, p - 2.0) * inner(start, g);
            cell = {v, std::abs(v)};
        }
        drift = decay * drift + cell.value;
        drift_abs = decay * drift_abs + cell.magnitude;
        jump_linear *= decay;
        jump_linear_abs *= decay;
        correction *= decay;
        correction_abs *= decay;

        if (matched_jump(x, z, k, next_event, dz)) {
            const StateVector& before = x.left[k];
            const StateVector& after = x.right[k];
            const double weight = norm_pow(before, p - 2.0);
            const double lin = p * weight * inner(before, dz);
            const double after_p = norm_pow(after, p);
            const double before_p = norm_pow(before, p);
            const double corr = after_p - before_p - p * weight * inner(before, after - before);
            jump_linear += lin;
            jump_linear_abs += std::abs(lin);
            correction += corr;
            correction_abs += after_p + before_p + std::abs(p * weight * inner(before, after - before));
        }

        PathwiseNode node;
        node.time = t1;
        node.terms.initial = std::exp(p * alpha * t1) * x0_p;
        node.terms.drift = drift;
        node.terms.jump_linear = jump_linear;
        node.terms.continuous_qv = 0.0;
        node.terms.jump_correction = correction;
        node.lhs = norm_pow(x.right[k], p);
        node.rhs = node.terms.initial + node.terms.drift + node.terms.jump_linear +
                   node.terms.continuous_qv + node.terms.jump_correction;
        node.slack = node.rhs - node.lhs;
        node.scale = node.lhs + node.terms.initial + drift_abs + jump_linear_abs + correction_abs;
        report.nodes.push_back(node);
    }
    require_all_events_used(z, next_event);
    return report;
}

PathwiseReport check_ito_p2(const VectorCadlagPath& x, const SemimartingaleDecomposition& z,
                            const DiagonalGenerator& gen, DriftQuadrature quadrature)
{
    validate_inputs(x, z, gen);

    const double alpha = gen.alpha();
    const double x0_sq = norm_squared(x.right.front());

    PathwiseReport report;
    report.p = 2.0;
    report.nodes.reserve(x.size());
    {
        PathwiseNode n0;
        n0.lhs = x0_sq;
        n0.rhs = x0_sq;
        n0.terms.initial = x0_sq;
        n0.scale = 2.0 * x0_sq;
        report.nodes.push_back(n0);
    }

    double drift = 0.0, drift_abs = 0.0;
    double linear = 0.0, linear_abs = 0.0;
    double bracket = 0.0;  // int e^{2 alpha (t-s)} d[Z]_s
    std::size_t next_event = 0;
    StateVector dz;

    for (std::size_t k = 1; k < x.size(); ++k) {
        const double t0 = x.times[k - 1];
        const double t1 = x.times[k];
        const double decay = std::exp(2.0 * alpha * (t1 - t0));
        const StateVector g = z.cell_density(t0, t1);
        const StateVector& start = x.right[k - 1];

        Quad cell;
        if (quadrature == DriftQuadrature::adaptive_gauss) {
            cell = integrate_cell_quad(gen, start, g, t0, t1, [&](double s, const StateVector& xs) {
                return 2.0 * std::exp(2.0 * alpha * (t1 - s)) * inner(xs, g);
            });
        } else {
            const double v = 2.0 * (t1 - t0) * decay * inner(start, g);
            cell = {v, std::abs(v)};
        }
        drift = decay * drift + cell.value;
        drift_abs = decay * drift_abs + cell.magnitude;
        linear *= decay;
        linear_abs *= decay;
        bracket *= decay;

        if (matched_jump(x, z, k, next_event, dz)) {
            const double lin = 2.0 * inner(x.left[k], dz);
            linear += lin;
            linear_abs += std::abs(lin);
            bracket += norm_squared(dz);
        }

        PathwiseNode node;
        node.time = t1;
        node.terms.initial = std::exp(2.0 * alpha * t1) * x0_sq;
        node.terms.drift = drift;
        node.terms.jump_linear = linear;
        node.terms.jump_correction = bracket;
        node.lhs = norm_squared(x.right[k]);
        node.rhs = node.terms.initial + drift + linear + bracket;
        node.slack = node.rhs - node.lhs;
        node.scale = node.lhs + node.terms.initial + drift_abs + linear_abs + bracket;
        report.nodes.push_back(node);
    }
    require_all_events_used(z, next_event);
    return report;
}

SemimartingaleDecomposition ConvolutionScenario::decomposition(MarkedJumpPath path) const
{
    SemimartingaleDecomposition z{gen.dim(), {}, {}, std::move(path), marks};
    if (drift.constant.dim() == gen.dim())
        z.drift = drift;
    if (jumps.dim() == gen.dim() && !jumps.is_zero())
        z.jump_value = jumps;
    return z;
}

ConvolutionScenario ConvolutionScenario::with_intensity(double factor) const
{
    ConvolutionScenario out(*this);
    out.marks = marks.scaled(factor);
    return out;
}

ConvolutionScenario ConvolutionScenario::with_jump_scale(double factor) const
{
    ConvolutionScenario out(*this);
    out.jumps = jumps.scaled(factor);
    return out;
}

bool RefinementSweep::refines_to_zero() const
{
    if (levels.empty() || levels.back().violations != 0)
        return false;
    for (std::size_t l = 1; l < levels.size(); ++l) {
        const std::size_t prev = levels[l - 1].violations;
        const std::size_t cur = levels[l].violations;
        if (cur > prev || (prev > 0 && cur == prev))
            return false;
    }
    return true;
}

RefinementSweep pathwise_refinement(const ConvolutionScenario& scenario, const MarkedJumpPath& path,
                                    double p, std::size_t base_cells, std::size_t levels,
                                    DriftQuadrature quadrature)
{
    if (levels == 0 || base_cells == 0)
        throw std::invalid_argument("refinement needs at least one level and one cell");
    RefinementSweep sweep;
    sweep.p = p;
    std::vector<PathwiseReport> reports;
    const SemimartingaleDecomposition z = scenario.decomposition(path);
    for (std::size_t l = 0; l < levels; ++l) {
        const std::size_t cells = base_cells << l;
        const TimeGrid grid = TimeGrid::jump_adapted(scenario.horizon, cells, path);
        const VectorCadlagPath x = convolve(scenario.gen, scenario.x0, z, grid);
        reports.push_back(check_pth_power_ito(x, z, scenario.gen, p, quadrature));

        RefinementLevel level;
        level.cells = cells;
        level.h = scenario.horizon / static_cast<double>(cells);
        level.min_slack = reports.back().min_slack();
        level.nodes = reports.back().nodes.size();
        if (p == 2.0) {
            const PathwiseReport p2 = check_ito_p2(x, z, scenario.gen, quadrature);
            double worst = 0.0;
            for (std::size_t k = 0; k < p2.nodes.size(); ++k)
            {
                const auto& node = reports.back().nodes[k];
                const double diff = std::abs(p2.nodes[k].slack - node.slack);
                worst = std::max(worst, diff / std::max(1.0, node.scale));
            }
            level.p2_discrepancy = worst;
        }
        sweep.levels.push_back(level);
    }
    if (levels >= 2) {
        const double change = std::abs(sweep.levels[0].min_slack - sweep.levels[1].min_slack);
        sweep.c = 10.0 * change / sweep.levels[0].h;
    }
    for (std::size_t l = 0; l < levels; ++l) {
        auto& level = sweep.levels[l];
        level.eps = sweep.c * level.h;
        level.violations = reports[l].violations(level.eps);
    }
    return sweep;
}

}  // namespace sconv
