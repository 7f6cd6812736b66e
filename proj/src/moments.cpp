#include "sconv/inequalities.hpp"
#include "sconv/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sconv {

namespace {

/// One simulated martingale M (compensated Poisson integral of the jump map)
/// together with its convolution Y = int S dM on a jump-adapted grid.
struct MartingaleSample {
    SemimartingaleDecomposition z;
    VectorCadlagPath convolution;
    double bracket = 0.0;  // [M]_T
};

SemimartingaleDecomposition martingale_part(const ConvolutionScenario& scenario, MarkedJumpPath path)
{
    SemimartingaleDecomposition z{scenario.gen.dim(), {}, {}, std::move(path), scenario.marks};
    if (scenario.jumps.dim() == scenario.gen.dim() && !scenario.jumps.is_zero())
        z.jump_value = scenario.jumps;
    return z;
}

MartingaleSample simulate_martingale(const ConvolutionScenario& scenario, const MonteCarloSettings& mc,
                                     std::size_t index)
{
    RngStream stream = derive_stream(mc.seed, index, StreamPurpose::jumps);
    MarkedJumpPath path = sample_prm(scenario.marks, scenario.horizon, stream);
    const TimeGrid grid = TimeGrid::jump_adapted(scenario.horizon, mc.cells, path);
    MartingaleSample s{martingale_part(scenario, std::move(path)), {}, 0.0};
    s.convolution = convolve(scenario.gen, StateVector(scenario.gen.dim()), s.z, grid);
    for (const auto& e : s.z.jumps.events)
        s.bracket += norm_squared(s.z.jump_at(e));
    return s;
}

double sup_norm_pow(const VectorCadlagPath& x, double p)
{
    double best = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k)
        best = std::max({best, norm(x.left[k]), norm(x.right[k])});
    return std::pow(best, p);
}

void require_paths(const MonteCarloSettings& mc)
{
    if (mc.paths < 2)
        throw std::invalid_argument("Monte-Carlo estimate needs at least two paths");
    if (mc.cells == 0)
        throw std::invalid_argument("Monte-Carlo estimate needs at least one grid cell");
}

struct PairedSamples {
    std::vector<double> numerator;
    std::vector<double> denominator;
};

template <typename Fn>
PairedSamples collect(const MonteCarloSettings& mc, Fn&& per_path)
{
    const auto pairs = parallel_map(mc.paths, mc.workers, per_path);
    PairedSamples out;
    out.numerator.reserve(pairs.size());
    out.denominator.reserve(pairs.size());
    for (const auto& [n, d] : pairs) {
        out.numerator.push_back(n);
        out.denominator.push_back(d);
    }
    return out;
}

/// int_0^T sum_j w(‖k(s, j)‖) nu_j ds by composite Simpson.
double intensity_integral(const ConvolutionScenario& scenario, double (*weight)(double, double), double p)
{
    const JumpMap& k = scenario.jumps;
    if (k.dim() == 0)
        return 0.0;
    const std::size_t cells = (k.oscillation.empty() || k.frequency == 0.0) ? 2 : 4096;
    const double h = scenario.horizon / static_cast<double>(cells);
    auto f = [&](double s) {
        double sum = 0.0;
        for (std::size_t j = 0; j < scenario.marks.size(); ++j)
            sum += weight(norm(k(s, j)), p) * scenario.marks.nu(j);
        return sum;
    };
    double total = f(0.0) + f(scenario.horizon);
    for (std::size_t i = 1; i < cells; ++i)
        total += (i % 2 == 1 ? 4.0 : 2.0) * f(h * static_cast<double>(i));
    return total * h / 3.0;
}

}  // namespace

RatioEstimate estimate_kotelenez_ratio(const ConvolutionScenario& scenario, const MonteCarloSettings& mc)
{
    if (scenario.gen.alpha() < 0.0)
        throw std::domain_error("maximal inequality ratio is defined for alpha >= 0");
    require_paths(mc);
    const double growth = std::exp(4.0 * scenario.gen.alpha() * scenario.horizon);
    const PairedSamples s = collect(mc, [&](std::size_t i) {
        const MartingaleSample m = simulate_martingale(scenario, mc, i);
        return std::pair{sup_norm_pow(m.convolution, 2.0), growth * m.bracket};
    });
    return estimate_ratio(s.numerator, s.denominator);
}

RatioEstimate estimate_burkholder_ratio(const ConvolutionScenario& scenario, double p,
                                        const MonteCarloSettings& mc)
{
    if (!scenario.gen.is_contraction())
        throw std::domain_error("Burkholder ratio needs a contraction semigroup (alpha <= 0)");
    if (!(p >= 2.0))
        throw std::domain_error("Burkholder ratio needs p >= 2");
    require_paths(mc);
    const PairedSamples s = collect(mc, [&](std::size_t i) {
        const MartingaleSample m = simulate_martingale(scenario, mc, i);
        return std::pair{sup_norm_pow(m.convolution, p), std::pow(m.bracket, p / 2.0)};
    });
    return estimate_ratio(s.numerator, s.denominator);
}

RatioEstimate estimate_bichteler_jacod(const ConvolutionScenario& scenario, double p,
                                       const MonteCarloSettings& mc)
{
    if (!(p >= 1.0))
        throw std::domain_error("L^p bound for Poisson integrals needs p >= 1");
    require_paths(mc);
    // the integrand does not depend on the path, so both denominator terms are deterministic
    const double first = std::pow(
        intensity_integral(scenario, [](double v, double) { return v; }, p), p);
    const double second = intensity_integral(scenario, [](double v, double q) { return std::pow(v, q); }, p);
    const double denominator = first + second;

    const PairedSamples s = collect(mc, [&](std::size_t i) {
        RngStream stream = derive_stream(mc.seed, i, StreamPurpose::jumps);
        const MarkedJumpPath path = sample_prm(scenario.marks, scenario.horizon, stream);
        const TimeGrid grid = TimeGrid::jump_adapted(scenario.horizon, mc.cells, path);
        double sup = 0.0;
        if (scenario.jumps.dim() != 0 && !scenario.jumps.is_zero()) {
            const VectorCadlagPath m = compensated_integral(path, scenario.marks, scenario.jumps, grid);
            sup = sup_norm_pow(m, p);
        }
        return std::pair{sup, denominator};
    });
    return estimate_ratio(s.numerator, s.denominator);
}

BdgCorollaryReport check_bdg_corollary(const ConvolutionScenario& scenario, double p,
                                       const std::vector<double>& k_values, const MonteCarloSettings& mc,
                                       double x_weight)
{
    if (!(p >= 1.0))
        throw std::domain_error("BDG corollary needs p >= 1");
    for (double k : k_values) {
        if (!(k > 0.0))
            throw std::domain_error("BDG corollary needs K > 0");
    }
    require_paths(mc);

    struct PathTerms {
        double integral_sup_p = 0.0;  // sup_t |int <X(s-), dM(s)>|^p
        double x_star = 0.0;          // sup_t ‖X(t)‖
        double bracket = 0.0;         // [M]_T
    };
    const auto terms = parallel_map(mc.paths, mc.workers, [&](std::size_t i) {
        const MartingaleSample m = simulate_martingale(scenario, mc, i);
        const VectorCadlagPath& y = m.convolution;
        PathTerms t;
        t.bracket = m.bracket;
        double integral = 0.0;
        double sup_integral = 0.0;
        double x_star = 0.0;
        std::size_t next_event = 0;
        for (std::size_t k = 0; k < y.size(); ++k) {
            x_star = std::max({x_star, x_weight * norm(y.left[k]), x_weight * norm(y.right[k])});
            if (k == 0 || x_weight == 0.0)
                continue;
            const double t0 = y.times[k - 1];
            const double t1 = y.times[k];
            // the absolutely continuous part of M has density compensator_density
            const StateVector g = m.z.cell_density(t0, t1);
            integral += x_weight * integrate_cell(scenario.gen, y.right[k - 1], g, t0, t1,
                                                  [&](double, const StateVector& ys) { return inner(ys, g); });
            sup_integral = std::max(sup_integral, std::abs(integral));
            if (y.is_jump[k]) {
                const StateVector dm = m.z.jump_at(m.z.jumps.events[next_event++]);
                integral += x_weight * inner(y.left[k], dm);
                sup_integral = std::max(sup_integral, std::abs(integral));
            }
        }
        t.integral_sup_p = std::pow(sup_integral, p);
        t.x_star = x_star;
        return t;
    });

    std::vector<double> numerator, middle, sup_2p, qv_p;
    for (const auto& t : terms) {
        numerator.push_back(t.integral_sup_p);
        middle.push_back(std::pow(t.x_star, p) * std::pow(t.bracket, p / 2.0));
        sup_2p.push_back(std::pow(t.x_star, 2.0 * p));
        qv_p.push_back(std::pow(t.bracket, p));
    }

    BdgCorollaryReport report;
    report.p = p;
    report.middle = estimate_ratio(numerator, middle);
    report.moment_sup_2p = summarize(sup_2p).mean;
    report.moment_qv_p = summarize(qv_p).mean;
    for (double k : k_values) {
        BdgBound b;
        b.k = k;
        b.rhs = report.moment_sup_2p / (2.0 * k) + k * report.moment_qv_p / 2.0;
        b.implied_constant = b.rhs > 0.0 ? report.middle.numerator_mean / b.rhs : 0.0;
        b.am_gm_holds = report.middle.denominator_mean <= b.rhs * (1.0 + 1e-12) + 1e-300;
        report.bounds.push_back(b);
    }
    return report;
}

}  // namespace sconv
