#include "sconv/parallel.hpp"
#include "sconv/solver.hpp"
#include "sconv/statistics.hpp"

#include <cmath>

namespace sconv {

StabilityRates stability_rates(const DiagonalGenerator& gen, const HypothesisConstants& constants)
{
    const double p = constants.p;
    const double c = constants.jump_lipschitz;
    const double f = constants.jump_p_lipschitz;
    const double q = std::pow(2.0, p - 2.0);
    const double jump_part = 0.5 * p * (p - 1.0) * ((q + 1.0) * c + q * f);
    StabilityRates r;
    r.gamma_without_qv = p * gen.alpha() + p * constants.monotonicity + jump_part;
    r.gamma_stated = r.gamma_without_qv + 0.5 * p * (p - 1.0) * c;
    return r;
}

StabilityReport stability_experiment(const EquationSpec& spec, const StateVector& x0, const StateVector& y0,
                                     const EnsembleSettings& ensemble)
{
    spec.validate();
    if (x0.dim() != spec.gen.dim() || y0.dim() != spec.gen.dim())
        throw std::invalid_argument("stability experiment: initial value dimension mismatch");
    if (ensemble.paths < 2 || ensemble.cells < 2)
        throw std::invalid_argument("stability experiment needs at least two paths and two cells");

    const double p = spec.p;
    StabilityReport report;
    report.p = p;
    report.paths = ensemble.paths;
    report.rates = stability_rates(spec.gen, hypothesis_constants(spec.drift, spec.jump, spec.marks, p, ensemble.seed));

    const TimeGrid base = TimeGrid::uniform(spec.horizon, ensemble.cells);
    if (x0 == y0) {
        report.degenerate = true;
        report.passed = true;
        for (double t : base.nodes())
            report.series.push_back({t, 0.0, 0.0});
        return report;
    }

    const auto differences = parallel_map(ensemble.paths, ensemble.workers, [&](std::size_t i) {
        const MarkedJumpPath noise = ensemble_noise(spec, ensemble.seed, i);
        const TimeGrid grid = TimeGrid::jump_adapted(spec.horizon, ensemble.cells, noise);
        const VectorCadlagPath x = direct_solve(spec, noise, grid, x0);
        const VectorCadlagPath y = direct_solve(spec, noise, grid, y0);
        std::vector<double> d;
        d.reserve(base.size());
        for (double t : base.nodes()) {
            const std::size_t k = grid.index_of(t);
            d.push_back(norm_pow(x.right[k] - y.right[k], p));
        }
        return d;
    });

    const std::size_t nodes = base.size();
    std::vector<double> log_mean(nodes), rel_error(nodes);
    std::vector<double> column(ensemble.paths);
    for (std::size_t k = 0; k < nodes; ++k) {
        for (std::size_t i = 0; i < ensemble.paths; ++i)
            column[i] = differences[i][k];
        const SampleSummary s = summarize(column);
        report.series.push_back({base[k], s.mean, z95 * s.std_error()});
        log_mean[k] = std::log(s.mean);
        rel_error[k] = s.std_error() / s.mean;
    }

    // least-squares slope of log E‖X-Y‖^p against t
    double t_bar = 0.0;
    for (std::size_t k = 0; k < nodes; ++k)
        t_bar += base[k];
    t_bar /= static_cast<double>(nodes);
    double sxx = 0.0;
    for (std::size_t k = 0; k < nodes; ++k)
        sxx += (base[k] - t_bar) * (base[k] - t_bar);
    double slope = 0.0, spread = 0.0;
    for (std::size_t k = 0; k < nodes; ++k) {
        const double w = (base[k] - t_bar) / sxx;
        slope += w * log_mean[k];
        spread += std::abs(w) * rel_error[k];
    }
    report.fitted_rate = slope;
    report.fit_half_width = z95 * spread;
    const double gamma = report.rates.gamma();
    report.passed = std::isfinite(slope) &&
                    slope <= gamma + 2.0 * report.fit_half_width + 1e-10 * std::max(1.0, std::abs(gamma));
    return report;
}

}  // namespace sconv
