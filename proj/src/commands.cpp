#include "sconv/commands.hpp"

#include "sconv/parallel.hpp"
#include "sconv/report.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

namespace sconv {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

/// JSON has no NaN/inf; such values are written as null.
json number(double v)
{
    return std::isfinite(v) ? json(v) : json(nullptr);
}

json vector_json(const StateVector& v)
{
    json out = json::array();
    for (double c : v.coords())
        out.push_back(number(c));
    return out;
}

json ratio_json(const RatioEstimate& r)
{
    return {{"ratio", number(r.ratio)},
            {"half_width", number(r.half_width)},
            {"numerator_mean", number(r.numerator_mean)},
            {"denominator_mean", number(r.denominator_mean)},
            {"paths", r.n},
            {"degenerate", r.degenerate},
            {"finite_interval", r.finite_interval()}};
}

CommandOutcome finish(const ExperimentConfig& cfg, json summary, bool passed, std::ostream& log)
{
    summary["passed"] = passed;
    CommandOutcome out;
    out.exit_code = passed ? exit_code::pass : exit_code::fail;
    out.summary_json = summary.dump(2) + "\n";
    write_text_file(cfg.out_dir / "summary.json", out.summary_json);
    log << (passed ? "PASS" : "FAIL") << "  summary: " << (cfg.out_dir / "summary.json").string() << '\n';
    return out;
}

json header(const ExperimentConfig& cfg, Command command)
{
    return {{"command", command_name(command)}, {"scenario", cfg.scenario}, {"seed", cfg.seed}};
}

const ConvolutionScenario& require_convolution(const ExperimentConfig& cfg, Command command)
{
    if (!cfg.convolution)
        throw ConfigError(std::string(command_name(command)) + " needs a convolution scenario (\"kind\": \"convolution\")");
    return *cfg.convolution;
}

const EquationSpec& require_equation(const ExperimentConfig& cfg, Command command)
{
    if (!cfg.equation)
        throw ConfigError(std::string(command_name(command)) + " needs an equation scenario (\"kind\": \"equation\")");
    cfg.equation->validate();
    return *cfg.equation;
}

json constants_json(const HypothesisConstants& h)
{
    return {{"p", h.p},
            {"M", number(h.monotonicity)},
            {"C", number(h.jump_lipschitz)},
            {"D", number(h.growth())},
            {"D_f", number(h.drift_growth)},
            {"D_k", number(h.jump_growth)},
            {"F", number(h.jump_p())},
            {"F_lip", number(h.jump_p_lipschitz)},
            {"F_growth", number(h.jump_p_growth)},
            {"estimated", h.estimated},
            {"growth_radius", number(h.growth_radius)}};
}

json audit_json(const HypothesisAudit& audit)
{
    json checks = json::array();
    for (const auto& c : audit.checks)
        checks.push_back({{"name", c.name}, {"violations", c.violations}, {"worst_ratio", number(c.worst_ratio)}});
    return {{"pairs", audit.pairs}, {"checks", checks}, {"passed", audit.passed()}};
}

/// Computes and audits the hypothesis constants; returns nullopt (after
/// writing the summary) when the audit fails.
struct AuditedConstants {
    HypothesisConstants constants;
    json record;
};

std::optional<AuditedConstants> audited_constants(const ExperimentConfig& cfg, const EquationSpec& spec,
                                                  json& summary, std::ostream& log)
{
    const HypothesisConstants constants = hypothesis_constants(spec.drift, spec.jump, spec.marks, spec.p, cfg.seed);
    const HypothesisAudit audit = audit_hypothesis(spec.drift, spec.jump, spec.marks, constants, 10000, cfg.seed);
    summary["constants"] = constants_json(constants);
    summary["audit"] = audit_json(audit);
    if (!audit.passed()) {
        log << "hypothesis audit failed; no simulation was run\n";
        return std::nullopt;
    }
    return AuditedConstants{constants, summary["constants"]};
}

// ---------------------------------------------------------------- pathwise

struct PathwiseCase {
    std::string scenario;
    double p = 2.0;
    std::size_t dim = 0;
    std::size_t jumps = 0;
    double alpha = 0.0;
    RefinementSweep sweep;
    std::optional<RefinementSweep> left_endpoint;
    std::optional<PathwiseReport> finest;  // kept for the CSV export
};

std::vector<std::string> pathwise_csv_header()
{
    return {"time", "lhs", "rhs", "slack", "scale", "initial", "drift", "jump_linear", "continuous_qv",
            "jump_correction"};
}

CommandOutcome run_pathwise(const ExperimentConfig& cfg, std::ostream& log)
{
    const ConvolutionScenario& configured = require_convolution(cfg, Command::verify_pathwise);
    const auto& p_values = cfg.pathwise.p;
    const std::size_t scenarios = cfg.paths;
    const std::size_t total = scenarios * p_values.size();
    log << "verify-pathwise: " << scenarios << (cfg.pathwise.random_battery ? " random scenarios" : " paths")
        << " x " << p_values.size() << " exponents, " << cfg.levels << " grid levels\n";

    const auto cases = parallel_map(total, cfg.workers, [&](std::size_t idx) {
        const std::size_t i = idx / p_values.size();
        const double p = p_values[idx % p_values.size()];
        ConvolutionScenario scenario = configured;
        if (cfg.pathwise.random_battery) {
            RngStream s = derive_stream(cfg.seed, i, StreamPurpose::scenario);
            scenario = random_convolution_scenario(s);
            scenario.name = "random-" + std::to_string(i);
        }
        RngStream noise = derive_stream(cfg.seed, i, StreamPurpose::jumps);
        const MarkedJumpPath path = sample_prm(scenario.marks, scenario.horizon, noise);

        PathwiseCase c;
        c.scenario = scenario.name;
        c.p = p;
        c.dim = scenario.gen.dim();
        c.jumps = path.events.size();
        c.alpha = scenario.gen.alpha();
        c.sweep = pathwise_refinement(scenario, path, p, cfg.cells, cfg.levels);
        if (cfg.pathwise.left_endpoint_diagnostic)
            c.left_endpoint = pathwise_refinement(scenario, path, p, cfg.cells, cfg.levels, DriftQuadrature::left_endpoint);
        if (i < cfg.pathwise.csv_cases) {
            const std::size_t cells = cfg.cells << (cfg.levels - 1);
            const TimeGrid grid = TimeGrid::jump_adapted(scenario.horizon, cells, path);
            const SemimartingaleDecomposition z = scenario.decomposition(path);
            c.finest = check_pth_power_ito(convolve(scenario.gen, scenario.x0, z, grid), z, scenario.gen, p);
        }
        return c;
    });

    struct LevelTotals {
        std::size_t cells = 0;
        std::size_t violations = 0;
        std::size_t cases_with_violations = 0;
        double min_slack = std::numeric_limits<double>::infinity();
    };
    auto totals_for = [&](auto sweep_of) {
        std::vector<LevelTotals> totals(cfg.levels);
        for (const auto& c : cases) {
            const RefinementSweep& s = sweep_of(c);
            for (std::size_t l = 0; l < cfg.levels; ++l) {
                totals[l].cells = s.levels[l].cells;
                totals[l].violations += s.levels[l].violations;
                totals[l].cases_with_violations += s.levels[l].violations > 0 ? 1 : 0;
                totals[l].min_slack = std::min(totals[l].min_slack, s.levels[l].min_slack);
            }
        }
        json out = json::array();
        for (const auto& t : totals) {
            out.push_back({{"cells", t.cells},
                           {"violations", t.violations},
                           {"cases_with_violations", t.cases_with_violations},
                           {"min_slack", number(t.min_slack)}});
        }
        return out;
    };

    bool all_refine = true;
    double p2_worst = 0.0;
    std::size_t p2_cases = 0;
    json failing = json::array();
    CsvWriter table(cfg.out_dir / "cases.csv",
                    {"case", "scenario", "p", "dim", "jumps", "alpha", "c", "level", "cells", "min_slack", "eps",
                     "violations", "p2_discrepancy"});
    for (std::size_t idx = 0; idx < cases.size(); ++idx) {
        const PathwiseCase& c = cases[idx];
        if (!c.sweep.refines_to_zero()) {
            all_refine = false;
            if (failing.size() < 20)
                failing.push_back({{"case", idx}, {"scenario", c.scenario}, {"p", c.p}});
        }
        for (std::size_t l = 0; l < c.sweep.levels.size(); ++l) {
            const RefinementLevel& lv = c.sweep.levels[l];
            if (c.p == 2.0) {
                p2_worst = std::max(p2_worst, lv.p2_discrepancy);
                ++p2_cases;
            }
            table.cell(idx).cell(c.scenario).cell(c.p).cell(c.dim).cell(c.jumps).cell(c.alpha).cell(c.sweep.c)
                .cell(l).cell(lv.cells).cell(lv.min_slack).cell(lv.eps).cell(lv.violations).cell(lv.p2_discrepancy);
            table.end_row();
        }
        if (c.finest) {
            std::ostringstream name;
            name << "slack/case_" << std::setw(5) << std::setfill('0') << idx / p_values.size() << "_p"
                 << format_number(c.p) << ".csv";
            CsvWriter csv(cfg.out_dir / name.str(), pathwise_csv_header());
            for (const auto& n : c.finest->nodes) {
                csv.cell(n.time).cell(n.lhs).cell(n.rhs).cell(n.slack).cell(n.scale).cell(n.terms.initial)
                    .cell(n.terms.drift).cell(n.terms.jump_linear).cell(n.terms.continuous_qv)
                    .cell(n.terms.jump_correction);
                csv.end_row();
            }
        }
    }

    constexpr double p2_tolerance = 1e-10;
    const bool p2_ok = p2_worst <= p2_tolerance;
    json summary = header(cfg, Command::verify_pathwise);
    summary["battery"] = cfg.pathwise.random_battery;
    summary["scenarios"] = scenarios;
    summary["cases"] = cases.size();
    summary["p_values"] = p_values;
    summary["grid"] = {{"cells", cfg.cells}, {"levels", cfg.levels}};
    summary["quadrature"] = "adaptive_gauss";
    summary["roundoff_allowance"] = pathwise_roundoff;
    summary["levels"] = totals_for([](const PathwiseCase& c) -> const RefinementSweep& { return c.sweep; });
    summary["refines_to_zero"] = all_refine;
    summary["failing_cases"] = failing;
    summary["p2_consistency"] = {{"cases", p2_cases}, {"max_scaled_discrepancy", p2_worst}, {"tolerance", p2_tolerance},
                                 {"passed", p2_ok}};
    if (cfg.pathwise.left_endpoint_diagnostic) {
        bool left_refines = true;
        for (const auto& c : cases)
            left_refines = left_refines && c.left_endpoint->refines_to_zero();
        summary["left_endpoint_diagnostic"] = {
            {"levels", totals_for([](const PathwiseCase& c) -> const RefinementSweep& { return *c.left_endpoint; })},
            {"refines_to_zero", left_refines}};
    }
    return finish(cfg, summary, all_refine && p2_ok, log);
}

// ---------------------------------------------------------------- moments

enum class Estimator { kotelenez, burkholder, bichteler_jacod };

RatioEstimate run_estimator(Estimator e, const ConvolutionScenario& s, double p, const MonteCarloSettings& mc)
{
    switch (e) {
    case Estimator::kotelenez:
        return estimate_kotelenez_ratio(s, mc);
    case Estimator::burkholder:
        return estimate_burkholder_ratio(s, p, mc);
    case Estimator::bichteler_jacod:
        return estimate_bichteler_jacod(s, p, mc);
    }
    return {};
}

struct SweepOutcome {
    json record;
    bool passed = false;
};

/// Runs `estimate` on the baseline scenario, the intensity sweep and the
/// integrand scaling sweep, and judges finiteness and scale invariance.
template <typename Estimate>
SweepOutcome sweep_estimator(const ExperimentConfig& cfg, const ConvolutionScenario& scenario, bool zero_integrand,
                             CsvWriter& csv, const std::string& name, double p, Estimate&& estimate)
{
    constexpr double invariance_tolerance = 1e-10;
    SweepOutcome out;
    const RatioEstimate baseline = estimate(scenario);
    json intensity = json::array();
    bool finite = baseline.finite_interval();
    bool all_degenerate = baseline.degenerate;
    auto log_row = [&](const char* kind, double factor, const RatioEstimate& r) {
        csv.cell(name).cell(p).cell(kind).cell(factor).cell(r.ratio).cell(r.half_width).cell(r.numerator_mean)
            .cell(r.denominator_mean).cell(r.degenerate ? "1" : "0");
        csv.end_row();
    };
    log_row("baseline", 1.0, baseline);
    for (double f : cfg.moments.intensity) {
        const RatioEstimate r = estimate(scenario.with_intensity(f));
        finite = finite && r.finite_interval();
        all_degenerate = all_degenerate && r.degenerate;
        json entry = ratio_json(r);
        entry["factor"] = f;
        intensity.push_back(entry);
        log_row("intensity", f, r);
    }
    json scaling = json::array();
    double spread = 0.0;
    for (double c : cfg.moments.scaling) {
        const RatioEstimate r = estimate(scenario.with_jump_scale(c));
        all_degenerate = all_degenerate && r.degenerate;
        if (!baseline.degenerate && !r.degenerate)
            spread = std::max(spread, std::abs(r.ratio / baseline.ratio - 1.0));
        else if (baseline.degenerate != r.degenerate)
            spread = std::numeric_limits<double>::infinity();
        json entry = ratio_json(r);
        entry["factor"] = c;
        scaling.push_back(entry);
        log_row("scaling", c, r);
    }
    const bool invariant = spread <= invariance_tolerance;
    out.passed = zero_integrand ? all_degenerate : (finite && invariant);
    out.record = {{"name", name},
                  {"p", p},
                  {"baseline", ratio_json(baseline)},
                  {"intensity_sweep", intensity},
                  {"scaling_sweep", scaling},
                  {"scaling_spread", number(spread)},
                  {"finite_across_intensities", finite},
                  {"scale_invariant", invariant},
                  {"all_degenerate", all_degenerate},
                  {"passed", out.passed}};
    return out;
}

CommandOutcome run_moments(const ExperimentConfig& cfg, std::ostream& log)
{
    const ConvolutionScenario& scenario = require_convolution(cfg, Command::verify_moments);
    const MonteCarloSettings mc{cfg.paths, cfg.seed, cfg.cells, cfg.workers};
    const bool zero_integrand = scenario.jumps.dim() == 0 || scenario.jumps.is_zero();
    const double alpha = scenario.gen.alpha();
    log << "verify-moments: " << cfg.paths << " paths per estimate"
        << (zero_integrand ? " (zero integrand: expecting degenerate ratios)" : "") << '\n';

    CsvWriter csv(cfg.out_dir / "moments.csv", {"estimator", "p", "sweep", "factor", "ratio", "half_width",
                                                "numerator_mean", "denominator_mean", "degenerate"});
    json estimators = json::array();
    json skipped = json::array();
    bool passed = true;

    auto add = [&](const std::string& name, Estimator e, double p) {
        const SweepOutcome o = sweep_estimator(cfg, scenario, zero_integrand, csv, name, p,
                                               [&](const ConvolutionScenario& s) { return run_estimator(e, s, p, mc); });
        passed = passed && o.passed;
        estimators.push_back(o.record);
        log << "  " << name << " p=" << format_number(p) << (o.passed ? " ok" : " FAILED") << '\n';
    };

    if (alpha >= 0.0)
        add("kotelenez", Estimator::kotelenez, 2.0);
    else
        skipped.push_back({{"name", "kotelenez"}, {"reason", "needs alpha >= 0"}});
    for (double p : cfg.moments.burkholder_p) {
        if (alpha <= 0.0 && p >= 2.0)
            add("burkholder", Estimator::burkholder, p);
        else
            skipped.push_back({{"name", "burkholder"}, {"p", p}, {"reason", "needs alpha <= 0 and p >= 2"}});
    }
    for (double p : cfg.moments.bichteler_p) {
        if (p >= 1.0)
            add("bichteler_jacod", Estimator::bichteler_jacod, p);
        else
            skipped.push_back({{"name", "bichteler_jacod"}, {"p", p}, {"reason", "needs p >= 1"}});
    }

    // corollary: the middle term's ratio is independent of K
    json bdg;
    {
        const double p = cfg.moments.bdg_p;
        std::optional<BdgCorollaryReport> base_report;
        const SweepOutcome o = sweep_estimator(
            cfg, scenario, zero_integrand, csv, "bdg_corollary", p, [&](const ConvolutionScenario& s) {
                BdgCorollaryReport r = check_bdg_corollary(s, p, cfg.moments.bdg_k, mc, cfg.moments.bdg_x_weight);
                if (!base_report)
                    base_report = r;
                return r.middle;
            });
        bool am_gm = true;
        json bounds = json::array();
        for (const auto& b : base_report->bounds) {
            am_gm = am_gm && b.am_gm_holds;
            bounds.push_back({{"K", b.k},
                              {"rhs", number(b.rhs)},
                              {"implied_constant", number(b.implied_constant)},
                              {"am_gm_holds", b.am_gm_holds}});
        }
        bdg = o.record;
        bdg["moment_sup_2p"] = number(base_report->moment_sup_2p);
        bdg["moment_qv_p"] = number(base_report->moment_qv_p);
        bdg["bounds"] = bounds;
        bdg["am_gm_holds"] = am_gm;
        passed = passed && o.passed && am_gm;
        log << "  bdg_corollary p=" << format_number(p) << (o.passed && am_gm ? " ok" : " FAILED") << '\n';
    }

    json summary = header(cfg, Command::verify_moments);
    summary["paths"] = cfg.paths;
    summary["cells"] = cfg.cells;
    summary["alpha"] = alpha;
    summary["zero_integrand"] = zero_integrand;
    summary["estimators"] = estimators;
    summary["bdg_corollary"] = bdg;
    summary["skipped"] = skipped;
    return finish(cfg, summary, passed, log);
}

// ---------------------------------------------------------------- solve

bool has_closed_form(const EquationSpec& spec)
{
    return spec.drift.family == DriftFamily::affine && spec.drift.linear.operator_norm() == 0.0 &&
           spec.jump.is_additive();
}

StateVector member_initial(const EquationSpec& spec, std::uint64_t seed, std::size_t i)
{
    RngStream s = derive_stream(seed, i, StreamPurpose::initial_condition);
    return spec.initial.sample(s);
}

CommandOutcome run_solve(const ExperimentConfig& cfg, std::ostream& log)
{
    const EquationSpec& spec = require_equation(cfg, Command::solve);
    json summary = header(cfg, Command::solve);
    const auto audited = audited_constants(cfg, spec, summary, log);
    if (!audited) {
        CommandOutcome out = finish(cfg, summary, false, log);
        out.exit_code = exit_code::audit_failure;
        return out;
    }
    constexpr std::size_t exported_paths = 20;
    const bool oracle = has_closed_form(spec);

    struct Member {
        StateVector terminal;
        double oracle_error = 0.0;
    };
    const auto members = parallel_map(cfg.paths, cfg.workers, [&](std::size_t i) {
        const MarkedJumpPath noise = ensemble_noise(spec, cfg.seed, i);
        const TimeGrid grid = TimeGrid::jump_adapted(spec.horizon, cfg.cells, noise);
        const StateVector x0 = member_initial(spec, cfg.seed, i);
        const VectorCadlagPath x = direct_solve(spec, noise, grid, x0);
        Member m{x.right.back(), 0.0};
        if (oracle) {
            const VectorCadlagPath exact = additive_closed_form(spec, noise, grid, x0);
            for (std::size_t k = 0; k < x.size(); ++k) {
                const double scale = std::max(1.0, norm(exact.right[k]));
                m.oracle_error = std::max({m.oracle_error, norm(x.right[k] - exact.right[k]) / scale,
                                           norm(x.left[k] - exact.left[k]) / scale});
            }
        }
        if (i < exported_paths) {
            std::ostringstream base;
            base << std::setw(4) << std::setfill('0') << i;
            std::ostringstream path_csv, jump_csv;
            write_cadlag_csv(path_csv, x);
            write_text_file(cfg.out_dir / "paths" / ("path_" + base.str() + ".csv"), path_csv.str());
            write_jump_path_csv(jump_csv, noise, spec.marks, [&](double t, std::size_t j) {
                return spec.jump(j, x.left[grid.index_of(t)]);
            });
            write_text_file(cfg.out_dir / "paths" / ("jumps_" + base.str() + ".csv"), jump_csv.str());
        }
        return m;
    });

    const std::size_t d = spec.gen.dim();
    StateVector mean(d);
    double moment = 0.0, oracle_error = 0.0;
    for (const auto& m : members) {
        mean += m.terminal;
        moment += norm_pow(m.terminal, spec.p);
        oracle_error = std::max(oracle_error, m.oracle_error);
    }
    mean *= 1.0 / static_cast<double>(cfg.paths);
    moment /= static_cast<double>(cfg.paths);

    // self-refinement of member 0 against a grid refined once more
    json refinement = json::array();
    {
        const MarkedJumpPath noise = ensemble_noise(spec, cfg.seed, 0);
        const StateVector x0 = member_initial(spec, cfg.seed, 0);
        const std::size_t finest = cfg.cells << cfg.levels;
        const StateVector reference =
            direct_solve(spec, noise, TimeGrid::jump_adapted(spec.horizon, finest, noise), x0).right.back();
        CsvWriter csv(cfg.out_dir / "refinement.csv", {"cells", "h", "terminal_error"});
        double previous = 0.0;
        for (std::size_t l = 0; l < cfg.levels; ++l) {
            const std::size_t cells = cfg.cells << l;
            const StateVector xt =
                direct_solve(spec, noise, TimeGrid::jump_adapted(spec.horizon, cells, noise), x0).right.back();
            const double err = norm(xt - reference);
            json entry = {{"cells", cells}, {"terminal_error", err}};
            if (l > 0 && previous > 0.0 && err > 0.0)
                entry["observed_order"] = std::log2(previous / err);
            refinement.push_back(entry);
            csv.cell(cells).cell(spec.horizon / static_cast<double>(cells)).cell(err);
            csv.end_row();
            previous = err;
        }
    }

    constexpr double oracle_tolerance = 1e-10;
    summary["paths"] = cfg.paths;
    summary["cells"] = cfg.cells;
    summary["p"] = spec.p;
    summary["terminal_mean"] = vector_json(mean);
    summary["terminal_moment_p"] = number(moment);
    summary["refinement"] = refinement;
    bool passed = true;
    if (oracle) {
        summary["closed_form"] = {{"max_relative_error", oracle_error}, {"tolerance", oracle_tolerance}};
        passed = oracle_error <= oracle_tolerance;
    }
    summary["exported_paths"] = std::min(cfg.paths, exported_paths);
    return finish(cfg, summary, passed, log);
}

// ---------------------------------------------------------------- picard

json picard_json(const PicardDiagnostics& d, CsvWriter& csv)
{
    json iterations = json::array();
    for (const auto& it : d.iterations) {
        iterations.push_back({{"n", it.n},
                              {"h", number(it.h)},
                              {"bound", number(it.bound)},
                              {"ratio", number(it.ratio)},
                              {"ratio_bound", number(it.ratio_bound)},
                              {"ratio_checked", it.ratio_checked},
                              {"ratio_ok", it.ratio_ok}});
        csv.cell(it.n).cell(it.h).cell(it.bound).cell(it.ratio).cell(it.ratio_bound)
            .cell(it.ratio_checked ? "1" : "0").cell(it.ratio_ok ? "1" : "0");
        csv.end_row();
    }
    return {{"beta", number(d.beta)},
            {"gamma_iter", number(d.gamma_iter)},
            {"C0", number(d.c0)},
            {"C1", number(d.c1)},
            {"C1_T", number(d.c1 * d.horizon)},
            {"ratio_margin", d.ratio_margin},
            {"iterations", iterations},
            {"ratio_test_passed", d.ratio_test_passed()}};
}

CommandOutcome run_picard(const ExperimentConfig& cfg, std::ostream& log)
{
    const EquationSpec& spec = require_equation(cfg, Command::picard);
    json summary = header(cfg, Command::picard);
    const auto audited = audited_constants(cfg, spec, summary, log);
    if (!audited) {
        CommandOutcome out = finish(cfg, summary, false, log);
        out.exit_code = exit_code::audit_failure;
        return out;
    }
    summary["paths"] = cfg.paths;
    summary["cells"] = cfg.cells;
    CsvWriter csv(cfg.out_dir / "picard.csv", {"n", "h", "bound", "ratio", "ratio_bound", "ratio_checked", "ratio_ok"});
    const EnsembleSettings ensemble{cfg.paths, cfg.seed, cfg.cells, cfg.workers};
    PicardDiagnostics diagnostics;
    bool diverged = false;
    try {
        diagnostics = picard_solve(spec, cfg.picard.iterations, ensemble).diagnostics;
    } catch (const PicardDivergence& e) {
        log << e.what() << '\n';
        diagnostics = e.diagnostics();
        diverged = true;
    }
    summary["diagnostics"] = picard_json(diagnostics, csv);
    summary["diverged"] = diverged;

    const SolverCrossCheck cross = picard_direct_cross_check(
        spec, cfg.picard.cross_check_iterations,
        EnsembleSettings{cfg.picard.cross_check_paths, cfg.seed, cfg.cells, cfg.workers});
    summary["cross_check"] = {{"paths", cross.paths},
                              {"iterations", cfg.picard.cross_check_iterations},
                              {"distance", cross.distance},
                              {"direct_refinement", cross.direct_refinement},
                              {"picard_refinement", cross.picard_refinement},
                              {"within_band", cross.within_band()}};
    const bool passed = !diverged && diagnostics.ratio_test_passed() && cross.within_band();
    return finish(cfg, summary, passed, log);
}

// ---------------------------------------------------------------- stability

CommandOutcome run_stability(const ExperimentConfig& cfg, std::ostream& log)
{
    const EquationSpec& spec = require_equation(cfg, Command::stability);
    if (!cfg.y0)
        throw ConfigError("stability needs a second initial value \"y0\"");
    if (!spec.initial.is_deterministic())
        throw ConfigError("stability needs a deterministic \"x0\"");
    json summary = header(cfg, Command::stability);
    const auto audited = audited_constants(cfg, spec, summary, log);
    if (!audited) {
        CommandOutcome out = finish(cfg, summary, false, log);
        out.exit_code = exit_code::audit_failure;
        return out;
    }
    const StateVector& x0 = spec.initial.mean;
    const StabilityReport report =
        stability_experiment(spec, x0, *cfg.y0, EnsembleSettings{cfg.paths, cfg.seed, cfg.cells, cfg.workers});

    const double gamma = report.rates.gamma();
    const double start = norm_pow(x0 - *cfg.y0, spec.p);
    CsvWriter csv(cfg.out_dir / "stability.csv", {"time", "mean", "half_width", "bound"});
    for (const auto& pt : report.series) {
        csv.cell(pt.time).cell(pt.mean).cell(pt.half_width).cell(start * std::exp(gamma * pt.time));
        csv.end_row();
    }

    summary["paths"] = cfg.paths;
    summary["cells"] = cfg.cells;
    summary["p"] = spec.p;
    summary["degenerate"] = report.degenerate;
    summary["fitted_rate"] = number(report.fitted_rate);
    summary["fit_half_width"] = number(report.fit_half_width);
    summary["gamma_stated"] = number(report.rates.gamma_stated);
    summary["gamma_without_qv"] = number(report.rates.gamma_without_qv);
    summary["gamma_used"] = number(gamma);
    // with additive noise and a diagonal linear drift the difference is deterministic
    if (spec.gen.dim() == 1 && spec.jump.is_additive() && spec.drift.family == DriftFamily::affine)
        summary["closed_form_rate"] = spec.p * (spec.gen.eigenvalue(0) + spec.drift.linear(0, 0));
    log << "fitted rate " << format_number(report.fitted_rate) << " vs gamma " << format_number(gamma) << '\n';
    return finish(cfg, summary, report.passed, log);
}

}  // namespace

std::optional<Command> parse_command(std::string_view name)
{
    if (name == "verify-pathwise")
        return Command::verify_pathwise;
    if (name == "verify-moments")
        return Command::verify_moments;
    if (name == "solve")
        return Command::solve;
    if (name == "picard")
        return Command::picard;
    if (name == "stability")
        return Command::stability;
    return std::nullopt;
}

std::string_view command_name(Command command)
{
    switch (command) {
    case Command::verify_pathwise:
        return "verify-pathwise";
    case Command::verify_moments:
        return "verify-moments";
    case Command::solve:
        return "solve";
    case Command::picard:
        return "picard";
    case Command::stability:
        return "stability";
    }
    return "unknown";
}

CommandOutcome run_command(Command command, const ExperimentConfig& cfg, std::ostream& log)
{
    if (cfg.out_dir.empty())
        throw ConfigError("no output directory configured");
    fs::create_directories(cfg.out_dir);
    write_text_file(cfg.out_dir / "config.json", cfg.resolved_json);
    switch (command) {
    case Command::verify_pathwise:
        return run_pathwise(cfg, log);
    case Command::verify_moments:
        return run_moments(cfg, log);
    case Command::solve:
        return run_solve(cfg, log);
    case Command::picard:
        return run_picard(cfg, log);
    case Command::stability:
        return run_stability(cfg, log);
    }
    return {};
}

}  // namespace sconv
