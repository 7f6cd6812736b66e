// Acceptance suite: one PASS/FAIL line per criterion.
#include "sconv/commands.hpp"
#include "sconv/config.hpp"
#include "sconv/hilbert.hpp"
#include "sconv/inequalities.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <sstream>
#include <string>

using namespace sconv;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// pinned tolerances and limits
constexpr double taylor_seconds = 10.0;
constexpr std::size_t taylor_cases = 100000;
constexpr std::size_t yosida_cases = 10000;
constexpr double yosida_tolerance = 1e-10;
constexpr double battery_seconds = 300.0;
constexpr std::size_t battery_min_scenarios = 1000;
constexpr double p2_tolerance = 1e-10;
constexpr std::size_t picard_min_paths = 1000;
constexpr double stability_rate_tolerance = 1e-10;
constexpr double stability_seconds = 300.0;
constexpr double moment_invariance_tolerance = 1e-10;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string fmt(double v)
{
    std::ostringstream os;
    os.precision(4);
    os << v;
    return os.str();
}

const fs::path work_root = fs::temp_directory_path() / "sconv-acceptance";

struct Run {
    CommandOutcome outcome;
    json summary;
    double seconds = 0.0;
};

Command command_for(std::string_view scenario, const ExperimentConfig& cfg)
{
    if (cfg.equation) {
        if (scenario.starts_with("stability"))
            return Command::stability;
        if (scenario == "lipschitz-small-T")
            return Command::picard;
        return Command::solve;
    }
    return scenario.starts_with("moment") ? Command::verify_moments : Command::verify_pathwise;
}

Run run_bundled(std::string_view scenario, unsigned workers)
{
    ConfigOverrides o;
    o.workers = workers;
    o.out_dir = work_root / (std::string(scenario) + "-w" + std::to_string(workers));
    fs::remove_all(*o.out_dir);
    const ExperimentConfig cfg = bundled_config(scenario, o);
    std::ostringstream log;
    const auto start = Clock::now();
    Run r;
    r.outcome = run_command(command_for(scenario, cfg), cfg, log);
    r.seconds = seconds_since(start);
    r.summary = json::parse(r.outcome.summary_json);
    return r;
}

/// Summaries from single-worker runs, reused by the determinism check.
std::map<std::string, std::string> single_worker_summaries;

Run run_recorded(std::string_view scenario)
{
    Run r = run_bundled(scenario, 1);
    single_worker_summaries[std::string(scenario)] = r.outcome.summary_json;
    return r;
}

StateVector random_state(RngStream& s, std::size_t d)
{
    StateVector x(d);
    const double scale = std::exp(s.uniform(-3.0, 3.0));
    for (std::size_t i = 0; i < d; ++i)
        x[i] = scale * s.normal();
    return x;
}

DiagonalGenerator random_generator(RngStream& s, std::size_t d, bool contraction)
{
    std::vector<double> a(d);
    for (double& v : a)
        v = s.uniform(-50.0, contraction ? 0.0 : 5.0);
    if (s.uniform() < 0.1)
        a[0] = 0.0;
    return DiagonalGenerator(std::move(a));
}

double random_lambda(RngStream& s, const DiagonalGenerator& gen)
{
    return std::max(0.0, gen.alpha()) + std::exp(s.uniform(-6.0, 8.0));
}

Verdict taylor_criterion()
{
    const auto start = Clock::now();
    RngStream s = derive_stream(1001, 0, StreamPurpose::audit);
    std::size_t violations = 0;
    double worst = -INFINITY;
    for (std::size_t i = 0; i < taylor_cases; ++i) {
        const auto d = static_cast<std::size_t>(s.uniform_int(1, 16));
        const StateVector x = random_state(s, d);
        const StateVector y = random_state(s, d);
        const double p = s.uniform(2.0, 6.0);
        const TaylorCheck c = check_taylor_lemma(x, y, p);
        violations += c.holds ? 0 : 1;
        if (c.rhs > 0.0)
            worst = std::max(worst, c.lhs / c.rhs);
    }
    const double secs = seconds_since(start);
    return {violations == 0 && secs < taylor_seconds,
            std::to_string(taylor_cases) + " pairs, violations " + std::to_string(violations) +
                ", max lhs/rhs " + fmt(worst) + ", " + fmt(secs) + " s (limit " + fmt(taylor_seconds) + " s)"};
}

Verdict yosida_criterion()
{
    RngStream s = derive_stream(1002, 0, StreamPurpose::audit);
    std::map<char, std::size_t> violations{{'a', 0}, {'b', 0}, {'c', 0}, {'d', 0}, {'e', 0}};
    const double tol = yosida_tolerance;
    for (std::size_t i = 0; i < yosida_cases; ++i) {
        const auto d = static_cast<std::size_t>(s.uniform_int(1, 16));

        {  // (a) bounded operators with the computed norms
            const DiagonalGenerator gen = random_generator(s, d, false);
            const double lambda = random_lambda(s, gen);
            const StateVector x = random_state(s, d);
            const double rn = yosida_resolvent_norm(gen, lambda);
            const double an = yosida_generator_norm(gen, lambda);
            const bool ok = std::isfinite(rn) && std::isfinite(an) &&
                            norm(yosida_resolvent(gen, lambda, x)) <= rn * norm(x) * (1.0 + tol) &&
                            norm(yosida_generator(gen, lambda, x)) <= an * norm(x) * (1.0 + tol) &&
                            rn <= lambda / (lambda - std::max(0.0, gen.alpha())) * (1.0 + tol);
            violations['a'] += ok ? 0 : 1;
        }
        {  // (b) contraction: R does not expand, A(lambda) is dissipative
            const DiagonalGenerator gen = random_generator(s, d, true);
            const double lambda = random_lambda(s, gen);
            const StateVector x = random_state(s, d);
            const StateVector ax = yosida_generator(gen, lambda, x);
            const bool ok = norm(yosida_resolvent(gen, lambda, x)) <= norm(x) * (1.0 + tol) &&
                            inner(x, ax) <= tol * norm(x) * norm(ax);
            violations['b'] += ok ? 0 : 1;
        }
        {  // (c) commutation with S_t and with A
            const DiagonalGenerator gen = random_generator(s, d, false);
            const double lambda = random_lambda(s, gen);
            const double t = s.uniform(0.0, 2.0);
            const StateVector x = random_state(s, d);
            const StateVector rs = yosida_resolvent(gen, lambda, apply_semigroup(gen, t, x));
            const StateVector sr = apply_semigroup(gen, t, yosida_resolvent(gen, lambda, x));
            const StateVector ra = yosida_resolvent(gen, lambda, apply_generator(gen, x));
            const StateVector ar = apply_generator(gen, yosida_resolvent(gen, lambda, x));
            const bool ok = norm(rs - sr) <= tol * std::max(norm(rs), 1e-300) &&
                            norm(ra - ar) <= tol * std::max(norm(ra), 1e-300);
            violations['c'] += ok ? 0 : 1;
        }
        {  // (d), (e) convergence as lambda grows by decades
            const DiagonalGenerator gen = random_generator(s, d, false);
            const StateVector x = random_state(s, d);
            const StateVector ax = apply_generator(gen, x);
            double spread = 0.0;
            for (double a : gen.eigenvalues())
                spread = std::max(spread, std::abs(a));
            double prev_r = INFINITY, prev_a = INFINITY;
            bool mono_r = true, mono_a = true;
            double last_r = 0.0, last_a = 0.0;
            for (int k = 1; k <= 13; ++k) {
                const double lambda = (1.0 + spread) * std::pow(10.0, k);
                const double er = norm(yosida_resolvent(gen, lambda, x) - x);
                const double ea = norm(yosida_generator(gen, lambda, x) - ax);
                mono_r = mono_r && er <= prev_r;
                mono_a = mono_a && ea <= prev_a;
                prev_r = er;
                prev_a = ea;
                last_r = er;
                last_a = ea;
            }
            violations['d'] += (mono_r && last_r <= tol * norm(x)) ? 0 : 1;
            violations['e'] += (mono_a && last_a <= tol * std::max(norm(ax), 1e-300) + 1e-300) ? 0 : 1;
        }
    }
    bool pass = true;
    std::string detail = std::to_string(yosida_cases) + " instances per property, violations";
    for (const auto& [prop, count] : violations) {
        pass = pass && count == 0;
        detail += std::string(" (") + prop + ") " + std::to_string(count);
    }
    return {pass, detail};
}

Verdict pathwise_criterion(const Run& r)
{
    const json& s = r.summary;
    const json& levels = s["levels"];
    bool counts_ok = s["refines_to_zero"].get<bool>();
    std::string counts;
    for (const auto& l : levels)
        counts += (counts.empty() ? "" : " -> ") + std::to_string(l["violations"].get<std::size_t>());
    const double finest_min = levels.back()["min_slack"].get<double>();
    const std::size_t scenarios = s["scenarios"].get<std::size_t>();
    const bool scope = scenarios >= battery_min_scenarios && s["battery"].get<bool>();
    const bool pass = counts_ok && scope && r.seconds < battery_seconds;
    return {pass, std::to_string(scenarios) + " scenarios x p {2,3,4}, violations per level " + counts +
                      ", finest min slack " + fmt(finest_min) + ", " + fmt(r.seconds) + " s (limit " +
                      fmt(battery_seconds) + " s)"};
}

Verdict p2_criterion(const Run& r)
{
    const json& c = r.summary["p2_consistency"];
    const double worst = c["max_scaled_discrepancy"].get<double>();
    return {worst <= p2_tolerance, std::to_string(c["cases"].get<std::size_t>()) +
                                       " p=2 cases, max node discrepancy " + fmt(worst) + " (limit " +
                                       fmt(p2_tolerance) + ")"};
}

Verdict picard_criterion(const Run& r)
{
    const json& s = r.summary;
    if (s["audit"]["passed"] != true)
        return {false, "hypothesis audit failed"};
    const json& d = s["diagnostics"];
    const double c1t = d["C1_T"].get<double>();
    std::size_t checked = 0;
    double worst = 0.0;
    for (const auto& it : d["iterations"]) {
        if (it["ratio_checked"].get<bool>()) {
            ++checked;
            worst = std::max(worst, it["ratio"].get<double>() / it["ratio_bound"].get<double>());
        }
    }
    const json& cross = s["cross_check"];
    const bool pass = s["passed"].get<bool>() && c1t < 1.0 && checked > 0 &&
                      s["paths"].get<std::size_t>() >= picard_min_paths && cross["within_band"].get<bool>();
    return {pass, std::to_string(s["paths"].get<std::size_t>()) + " paths, C1 T = " + fmt(c1t) + ", " +
                      std::to_string(checked) + " ratios checked, max ratio/(C1T/(n+1)) " + fmt(worst) +
                      " (limit 1.5), Picard-direct distance " + fmt(cross["distance"].get<double>()) + " vs band " +
                      fmt(cross["direct_refinement"].get<double>() + cross["picard_refinement"].get<double>())};
}

Verdict stability_criterion(const Run& affine, const Run& cubic)
{
    const json& a = affine.summary;
    const json& c = cubic.summary;
    const double exact = a["closed_form_rate"].get<double>();
    const double fitted = a["fitted_rate"].get<double>();
    const bool affine_ok = std::abs(fitted - exact) <= stability_rate_tolerance;
    const double gamma = c["gamma_used"].get<double>();
    const bool cubic_ok = c["passed"].get<bool>() && gamma < 0.0 && c["paths"].get<std::size_t>() >= 10000;
    const double secs = affine.seconds + cubic.seconds;
    return {affine_ok && cubic_ok && secs < stability_seconds,
            "affine fitted " + fmt(fitted) + " vs p(a+mu) " + fmt(exact) + "; cubic fitted " +
                fmt(c["fitted_rate"].get<double>()) + " +- " + fmt(c["fit_half_width"].get<double>()) + " vs gamma " +
                fmt(gamma) + " over " + std::to_string(c["paths"].get<std::size_t>()) + " paths, " + fmt(secs) +
                " s"};
}

Verdict moment_criterion(const Run& r)
{
    const json& s = r.summary;
    bool pass = !s["zero_integrand"].get<bool>();
    std::string detail;
    std::vector<json> all(s["estimators"].begin(), s["estimators"].end());
    all.push_back(s["bdg_corollary"]);
    for (const auto& e : all) {
        bool finite = e["baseline"]["finite_interval"].get<bool>() && e["intensity_sweep"].size() == 5;
        for (const auto& point : e["intensity_sweep"])
            finite = finite && point["finite_interval"].get<bool>();
        const double spread = e["scaling_spread"].is_null() ? INFINITY : e["scaling_spread"].get<double>();
        const bool ok = finite && spread <= moment_invariance_tolerance;
        pass = pass && ok;
        detail += (detail.empty() ? "" : ", ") + e["name"].get<std::string>() + "(p=" + fmt(e["p"].get<double>()) +
                  ") " + fmt(e["baseline"]["ratio"].get<double>()) + (ok ? "" : " FAILED");
    }
    const bool all_estimators = all.size() >= 8;  // maximal, 2 Burkholder, 4 L^p, corollary
    return {pass && all_estimators && s["bdg_corollary"]["am_gm_holds"].get<bool>(),
            std::to_string(s["paths"].get<std::size_t>()) + " paths; " + detail};
}

Verdict determinism_criterion()
{
    std::size_t identical = 0, total = 0;
    std::string mismatched;
    for (const auto& s : bundled_scenarios()) {
        const std::string name(s.name);
        auto it = single_worker_summaries.find(name);
        const std::string one = it != single_worker_summaries.end() ? it->second : run_bundled(name, 1).outcome.summary_json;
        const std::string four = run_bundled(name, 4).outcome.summary_json;
        ++total;
        if (one == four)
            ++identical;
        else
            mismatched += " " + name;
    }
    return {identical == total, std::to_string(identical) + "/" + std::to_string(total) +
                                    " bundled scenarios byte-identical with 1 and 4 workers" +
                                    (mismatched.empty() ? "" : "; differ:" + mismatched)};
}

}  // namespace

int main()
{
    fs::create_directories(work_root);
    int failures = 0;
    auto report = [&](int id, const char* name, const std::function<Verdict()>& criterion) {
        Verdict v;
        try {
            v = criterion();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        failures += v.pass ? 0 : 1;
        std::printf("%s %d %s: %s\n", v.pass ? "PASS" : "FAIL", id, name, v.detail.c_str());
        std::fflush(stdout);
    };

    report(1, "taylor-lemma", taylor_criterion);
    report(2, "yosida-properties", yosida_criterion);
    std::optional<Run> battery;
    report(3, "pathwise-battery", [&] {
        battery = run_recorded("jump-battery");
        return pathwise_criterion(*battery);
    });
    report(4, "p2-consistency", [&] {
        if (!battery)
            return Verdict{false, "battery did not run"};
        return p2_criterion(*battery);
    });
    report(5, "picard-factorial-bound", [] { return picard_criterion(run_recorded("lipschitz-small-T")); });
    report(6, "stability-rate", [] {
        const Run affine = run_recorded("stability-affine-additive");
        const Run cubic = run_recorded("stability-cubic");
        return stability_criterion(affine, cubic);
    });
    report(7, "moment-ratios", [] { return moment_criterion(run_recorded("moment-bounds")); });
    report(8, "determinism", determinism_criterion);
    return failures == 0 ? 0 : 1;
}
