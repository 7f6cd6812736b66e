#include "sconv/config.hpp"
#include "sconv/inequalities.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>

using namespace sconv;

namespace {

ConvolutionScenario scalar_scenario(double a, double jump, double nu)
{
    return ConvolutionScenario{"scalar",
                               DiagonalGenerator({a}),
                               MarkSpace({nu}),
                               JumpMap{{StateVector{jump}}, {StateVector{0.0}}, 0.0},
                               OscillatingField{StateVector{0.0}, StateVector{0.0}, 0.0},
                               StateVector{1.0},
                               1.0};
}

ConvolutionScenario planar_scenario(DiagonalGenerator gen)
{
    return ConvolutionScenario{"planar",
                               std::move(gen),
                               MarkSpace({1.5, 0.5}),
                               JumpMap{{StateVector{0.4, -0.2}, StateVector{-0.3, 0.5}},
                                       {StateVector{0.1, 0.0}, StateVector{0.0, 0.2}},
                                       2.0},
                               OscillatingField{StateVector{0.2, -0.1}, StateVector{0.3, 0.0}, 3.0},
                               StateVector{0.7, -0.4},
                               1.5};
}

struct Realization {
    SemimartingaleDecomposition z;
    VectorCadlagPath x;
};

Realization realize(const ConvolutionScenario& s, std::uint64_t index, std::size_t cells)
{
    RngStream stream = derive_stream(99, index);
    SemimartingaleDecomposition z = s.decomposition(sample_prm(s.marks, s.horizon, stream));
    const TimeGrid grid = TimeGrid::jump_adapted(s.horizon, cells, z.jumps);
    VectorCadlagPath x = convolve(s.gen, s.x0, z, grid);
    return {std::move(z), std::move(x)};
}

}  // namespace

TEST_CASE("Taylor bound trivial cases")
{
    const StateVector x{1.0, -2.0};
    const TaylorCheck zero_step = check_taylor_lemma(x, StateVector(2), 3.0);
    CHECK(zero_step.lhs == doctest::Approx(0.0).scale(1.0));
    CHECK(zero_step.rhs == 0.0);
    CHECK(zero_step.holds);

    const StateVector y{0.5, 1.5};
    for (double p : {2.5, 4.0}) {
        const TaylorCheck origin = check_taylor_lemma(StateVector(2), y, p);
        CHECK(origin.lhs == doctest::Approx(std::pow(norm(y), p)));
        CHECK(origin.rhs == doctest::Approx(0.5 * p * (p - 1.0) * std::pow(norm(y), p)));
        CHECK(origin.holds);
    }
    // p = 2 uses ‖0‖^0 = 1, so both weights are 1
    const TaylorCheck quadratic = check_taylor_lemma(StateVector(2), y, 2.0);
    CHECK(quadratic.lhs == doctest::Approx(norm_squared(y)));
    CHECK(quadratic.rhs == doctest::Approx(2.0 * norm_squared(y)));
    CHECK_THROWS_AS(check_taylor_lemma(x, y, 1.5), std::domain_error);
}

TEST_CASE("Taylor bound on random pairs")
{
    RngStream s(21);
    std::size_t violations = 0;
    for (int i = 0; i < 20000; ++i) {
        const auto d = static_cast<std::size_t>(s.uniform_int(1, 16));
        StateVector x(d), y(d);
        const double sx = std::exp(s.uniform(-4.0, 4.0));
        const double sy = std::exp(s.uniform(-4.0, 4.0));
        for (std::size_t k = 0; k < d; ++k) {
            x[k] = sx * s.normal();
            y[k] = sy * s.normal();
        }
        violations += check_taylor_lemma(x, y, s.uniform(2.0, 6.0)).holds ? 0 : 1;
    }
    CHECK(violations == 0);
}

TEST_CASE("no noise and a contraction: nonnegative slack")
{
    ConvolutionScenario s = scalar_scenario(-1.0, 0.0, 1.0);
    s.gen = DiagonalGenerator({-1.0, -3.0, 0.0});
    s.jumps = JumpMap{{StateVector(3)}, {StateVector(3)}, 0.0};
    s.drift = OscillatingField{StateVector(3), StateVector(3), 0.0};
    s.x0 = StateVector{1.0, 2.0, -1.0};
    const Realization r = realize(s, 0, 20);
    for (double p : {2.0, 3.0, 5.0}) {
        const PathwiseReport rep = check_pth_power_ito(r.x, r.z, s.gen, p);
        CHECK(rep.min_slack() >= -1e-14);
    }
    CHECK(check_ito_p2(r.x, r.z, s.gen).min_slack() >= -1e-14);
}

TEST_CASE("inward drift with A = 0 keeps slack nonnegative")
{
    const DiagonalGenerator gen = DiagonalGenerator::zero(1);
    SemimartingaleDecomposition z = SemimartingaleDecomposition::zero(1, 1.5, MarkSpace({1.0}));
    z.drift = [](double) { return StateVector{-1.0}; };
    const VectorCadlagPath x = convolve(gen, StateVector{2.0}, z, TimeGrid::uniform(1.5, 30));
    for (double p : {2.0, 3.0, 4.0})
        CHECK(check_pth_power_ito(x, z, gen, p).min_slack() >= -1e-13);
}

TEST_CASE("A = 0 turns the inequality into an identity")
{
    // with S = I the p-th power Itô formula holds with equality, so a single
    // deterministic jump gives zero slack up to quadrature roundoff
    const MarkSpace marks({0.8});
    MarkedJumpPath path{1.0, {{0.375, 0}}};
    SemimartingaleDecomposition z{2, {}, [](double, std::size_t) { return StateVector{0.6, -0.3}; }, path, marks};
    const DiagonalGenerator gen = DiagonalGenerator::zero(2);
    const VectorCadlagPath x = convolve(gen, StateVector{1.0, 0.5}, z, TimeGrid::jump_adapted(1.0, 8, path));
    for (double p : {2.0, 3.0, 4.5}) {
        const PathwiseReport rep = check_pth_power_ito(x, z, gen, p);
        for (const auto& n : rep.nodes)
            CHECK(std::abs(n.slack) <= 1e-12 * std::max(1.0, n.scale));
    }
    for (const auto& n : check_ito_p2(x, z, gen).nodes)
        CHECK(std::abs(n.slack) <= 1e-12 * std::max(1.0, n.scale));

    // without compensator drift the hand computation is direct
    SemimartingaleDecomposition bare{1, {}, {}, MarkedJumpPath{1.0, {}}, marks};
    VectorCadlagPath manual;
    manual.push(0.0, StateVector{1.0}, StateVector{1.0}, false);
    manual.push(1.0, StateVector{1.0}, StateVector{1.0}, false);
    const PathwiseReport flat = check_ito_p2(manual, bare, DiagonalGenerator::zero(1));
    CHECK(flat.nodes.back().slack == 0.0);
}

TEST_CASE("p = 2 checkers agree per node")
{
    const ConvolutionScenario s = planar_scenario(DiagonalGenerator({0.3, -2.0}));
    for (std::uint64_t i = 0; i < 50; ++i) {
        const Realization r = realize(s, i, 24);
        const PathwiseReport a = check_pth_power_ito(r.x, r.z, s.gen, 2.0);
        const PathwiseReport b = check_ito_p2(r.x, r.z, s.gen);
        REQUIRE(a.nodes.size() == b.nodes.size());
        for (std::size_t k = 0; k < a.nodes.size(); ++k)
            CHECK(std::abs(a.nodes[k].slack - b.nodes[k].slack) <= 1e-10 * std::max(1.0, a.nodes[k].scale));
    }
}

TEST_CASE("pathwise refinement on a mixed scenario")
{
    const ConvolutionScenario s = planar_scenario(DiagonalGenerator({0.3, -2.0}));
    for (std::uint64_t i = 0; i < 10; ++i) {
        RngStream stream = derive_stream(5, i);
        const MarkedJumpPath path = sample_prm(s.marks, s.horizon, stream);
        for (double p : {2.0, 3.0, 4.0}) {
            const RefinementSweep sweep = pathwise_refinement(s, path, p, 16, 3);
            CHECK(sweep.refines_to_zero());
            CHECK(sweep.levels.size() == 3);
            CHECK(sweep.levels[2].cells == 64);
        }
    }
}

TEST_CASE("left-endpoint quadrature converges at first order")
{
    const ConvolutionScenario s = planar_scenario(DiagonalGenerator({0.3, -2.0}));
    std::vector<double> gaps;
    for (std::size_t cells : {16, 64}) {
        const Realization r = realize(s, 3, cells);
        const double adaptive = check_pth_power_ito(r.x, r.z, s.gen, 3.0).nodes.back().terms.drift;
        const double left =
            check_pth_power_ito(r.x, r.z, s.gen, 3.0, DriftQuadrature::left_endpoint).nodes.back().terms.drift;
        gaps.push_back(std::abs(adaptive - left));
    }
    CHECK(gaps[0] > 0.0);
    CHECK(gaps[1] < 0.5 * gaps[0]);
}

TEST_CASE("refinement sweep verdicts")
{
    RefinementSweep sweep;
    auto level = [](std::size_t v) {
        RefinementLevel l;
        l.violations = v;
        return l;
    };
    sweep.levels = {level(3), level(1), level(0)};
    CHECK(sweep.refines_to_zero());
    sweep.levels = {level(0), level(0), level(0)};
    CHECK(sweep.refines_to_zero());
    sweep.levels = {level(2), level(2), level(0)};
    CHECK_FALSE(sweep.refines_to_zero());
    sweep.levels = {level(3), level(1), level(1)};
    CHECK_FALSE(sweep.refines_to_zero());
    sweep.levels = {level(0), level(1), level(0)};
    CHECK_FALSE(sweep.refines_to_zero());
}

TEST_CASE("checker rejects mismatched jump sets")
{
    const ConvolutionScenario s = scalar_scenario(-1.0, 1.0, 3.0);
    const Realization a = realize(s, 1, 10);
    Realization b = realize(s, 2, 10);
    REQUIRE(a.z.jumps.events != b.z.jumps.events);
    CHECK_THROWS_AS(check_pth_power_ito(a.x, b.z, s.gen, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(check_pth_power_ito(a.x, a.z, s.gen, 1.0), std::domain_error);
}

TEST_CASE("zero integrand gives degenerate moment ratios")
{
    ConvolutionScenario s = scalar_scenario(0.0, 0.0, 1.0);
    const MonteCarloSettings mc{200, 3, 16, 1};
    CHECK(estimate_kotelenez_ratio(s, mc).degenerate);
    CHECK(estimate_burkholder_ratio(s, 2.0, mc).degenerate);
    CHECK(estimate_bichteler_jacod(s, 1.5, mc).degenerate);
    const BdgCorollaryReport bdg = check_bdg_corollary(s, 1.0, {0.1, 1.0, 10.0}, mc);
    CHECK(bdg.middle.degenerate);
    for (const auto& b : bdg.bounds)
        CHECK(b.am_gm_holds);
}

TEST_CASE("with S = I the maximal ratio is a Doob ratio")
{
    const ConvolutionScenario s = planar_scenario(DiagonalGenerator::zero(2));
    const RatioEstimate r = estimate_kotelenez_ratio(s, MonteCarloSettings{4000, 17, 16, 1});
    CHECK_FALSE(r.degenerate);
    CHECK(r.ratio >= 1.0 - 3.0 * r.half_width);
    CHECK(r.ratio <= 4.0);
    CHECK(r.finite_interval());

    const RatioEstimate b = estimate_burkholder_ratio(s, 2.0, MonteCarloSettings{4000, 17, 16, 1});
    CHECK(b.ratio == doctest::Approx(r.ratio).epsilon(1e-12));
}

TEST_CASE("moment ratios are invariant under integrand scaling")
{
    const ConvolutionScenario s = planar_scenario(DiagonalGenerator({0.0, -1.0}));
    const MonteCarloSettings mc{500, 8, 16, 1};
    for (double c : {0.5, 2.0, 7.0}) {
        const ConvolutionScenario scaled = s.with_jump_scale(c);
        CHECK(estimate_kotelenez_ratio(scaled, mc).ratio ==
              doctest::Approx(estimate_kotelenez_ratio(s, mc).ratio).epsilon(1e-10));
        CHECK(estimate_burkholder_ratio(scaled, 4.0, mc).ratio ==
              doctest::Approx(estimate_burkholder_ratio(s, 4.0, mc).ratio).epsilon(1e-10));
        CHECK(estimate_bichteler_jacod(scaled, 1.5, mc).ratio ==
              doctest::Approx(estimate_bichteler_jacod(s, 1.5, mc).ratio).epsilon(1e-10));
        CHECK(check_bdg_corollary(scaled, 1.0, {1.0}, mc).middle.ratio ==
              doctest::Approx(check_bdg_corollary(s, 1.0, {1.0}, mc).middle.ratio).epsilon(1e-10));
    }
}

TEST_CASE("moment estimators check their preconditions")
{
    const ConvolutionScenario growing = planar_scenario(DiagonalGenerator({0.3, -2.0}));
    const ConvolutionScenario decaying = planar_scenario(DiagonalGenerator({-0.3, -2.0}));
    const MonteCarloSettings mc{50, 1, 8, 1};
    CHECK_THROWS(estimate_kotelenez_ratio(decaying, mc));
    CHECK_THROWS(estimate_burkholder_ratio(growing, 2.0, mc));
    CHECK_THROWS(estimate_burkholder_ratio(decaying, 1.5, mc));
    CHECK_THROWS(estimate_bichteler_jacod(decaying, 0.5, mc));
}

TEST_CASE("BDG corollary with X = 0 and with M = 0")
{
    const ConvolutionScenario s = planar_scenario(DiagonalGenerator({-1.0, -2.0}));
    const MonteCarloSettings mc{300, 4, 16, 1};
    const BdgCorollaryReport no_x = check_bdg_corollary(s, 1.0, {1.0}, mc, 0.0);
    CHECK(no_x.middle.numerator_mean == 0.0);
    CHECK(no_x.moment_sup_2p == 0.0);

    const BdgCorollaryReport report = check_bdg_corollary(s, 2.0, {0.1, 1.0, 10.0}, mc);
    CHECK(report.bounds.size() == 3);
    for (const auto& b : report.bounds) {
        CHECK(b.am_gm_holds);
        CHECK(std::isfinite(b.implied_constant));
    }
}

TEST_CASE("integrate_cell matches closed forms")
{
    const DiagonalGenerator gen({-2.0});
    // X(t) = e^{-2t}, int_0^1 X = (1 - e^{-2}) / 2
    const double v = integrate_cell(gen, StateVector{1.0}, StateVector{0.0}, 0.0, 1.0,
                                    [](double, const StateVector& x) { return x[0]; });
    CHECK(v == doctest::Approx(0.5 * (1.0 - std::exp(-2.0))).epsilon(1e-14));
    // kink of |x| x at the zero crossing of x(t) = 1 - t
    const double kink = integrate_cell(DiagonalGenerator::zero(1), StateVector{1.0}, StateVector{-1.0}, 0.0, 1.7,
                                       [](double, const StateVector& x) { return std::abs(x[0]) * x[0]; });
    CHECK(kink == doctest::Approx((1.0 - std::pow(0.7, 3)) / 3.0).epsilon(1e-14));
}
