#include "sconv/grid.hpp"
#include "sconv/levy.hpp"
#include "sconv/statistics.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <sstream>

using namespace sconv;

TEST_CASE("zero horizon has no events")
{
    RngStream s(1);
    CHECK(sample_prm(MarkSpace({2.0}), 0.0, s).events.empty());
}

TEST_CASE("inter-arrival times of a single mark have mean 1/nu")
{
    const double nu = 2.5;
    const MarkSpace marks({nu});
    std::vector<double> gaps;
    RngStream s(7);
    while (gaps.size() < 100000) {
        const MarkedJumpPath path = sample_prm(marks, 50.0, s);
        double last = 0.0;
        for (const auto& e : path.events) {
            gaps.push_back(e.time - last);
            last = e.time;
        }
    }
    gaps.resize(100000);
    const SampleSummary sum = summarize(gaps);
    CHECK(std::abs(sum.mean - 1.0 / nu) <= 3.0 * sum.std_error());
}

TEST_CASE("event count has the Poisson mean")
{
    const MarkSpace marks({0.5, 1.5});
    std::vector<double> counts(100000);
    std::vector<double> mark_one(100000);
    for (std::size_t i = 0; i < counts.size(); ++i) {
        RngStream s = derive_stream(5, i);
        const MarkedJumpPath path = sample_prm(marks, 5.0, s);
        counts[i] = static_cast<double>(path.events.size());
        for (const auto& e : path.events)
            mark_one[i] += e.mark == 1 ? 1.0 : 0.0;
    }
    const double mean = summarize(counts).mean;
    CHECK(std::abs(mean - 10.0) <= 3.0 * std::sqrt(10.0 / 1e5));
    CHECK(std::abs(summarize(mark_one).mean - 7.5) <= 3.0 * std::sqrt(7.5 / 1e5));
}

TEST_CASE("events are increasing and inside the horizon")
{
    RngStream s(9);
    const MarkedJumpPath path = sample_prm(MarkSpace({3.0, 1.0, 2.0}), 4.0, s);
    for (std::size_t i = 0; i < path.events.size(); ++i) {
        CHECK(path.events[i].time > (i == 0 ? 0.0 : path.events[i - 1].time));
        CHECK(path.events[i].time <= 4.0);
        CHECK(path.events[i].mark < 3);
    }
}

TEST_CASE("same stream index reproduces the same path")
{
    RngStream a = derive_stream(42, 17);
    RngStream b = derive_stream(42, 17);
    RngStream c = derive_stream(42, 18);
    const MarkSpace marks({1.0, 2.0});
    const MarkedJumpPath pa = sample_prm(marks, 3.0, a);
    CHECK(pa == sample_prm(marks, 3.0, b));
    CHECK_FALSE(pa == sample_prm(marks, 3.0, c));
}

TEST_CASE("compensated integral of zero is zero")
{
    RngStream s(2);
    const MarkSpace marks({1.0});
    const MarkedJumpPath path = sample_prm(marks, 2.0, s);
    const TimeGrid grid = TimeGrid::jump_adapted(2.0, 10, path);
    const VectorCadlagPath m =
        compensated_integral(path, marks, [](double, std::size_t) { return StateVector(2); }, grid);
    for (const auto& v : m.right)
        CHECK(v == StateVector(2));
}

TEST_CASE("compensated integral of a constant is (N_T - nu T) c")
{
    const MarkSpace marks({1.7});
    const StateVector c{0.5, -2.0};
    for (std::uint64_t i = 0; i < 20; ++i) {
        RngStream s = derive_stream(3, i);
        const MarkedJumpPath path = sample_prm(marks, 1.5, s);
        const TimeGrid grid = TimeGrid::jump_adapted(1.5, 8, path);
        const VectorCadlagPath m = compensated_integral(path, marks, [&](double, std::size_t) { return c; }, grid);
        const double n = static_cast<double>(path.events.size());
        const StateVector expected = (n - 1.7 * 1.5) * c;
        CHECK(norm(m.right.back() - expected) <= 1e-12 * (1.0 + norm(expected)));
    }
}

TEST_CASE("compensated integral has mean zero")
{
    const MarkSpace marks({1.0, 2.0});
    std::vector<double> terminal(10000);
    for (std::size_t i = 0; i < terminal.size(); ++i) {
        RngStream s = derive_stream(4, i);
        const MarkedJumpPath path = sample_prm(marks, 1.0, s);
        const TimeGrid grid = TimeGrid::jump_adapted(1.0, 16, path);
        const VectorCadlagPath m = compensated_integral(
            path, marks, [](double t, std::size_t j) { return StateVector{(j == 0 ? 1.0 : -0.5) * (1.0 + t)}; }, grid);
        terminal[i] = m.right.back()[0];
    }
    const SampleSummary sum = summarize(terminal);
    CHECK(std::abs(sum.mean) <= 3.0 * sum.std_error());
}

TEST_CASE("quadratic variation of jump sets")
{
    CHECK(quadratic_variation({}).total() == 0.0);

    const std::vector<JumpIncrement> single{{0.4, StateVector{3.0, 4.0}}};
    const QuadraticVariationPath qv = quadratic_variation(single);
    CHECK(qv(0.3) == 0.0);
    CHECK(qv(0.4) == 25.0);
    CHECK(qv(1.0) == 25.0);
    CHECK(qv.continuous_part(1.0) == 0.0);

    RngStream s(8);
    std::vector<JumpIncrement> jumps;
    double t = 0.0, brute = 0.0;
    for (int i = 0; i < 50; ++i) {
        t += s.exponential(3.0);
        StateVector v{s.normal(), s.normal(), s.normal()};
        brute += v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
        jumps.push_back({t, v});
    }
    CHECK(quadratic_variation(jumps).total() == doctest::Approx(brute).epsilon(1e-13));
}

TEST_CASE("finite variation path")
{
    const TimeGrid grid = TimeGrid::uniform(2.0, 8);
    const FiniteVariationPath zero = finite_variation_path([](double) { return StateVector(3); }, grid);
    CHECK(zero.path.right.back() == StateVector(3));
    CHECK(zero.total_variation.back() == 0.0);

    const FiniteVariationPath unit = finite_variation_path([](double) { return StateVector{1.0}; }, grid);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        CHECK(unit.path.right[k][0] == doctest::Approx(grid[k]));
        CHECK(unit.total_variation[k] == doctest::Approx(grid[k]));
    }

    auto density = [](double t) { return StateVector{std::sin(5.0 * t), std::cos(3.0 * t)}; };
    const FiniteVariationPath coarse = finite_variation_path(density, grid);
    const FiniteVariationPath fine = finite_variation_path(density, TimeGrid::uniform(2.0, 80));
    CHECK(coarse.total_variation.back() >= norm(coarse.path.right.back()));
    CHECK(fine.total_variation.back() >= norm(fine.path.right.back()));
    CHECK(norm(coarse.path.right.back() - fine.path.right.back()) < 0.05);
}

TEST_CASE("uniform grids nest bit-for-bit")
{
    const TimeGrid coarse = TimeGrid::uniform(1.3, 7);
    const TimeGrid fine = TimeGrid::uniform(1.3, 28);
    for (std::size_t k = 0; k < coarse.size(); ++k)
        CHECK(coarse[k] == fine[4 * k]);
    CHECK(coarse.horizon() == 1.3);
}

TEST_CASE("jump-adapted grid contains every event")
{
    RngStream s(12);
    const MarkedJumpPath path = sample_prm(MarkSpace({4.0}), 2.0, s);
    const TimeGrid grid = TimeGrid::jump_adapted(2.0, 5, path);
    CHECK_NOTHROW(require_jump_adapted(grid, path));
    CHECK(grid.size() >= 6 + path.events.size() - 1);
    CHECK_THROWS_AS(require_jump_adapted(TimeGrid::uniform(2.0, 5), path), std::invalid_argument);
}

TEST_CASE("mark space validation")
{
    CHECK_THROWS_AS(MarkSpace(std::vector<double>{}), std::invalid_argument);
    CHECK_THROWS_AS(MarkSpace({1.0, -1.0}), std::invalid_argument);
    CHECK(MarkSpace({1.0, 2.0}).scaled(2.0).total_rate() == doctest::Approx(6.0));
}

TEST_CASE("cadlag csv export")
{
    VectorCadlagPath p;
    p.push(0.0, StateVector{1.0}, StateVector{1.0}, false);
    p.push(0.5, StateVector{1.0}, StateVector{0.1}, true);
    std::ostringstream os;
    write_cadlag_csv(os, p);
    const std::string text = os.str();
    CHECK(text.find("0.1") != std::string::npos);
    CHECK(std::count(text.begin(), text.end(), '\n') == 3);
}
