#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "mot/baseline/assign.hpp"
#include "mot/baseline/costs.hpp"
#include "mot/core/rng.hpp"

using namespace mot::baseline;
using mot::core::Rng;
using mot::geom::BoundingBox3D;

namespace {

// Exhaustive assignment oracle: maximizes feasible matches, then minimizes
// total cost. Rows <= 7, cols <= 7.
struct BruteResult {
    int matches = -1;
    double cost = 0.0;
};

void brute_recurse(const CostMatrix& m, int row, std::vector<char>& col_used, int matches, double cost,
                   BruteResult& best) {
    if (row == m.rows) {
        if (matches > best.matches || (matches == best.matches && cost < best.cost)) {
            best.matches = matches;
            best.cost = cost;
        }
        return;
    }
    brute_recurse(m, row + 1, col_used, matches, cost, best); // leave row unmatched
    for (int c = 0; c < m.cols; ++c) {
        if (col_used[static_cast<std::size_t>(c)] || !m.is_feasible(row, c)) continue;
        col_used[static_cast<std::size_t>(c)] = 1;
        brute_recurse(m, row + 1, col_used, matches + 1, cost + m.at(row, c), best);
        col_used[static_cast<std::size_t>(c)] = 0;
    }
}

BruteResult brute_force(const CostMatrix& m) {
    BruteResult best;
    std::vector<char> used(static_cast<std::size_t>(m.cols), 0);
    brute_recurse(m, 0, used, 0, 0.0, best);
    return best;
}

} // namespace

TEST_CASE("hungarian: 2x2 example") {
    CostMatrix m(2, 2);
    m.set(0, 0, 1);
    m.set(0, 1, 2);
    m.set(1, 0, 2);
    m.set(1, 1, 1);
    const Assignment a = hungarian_solve(m);
    REQUIRE(a.matches.size() == 2);
    CHECK(a.matches[0] == std::pair<int, int>{0, 0});
    CHECK(a.matches[1] == std::pair<int, int>{1, 1});
    CHECK(a.total_cost == doctest::Approx(2.0));
}

TEST_CASE("hungarian: single feasible cell") {
    CostMatrix m(1, 1, 7.0);
    const Assignment a = hungarian_solve(m);
    REQUIRE(a.matches.size() == 1);
    CHECK(a.total_cost == doctest::Approx(7.0));
    CHECK(a.unmatched_rows.empty());
    CHECK(a.unmatched_cols.empty());
}

TEST_CASE("hungarian: empty and fully gated matrices") {
    CHECK(hungarian_solve(CostMatrix(0, 0)).matches.empty());
    const Assignment a = hungarian_solve(CostMatrix(2, 0));
    CHECK(a.matches.empty());
    CHECK(a.unmatched_rows.size() == 2);

    CostMatrix gated(2, 3, 1.0);
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 3; ++c) gated.gate(r, c);
    const Assignment g = hungarian_solve(gated);
    CHECK(g.matches.empty());
    CHECK(g.unmatched_rows.size() == 2);
    CHECK(g.unmatched_cols.size() == 3);
}

TEST_CASE("hungarian equals brute force on random integer matrices up to 7x7") {
    Rng rng(7777);
    for (int trial = 0; trial < 300; ++trial) {
        const int rows = rng.uniform_int(1, 7);
        const int cols = rng.uniform_int(1, 7);
        CostMatrix m(rows, cols);
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c) {
                m.set(r, c, rng.uniform_int(0, 99));
                if (trial % 3 == 0 && rng.bernoulli(0.25)) m.gate(r, c); // gated instances too
            }
        const Assignment got = hungarian_solve(m);
        const BruteResult want = brute_force(m);
        CAPTURE(trial);
        CHECK(static_cast<int>(got.matches.size()) == want.matches);
        CHECK(got.total_cost == want.cost); // integer costs: exact
    }
}

TEST_CASE("greedy: diagonal-dominant matrix matches hungarian") {
    CostMatrix m(3, 3, 100.0);
    m.set(0, 0, 1);
    m.set(1, 1, 2);
    m.set(2, 2, 3);
    const Assignment g = greedy_assign(m);
    const Assignment h = hungarian_solve(m);
    CHECK(g.matches == h.matches);
    CHECK(g.total_cost == doctest::Approx(h.total_cost));
}

TEST_CASE("greedy is myopic: classic 2x2 trap") {
    CostMatrix m(2, 2);
    m.set(0, 0, 1);
    m.set(0, 1, 2);
    m.set(1, 0, 2);
    m.set(1, 1, 100);
    CHECK(greedy_assign(m).total_cost == doctest::Approx(101.0));
    CHECK(hungarian_solve(m).total_cost == doctest::Approx(4.0));
}

TEST_CASE("greedy total cost is never below hungarian") {
    Rng rng(1234);
    for (int trial = 0; trial < 200; ++trial) {
        const int rows = rng.uniform_int(1, 6);
        const int cols = rng.uniform_int(1, 6);
        CostMatrix m(rows, cols);
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c) m.set(r, c, rng.uniform(0.0, 10.0));
        const Assignment g = greedy_assign(m);
        const Assignment h = hungarian_solve(m);
        CHECK(g.matches.size() == h.matches.size());
        CHECK(g.total_cost >= h.total_cost - 1e-9);
    }
}

TEST_CASE("greedy: empty matrix") {
    CHECK(greedy_assign(CostMatrix(0, 5)).matches.empty());
}

TEST_CASE("position cost basics") {
    BoundingBox3D a{0, 0, 0, 1, 1, 1, 0};
    BoundingBox3D b{3, 4, 0, 1, 1, 1, 0};
    CHECK(position_cost(a, a, PositionMetric::euclidean) == doctest::Approx(0.0));
    CHECK(position_cost(a, b, PositionMetric::euclidean) == doctest::Approx(5.0));
    CHECK(position_cost(a, b, PositionMetric::manhattan) == doctest::Approx(7.0));
}

TEST_CASE("position cost: triangle inequality on random triples") {
    Rng rng(55);
    for (int trial = 0; trial < 300; ++trial) {
        auto rand_box = [&]() {
            return BoundingBox3D{rng.uniform(-30, 30), rng.uniform(0, 60), rng.uniform(-2, 2), 4, 2, 1.5, 0};
        };
        const auto a = rand_box(), b = rand_box(), c = rand_box();
        for (PositionMetric metric : {PositionMetric::euclidean, PositionMetric::manhattan}) {
            CHECK(position_cost(a, c, metric) <=
                  position_cost(a, b, metric) + position_cost(b, c, metric) + 1e-12);
            CHECK(position_cost(a, b, metric) == doctest::Approx(position_cost(b, a, metric)));
        }
    }
}

TEST_CASE("histogram cost: identical histograms cost zero") {
    const std::vector<double> p{0.25, 0.25, 0.5};
    CHECK(histogram_cost(p, p, HistogramMetric::bhattacharyya) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(histogram_cost(p, p, HistogramMetric::chisquare) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("histogram cost: disjoint support clamps bhattacharyya and flags it") {
    const std::vector<double> p{1.0, 0.0};
    const std::vector<double> q{0.0, 1.0};
    bool clamped = false;
    CHECK(histogram_cost(p, q, HistogramMetric::bhattacharyya, &clamped) == kBhattacharyyaClamp);
    CHECK(clamped);
}

TEST_CASE("histogram cost: two-bin closed form") {
    const std::vector<double> p{1.0, 0.0};
    const std::vector<double> q{0.5, 0.5};
    CHECK(histogram_cost(p, q, HistogramMetric::bhattacharyya) ==
          doctest::Approx(-std::log(std::sqrt(0.5))).epsilon(1e-9));
    CHECK(histogram_cost(p, q, HistogramMetric::bhattacharyya) == doctest::Approx(0.34657).epsilon(1e-4));
}

TEST_CASE("histogram cost: non-normalized input rejected") {
    const std::vector<double> p{0.5, 0.5};
    const std::vector<double> zero{0.0, 0.0};
    CHECK_THROWS(histogram_cost(p, zero, HistogramMetric::chisquare));
}

TEST_CASE("appearance histogram is a distribution") {
    Rng rng(9);
    mot::core::Tensor feat = mot::core::Tensor::uniform({5, 5, 3}, rng, -2.f, 2.f);
    const auto h = appearance_histogram(feat, -2.0, 2.0, 16);
    CHECK(h.size() == 48);
    double sum = 0.0;
    for (double v : h) {
        CHECK(v >= 0.0);
        sum += v;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
}
