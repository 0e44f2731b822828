#include <cmath>

#include "doctest.h"
#include "adsholo/ads_model.hpp"
#include "adsholo/holography.hpp"
#include "adsholo/phase_core.hpp"

using namespace adsholo;

namespace {

ExperimentPlan small_plan() {
    ExperimentPlan p;
    p.model.cross_validate = false;
    p.O.segments = {{Component::Minus, {-3.3, 3.3}}, {Component::Plus, {-3.3, 3.3}}};
    p.V.rects = {Rect{-0.5, 0.5, -0.8, 0.8}};
    p.ladder = {25, 50, 100};
    p.bulk_count = 3;
    return p;
}

int gram_rank(const AdsStripModel& m, const std::vector<BoundaryTestFunction>& dict) {
    Mat B(2 * m.K(), dict.size());
    for (std::size_t i = 0; i < dict.size(); ++i) B.col(i) = embed(dual_boundary_map(m, dict[i]));
    Eigen::JacobiSVD<Mat> svd(B);
    const Vec s = svd.singularValues();
    int r = 0;
    for (int i = 0; i < s.size(); ++i) r += s(i) > 1e-10 * s(0);
    return r;
}

} // namespace

TEST_SUITE("holography") {

TEST_CASE("dictionary: single bump, prefix nesting, rank growth") {
    const ExperimentPlan p = small_plan();
    const AdsStripModel m = build_model(p.model);
    const auto d1 = boundary_dictionary(m, p.O, 1, 1);
    REQUIRE(d1.size() == 1);
    const auto& f = d1.front();
    // centred: symmetric samples about the middle of the first segment
    CHECK(f.component == Component::Minus);
    CHECK(f.samples.maxCoeff() > 0.0);

    const auto d25 = boundary_dictionary(m, p.O, 25, 1);
    const auto d50 = boundary_dictionary(m, p.O, 50, 1);
    for (int i = 0; i < 25; ++i) {
        CHECK(d25[i].grid.first == d50[i].grid.first);
        CHECK(d25[i].samples == d50[i].samples);
    }
    int prev = 0;
    for (int n : {5, 10, 20, 40, 80}) {
        const int r = gram_rank(m, boundary_dictionary(m, p.O, n, 1));
        CHECK(r >= prev);
        prev = r;
    }
}

TEST_CASE("empty bulk region gives zero residuals") {
    ExperimentPlan p = small_plan();
    p.V.rects.clear();
    const auto tab = run_inclusion(p);
    for (const auto& row : tab.rows) CHECK(row.max_residual == 0.0);
    CHECK(tab.witness_ok);
}

TEST_CASE("isotony of boundary spans") {
    const ExperimentPlan p = small_plan();
    const AdsStripModel m = build_model(p.model);
    BoundaryRegion O1{{{Component::Minus, {-1.0, 1.0}}}};
    const auto small = boundary_dictionary(m, O1, 12, 4);
    const auto big = boundary_dictionary(m, p.O, 40, 4);
    SubspaceGenerators bd{{}, "O2"}, sub{{}, "O1"};
    for (const auto& f : small) {
        bd.generators.push_back(embed(dual_boundary_map(m, f)));
        sub.generators.push_back(bd.generators.back());
    }
    for (const auto& f : big) bd.generators.push_back(embed(dual_boundary_map(m, f)));
    const auto rep = inclusion_check(bd, sub, mode_phase_space(m.K()));
    CHECK(rep.max_residual <= 1e-9);

    // V1 inside V2: generators of V1 are admissible test functions of V2
    const BulkRegion V1{{Rect{-0.2, 0.2, -0.3, 0.3}}};
    for (const auto& g : bulk_generators(m, V1, 4, 2)) {
        for (const Rect& r : g.support) {
            CHECK(r.t0 >= -0.5);
            CHECK(r.t1 <= 0.5);
            CHECK(r.x0 >= -0.8);
            CHECK(r.x1 <= 0.8);
        }
    }
}

TEST_CASE("seeded determinism") {
    const ExperimentPlan p = small_plan();
    const AdsStripModel m = build_model(p.model);
    const auto a = run_inclusion(m, p);
    const auto b = run_inclusion(m, p);
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(a.rows[i].max_residual == b.rows[i].max_residual);
        CHECK(a.rows[i].mean_residual == b.rows[i].mean_residual);
    }
    CHECK(a.final_per_generator == b.final_per_generator);
}

TEST_CASE("time-translation covariance") {
    ExperimentPlan p = small_plan();
    const AdsStripModel m = build_model(p.model);
    const auto base = run_inclusion(m, p);

    const double delta = 40 * m.time_step();
    for (auto& s : p.O.segments) s.interval = {s.interval.a + delta, s.interval.b + delta};
    for (auto& r : p.V.rects) r = Rect{r.t0 + delta, r.t1 + delta, r.x0, r.x1};
    const auto moved = run_inclusion(m, p);
    REQUIRE(moved.rows.size() == base.rows.size());
    for (std::size_t i = 0; i < base.rows.size(); ++i)
        CHECK(std::abs(moved.rows[i].max_residual - base.rows[i].max_residual) <= 1e-9);
}

TEST_CASE("ladder decreases for the default regions") {
    const ExperimentPlan p = small_plan();
    const auto tab = run_inclusion(p);
    CHECK(tab.monotone);
    CHECK(tab.witness_ok);
    CHECK(tab.rows.back().max_residual < tab.rows.front().max_residual);
}

TEST_CASE("least squares recovers a member of the span") {
    const PhaseSpace ps = mode_phase_space(3);
    Mat B(6, 3);
    B << 1, 0, 2, 0, 1, 0, 0, 0, 1, 1, 1, 0, 0, 2, 0, 0, 0, 1;
    const Vec w = B * Vec::LinSpaced(3, 0.5, 1.5);
    const Vec a = least_squares_approximant(B, w, ps);
    CHECK((a - w).norm() <= 1e-9 * w.norm());
}

} // TEST_SUITE
