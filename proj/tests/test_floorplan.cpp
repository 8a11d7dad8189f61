///////////////////////////////////////////////////////////////////////////
//
// BSD 3-Clause License
//
// Copyright (c) 2022, The Regents of the University of California
// All rights reserved.
//
// Redistribution and use in source and binary forms, with or without
// modification, are permitted provided that the following conditions are met:
//
// * Redistributions of source code must retain the above copyright notice, this
//   list of conditions and the following disclaimer.
//
// * Redistributions in binary form must reproduce the above copyright notice,
//   this list of conditions and the following disclaimer in the documentation
//   and/or other materials provided with the distribution.
//
// * Neither the name of the copyright holder nor the names of its
//   contributors may be used to endorse or promote products derived from
//   this software without specific prior written permission.
//
// THIS SOFTWARE IS PROVIDED BY THE COPYRIGHT HOLDERS AND CONTRIBUTORS "AS IS"
// AND ANY EXPRESS OR IMPLIED WARRANTIES, INCLUDING, BUT NOT LIMITED TO, THE
// IMPLIED WARRANTIES OF MERCHANTABILITY AND FITNESS FOR A PARTICULAR PURPOSE
// ARE DISCLAIMED. IN NO EVENT SHALL THE COPYRIGHT HOLDER OR CONTRIBUTORS BE
// LIABLE FOR ANY DIRECT, INDIRECT, INCIDENTAL, SPECIAL, EXEMPLARY, OR
// CONSEQUENTIAL DAMAGES (INCLUDING, BUT NOT LIMITED TO, PROCUREMENT OF
// SUBSTITUTE GOODS OR SERVICES; LOSS OF USE, DATA, OR PROFITS; OR BUSINESS
// INTERRUPTION) HOWEVER CAUSED AND ON ANY THEORY OF LIABILITY, WHETHER IN
// CONTRACT, STRICT LIABILITY, OR TORT (INCLUDING NEGLIGENCE OR OTHERWISE)
// ARISING IN ANY WAY OUT OF THE USE OF THIS SOFTWARE, EVEN IF ADVISED OF THE
// POSSIBILITY OF SUCH DAMAGE.
//
///////////////////////////////////////////////////////////////////////////////

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "chiplet/floorplan.h"
#include "oracles.h"

using namespace chiplet;
using namespace chiplet::testing;

namespace {

bool Overlaps(const Rect& a, const Rect& b)
{
  return std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x) > 1e-9
         && std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y) > 1e-9;
}

Floorplan Place(const std::vector<Rect>& rects)
{
  Floorplan fp;
  for (const auto& r : rects) {
    fp.xs.push_back(r.x);
    fp.ys.push_back(r.y);
    fp.widths.push_back(r.w);
    fp.heights.push_back(r.h);
    fp.package_w = std::max(fp.package_w, r.x + r.w);
    fp.package_h = std::max(fp.package_h, r.y + r.h);
  }
  fp.sp.first.resize(rects.size());
  std::iota(fp.sp.first.begin(), fp.sp.first.end(), 0);
  fp.sp.second = fp.sp.first;
  return fp;
}

FPProblem RandomProblem(int n, std::mt19937_64& rng, double reach)
{
  std::uniform_real_distribution<double> area(4.0, 60.0);
  FPProblem p;
  p.params = FixedShapeParams();
  p.params.walkers = 4;
  p.separation = 0.5;
  for (int i = 0; i < n; ++i) {
    p.areas.push_back(area(rng));
  }
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      if (rng() % 3 != 0) {
        p.nets.push_back({a, b, 1 + static_cast<int64_t>(rng() % 8), 0.2, reach});
      }
    }
  }
  return p;
}

}  // namespace

TEST_CASE("facing net length closed form")
{
  CHECK(FacingNetLength(3.0, 1.0, 8.0) == doctest::Approx(5.0));
  CHECK(FacingNetLength(3.0, 1.0, 0.0) == doctest::Approx(1.0));
  CHECK(FacingNetLength(2.0, 0.0, 1e-12) == doctest::Approx(0.0));
}

TEST_CASE("row of 5 mm chiplets with 1 mm gaps gives 1/7/13/19 mm")
{
  std::vector<Rect> row;
  for (int i = 0; i < 5; ++i) {
    row.push_back({6.0 * i, 0.0, 5.0, 5.0});
  }
  const double expect[] = {1.0, 7.0, 13.0, 19.0};
  for (int d = 1; d <= 4; ++d) {
    CHECK(NetLength(row[0], row[d], 1e-9) == doctest::Approx(expect[d - 1]).epsilon(0.01));
  }
}

TEST_CASE("non-facing length adds both gaps and corner io depth")
{
  const Rect a{0, 0, 2, 2};
  const Rect b{5, 6, 2, 2};
  CHECK(NetLength(a, b, 2.0) == doctest::Approx(3.0 + 4.0 + 2.0 * std::sqrt(4.0)));
  CHECK(NetLength(a, b, 0.0) == doctest::Approx(7.0));
  CHECK(NetLength(a, b, 2.0) == doctest::Approx(NetLength(b, a, 2.0)));
}

TEST_CASE("reach penalty arithmetic and per-chiplet totals")
{
  // one net of 4 bits, length 5, reach 3
  const Floorplan fp = Place({{0, 0, 5, 5}, {10, 0, 5, 5}});
  const std::vector<ChipletNet> one{{0, 1, 4, 0.0, 3.0}};
  CHECK(ReachPenalty(fp, one) == doctest::Approx(8.0));
  const std::vector<ChipletNet> loose{{0, 1, 4, 0.0, 30.0}};
  CHECK(ReachPenalty(fp, loose) == 0.0);

  // chiplet 0 carries nets with penalties 8 and 2
  const Floorplan three = Place({{0, 0, 5, 5}, {10, 0, 5, 5}, {0, 8, 5, 5}});
  const std::vector<ChipletNet> nets{{0, 1, 4, 0.0, 3.0}, {0, 2, 2, 0.0, 2.0}};
  std::vector<double> per;
  CHECK(ReachPenalty(three, nets, &per) == doctest::Approx(10.0));
  CHECK(per[0] == doctest::Approx(10.0));
  CHECK(per[1] == doctest::Approx(8.0));
  CHECK(per[2] == doctest::Approx(2.0));
  // independent scan for the victim
  int victim = 0;
  for (int i = 1; i < 3; ++i) {
    double mine = 0.0;
    double best = 0.0;
    for (const auto& n : nets) {
      const double len = NetLength(three.rect(n.a), three.rect(n.b), n.io_area);
      const double p = n.bits * std::max(0.0, len - n.reach);
      mine += (n.a == i || n.b == i) ? p : 0.0;
      best += (n.a == victim || n.b == victim) ? p : 0.0;
    }
    if (mine > best) {
      victim = i;
    }
  }
  CHECK(std::max_element(per.begin(), per.end()) - per.begin() == victim);
}

TEST_CASE("sequence pair evaluation")
{
  SUBCASE("single chiplet")
  {
    Floorplan fp;
    fp.sp = {{0}, {0}};
    fp.widths = {3.0};
    fp.heights = {2.0};
    EvaluateSP(fp, 1.0);
    CHECK(fp.xs[0] == 0.0);
    CHECK(fp.ys[0] == 0.0);
    CHECK(fp.package_w == 3.0);
    CHECK(fp.package_h == 2.0);
  }
  SUBCASE("two chiplets side by side")
  {
    Floorplan fp;
    fp.sp = {{0, 1}, {0, 1}};
    fp.widths = {3.0, 1.0};
    fp.heights = {2.0, 4.0};
    EvaluateSP(fp, 0.5);
    CHECK(fp.xs[1] == doctest::Approx(3.5));
    CHECK(fp.ys[1] == 0.0);
    CHECK(fp.package_w == doctest::Approx(4.5));
  }
  SUBCASE("all 36 pairs of three chiplets are legal")
  {
    std::vector<int> p1{0, 1, 2};
    int count = 0;
    do {
      std::vector<int> p2{0, 1, 2};
      do {
        Floorplan fp;
        fp.sp = {p1, p2};
        fp.widths = {2.0, 3.0, 1.5};
        fp.heights = {1.0, 2.5, 4.0};
        EvaluateSP(fp, 0.25);
        const auto report = CheckFeasible(fp, {}, 0.25);
        CHECK(report.feasible);
        for (int i = 0; i < 3; ++i) {
          for (int j = i + 1; j < 3; ++j) {
            CHECK_FALSE(Overlaps(fp.rect(i), fp.rect(j)));
          }
          CHECK(fp.xs[i] + fp.widths[i] <= fp.package_w + 1e-12);
          CHECK(fp.ys[i] + fp.heights[i] <= fp.package_h + 1e-12);
        }
        ++count;
      } while (std::next_permutation(p2.begin(), p2.end()));
    } while (std::next_permutation(p1.begin(), p1.end()));
    CHECK(count == 36);
  }
}

TEST_CASE("objective is translation invariant")
{
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    FPProblem p = RandomProblem(4, rng, 3.0);
    Floorplan fp = InitialFloorplan(p);
    std::shuffle(fp.sp.first.begin(), fp.sp.first.end(), rng);
    EvaluateSP(fp, p.separation);
    const double before = Objective(fp, p.nets, p.params).Value();
    for (auto& x : fp.xs) {
      x += 17.25;
    }
    for (auto& y : fp.ys) {
      y -= 3.5;
    }
    CHECK(Objective(fp, p.nets, p.params).Value() == doctest::Approx(before));
  }
}

TEST_CASE("feasibility checks")
{
  SUBCASE("single chiplet")
  {
    CHECK(CheckFeasible(Place({{0, 0, 4, 4}}), {}, 1.0).feasible);
  }
  SUBCASE("gap below separation")
  {
    const auto report = CheckFeasible(Place({{0, 0, 2, 2}, {2.3, 0, 2, 2}}), {}, 0.5);
    CHECK_FALSE(report.feasible);
    REQUIRE(report.violations.size() == 1);
    CHECK(report.violations[0].kind == Violation::Kind::kSeparation);
    CHECK(report.violations[0].magnitude == doctest::Approx(0.2));
  }
  SUBCASE("overlap")
  {
    const auto report = CheckFeasible(Place({{0, 0, 2, 2}, {1, 1, 2, 2}}), {}, 0.0);
    CHECK_FALSE(report.feasible);
    CHECK(report.violations[0].kind == Violation::Kind::kOverlap);
  }
  SUBCASE("resizing B fixes its reach violation with E")
  {
    // E spans x in [2, 8] above B; B initially spans [0, 2.5].
    const std::vector<ChipletNet> nets{{0, 1, 16, 4.0, 3.0}};
    const Floorplan before = Place({{0, 0, 2.5, 4}, {2, 4.5, 6, 3}});
    const auto bad = CheckFeasible(before, nets, 0.5);
    CHECK_FALSE(bad.feasible);
    REQUIRE(bad.violations.size() == 1);
    CHECK(bad.violations[0].kind == Violation::Kind::kReach);
    CHECK(bad.violations[0].a == 0);
    CHECK(bad.violations[0].b == 1);
    const Floorplan after = Place({{0, 0, 8, 4}, {2, 4.5, 6, 3}});
    CHECK(CheckFeasible(after, nets, 0.5).feasible);
  }
  SUBCASE("undersized shape")
  {
    const std::vector<double> areas{5.0};
    const auto report = CheckFeasible(Place({{0, 0, 2, 2}}), {}, 0.0, &areas);
    CHECK_FALSE(report.feasible);
    CHECK(report.violations[0].kind == Violation::Kind::kShape);
  }
}

TEST_CASE("single chiplet anneal")
{
  FPProblem p;
  p.areas = {9.0};
  p.params.walkers = 2;
  const AnnealResult r = AnnealWith(p, {200, 1.0, 0.9}, 1);
  CHECK(r.objective.Value() == doctest::Approx(18.0));
  CHECK(CheckFeasible(r.floorplan, {}, 0.0, &p.areas).feasible);
}

TEST_CASE("greedy anneal never accepts an uphill move")
{
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 5; ++trial) {
    FPProblem p = RandomProblem(5, rng, 4.0);
    p.params.move_probs = {0.2, 0.2, 0.2, 0.2, 0.2};
    std::vector<double> trace;
    AnnealWith(p, {2000, 0.0, 0.989}, 10 + trial, nullptr, 1, &trace);
    REQUIRE(trace.size() > 100);
    for (size_t i = 1; i < trace.size(); ++i) {
      CHECK(trace[i] <= trace[i - 1] + 1e-9);
    }
  }
}

TEST_CASE("anneal output is legal, covers areas, and is deterministic")
{
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 6; ++trial) {
    FPProblem p = RandomProblem(6, rng, 2.0);
    p.params.move_probs = {0.2, 0.2, 0.2, 0.2, 0.2};
    const AnnealResult a = AnnealWith(p, {3000, std::nullopt, 0.989}, trial);
    const AnnealResult b = AnnealWith(p, {3000, std::nullopt, 0.989}, trial);
    const AnnealResult c = AnnealWith(p, {3000, std::nullopt, 0.989}, trial, nullptr, 3);
    CHECK(a.floorplan == b.floorplan);
    CHECK(a.floorplan == c.floorplan);
    const auto report = CheckFeasible(a.floorplan, {}, p.separation, &p.areas);
    CHECK(report.feasible);
    for (int i = 0; i < a.floorplan.size(); ++i) {
      const double ratio = a.floorplan.widths[i] / a.floorplan.heights[i];
      CHECK(ratio >= 0.25 - 1e-9);
      CHECK(ratio <= 4.0 + 1e-9);
    }
  }
}

TEST_CASE("warm start never gets worse")
{
  std::mt19937_64 rng(12);
  FPProblem p = RandomProblem(5, rng, 3.0);
  p.params.move_probs = {0.2, 0.2, 0.2, 0.2, 0.2};
  const AnnealResult first = AnnealWith(p, {2000, std::nullopt, 0.989}, 3);
  const AnnealResult second
      = AnnealWith(p, {500, 0.0, 0.989}, 4, &first.floorplan);
  CHECK(second.objective.Value() <= first.objective.Value() + 1e-9);
}

TEST_CASE("fixed-shape anneal reaches the exhaustive sequence-pair minimum")
{
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 6; ++trial) {
    const int n = 2 + trial % 3;
    const FPProblem p = RandomProblem(n, rng, trial % 2 ? 3.0 : 50.0);
    const double oracle = ExhaustiveSPMin(p);
    const AnnealResult r = AnnealWith(p, {4000, std::nullopt, 0.989}, trial);
    CAPTURE(n);
    CHECK(r.objective.Value() >= oracle - 1e-9);
    CHECK(r.objective.Value() <= 1.05 * oracle);
  }
}

TEST_CASE("floorplan json lists every chiplet")
{
  FPProblem p;
  p.areas = {4.0, 9.0};
  const Floorplan fp = InitialFloorplan(p);
  const auto doc = FloorplanToJson(fp, {"x", "y"});
  CHECK(doc["chiplets"].size() == 2);
  CHECK(doc["chiplets"][1]["id"] == "y");
}
