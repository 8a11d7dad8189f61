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
#include <numeric>
#include <random>
#include <set>

#include "chiplet/error.h"
#include "chiplet/partition.h"
#include "chiplet/testgen.h"
#include "fixtures.h"
#include "oracles.h"

using namespace chiplet;
using namespace chiplet::testing;

namespace {

bool SameGrouping(const std::vector<int>& a, const std::vector<int>& b)
{
  for (size_t i = 0; i < a.size(); ++i) {
    for (size_t j = 0; j < a.size(); ++j) {
      if ((a[i] == a[j]) != (b[i] == b[j])) {
        return false;
      }
    }
  }
  return true;
}

BlockGraph MakeGraph(int n, const std::vector<std::tuple<int, int, double>>& edges)
{
  Netlist nl;
  for (int i = 0; i < n; ++i) {
    nl.blocks.push_back(MakeBlock("v" + std::to_string(i), 1.0));
  }
  for (auto [a, b, w] : edges) {
    nl.nets.push_back(MakeNet("v" + std::to_string(a), "v" + std::to_string(b),
                              static_cast<int64_t>(w)));
  }
  return BuildBlockGraph(nl);
}

// Minimum 2-way cut over every bipartition with both sides nonempty.
double BruteMinCut(const BlockGraph& g)
{
  double best = std::numeric_limits<double>::infinity();
  for (int mask = 1; mask < (1 << g.n) - 1; ++mask) {
    std::vector<int> labels(g.n);
    for (int v = 0; v < g.n; ++v) {
      labels[v] = (mask >> v) & 1;
    }
    best = std::min(best, g.CutWeight(labels));
  }
  return best;
}

}  // namespace

TEST_CASE("set partition enumeration counts")
{
  int count = 0;
  ForEachSetPartition(4, 4, [&](const Partition&) { ++count; });
  CHECK(count == 15);
  count = 0;
  ForEachSetPartition(8, 3, [&](const Partition& p) {
    CHECK(p.Valid(8));
    ++count;
  });
  CHECK(count == 1 + 127 + 966);
}

TEST_CASE("block graph merges opposite nets")
{
  Netlist nl;
  nl.blocks = {MakeBlock("a", 2.0), MakeBlock("b", 3.0)};
  nl.nets = {MakeNet("a", "b", 10), MakeNet("b", "a", 5)};
  const BlockGraph g = BuildBlockGraph(nl);
  REQUIRE(g.adj[0].size() == 1);
  CHECK(g.adj[0][0].second == 15.0);
  CHECK(g.WeightedDegree(1) == 15.0);
  CHECK(g.vertex_weight[1] == 3.0);
  CHECK(g.CutWeight({0, 1}) == 15.0);
}

TEST_CASE("spectral init")
{
  SUBCASE("two cliques with a weak bridge separate exactly")
  {
    const BlockGraph g = BuildBlockGraph(TwoCliques());
    const Partition p = SpectralInit(g, 2, 1);
    CHECK(p.num_chiplets == 2);
    CHECK(g.CutWeight(p.assignment) == BruteMinCut(g));
    CHECK(SameGrouping(p.assignment, {0, 0, 0, 0, 1, 1, 1, 1}));
  }
  SUBCASE("path of 8 splits into contiguous runs of 2")
  {
    std::vector<std::tuple<int, int, double>> edges;
    for (int i = 0; i < 7; ++i) {
      edges.push_back({i, i + 1, 10.0});
    }
    const Partition p = SpectralInit(MakeGraph(8, edges), 4, 3);
    CHECK(p.num_chiplets == 4);
    CHECK(SameGrouping(p.assignment, {0, 0, 1, 1, 2, 2, 3, 3}));
  }
  SUBCASE("complete graph still yields a valid 4-way partition")
  {
    std::vector<std::tuple<int, int, double>> edges;
    for (int i = 0; i < 8; ++i) {
      for (int j = i + 1; j < 8; ++j) {
        edges.push_back({i, j, 5.0});
      }
    }
    const Partition p = SpectralInit(MakeGraph(8, edges), 4, 2);
    CHECK(p.num_chiplets == 4);
    CHECK(p.Valid(8));
  }
  SUBCASE("disconnected graph")
  {
    const Partition p = SpectralInit(MakeGraph(6, {{0, 1, 1}, {2, 3, 1}, {4, 5, 1}}), 3, 1);
    CHECK(p.Valid(6));
    CHECK(SameGrouping(p.assignment, {0, 0, 1, 1, 2, 2}));
  }
}

TEST_CASE("node expansion init")
{
  SUBCASE("k = 1 is monolithic")
  {
    const Partition p = NodeExpansionInit(BuildBlockGraph(TwoCliques()), 1);
    CHECK(p.num_chiplets == 1);
  }
  SUBCASE("star: hub and first leaf seed; other leaves follow the hub")
  {
    std::vector<std::tuple<int, int, double>> edges;
    for (int i = 1; i < 6; ++i) {
      edges.push_back({0, i, 4.0});
    }
    const Partition p = NodeExpansionInit(MakeGraph(6, edges), 2);
    CHECK(p.num_chiplets == 2);
    CHECK(p.assignment[1] != p.assignment[0]);
    for (int i = 2; i < 6; ++i) {
      CHECK(p.assignment[i] == p.assignment[0]);
    }
  }
  SUBCASE("waferscale tile: crossbar and router seed k = 2")
  {
    const Netlist nl = GenWaferscale({}, {});
    const BlockGraph g = BuildBlockGraph(nl);
    const Partition p = NodeExpansionInit(g, 2);
    const int xbar = *nl.BlockIndex("t0_xbar");
    const int router = *nl.BlockIndex("t0_router");
    CHECK(p.assignment[xbar] != p.assignment[router]);
    std::vector<int> order(g.n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return g.WeightedDegree(a) > g.WeightedDegree(b);
    });
    CHECK(std::set<int>{order[0], order[1]} == std::set<int>{xbar, router});
  }
}

TEST_CASE("random and mincut init")
{
  const BlockGraph g = BuildBlockGraph(TwoCliques());
  const Partition mono = RandomInit(8, 1, 5);
  CHECK(mono.num_chiplets == 1);
  CHECK(RandomInit(8, 4, 17) == RandomInit(8, 4, 17));
  for (int k = 1; k <= 8; ++k) {
    for (uint64_t s = 0; s < 20; ++s) {
      const Partition p = RandomInit(8, k, s);
      CHECK(p.num_chiplets == k);
      CHECK(p.Valid(8));
      std::set<int> used(p.assignment.begin(), p.assignment.end());
      CHECK(static_cast<int>(used.size()) == k);
    }
  }
  const Partition cut = MincutInit(g, 2, 0.05, 1);
  CHECK(g.CutWeight(cut.assignment) == 1.0);
  CHECK(BruteMinCut(g) == 1.0);
  for (int k = 2; k <= 5; ++k) {
    const Partition p = MincutInit(g, k, 0.05, 2);
    CHECK(p.num_chiplets == k);
    CHECK(p.Valid(8));
  }
  CHECK_THROWS_AS(RandomInit(8, 0, 1), Error);
}

TEST_CASE("pool pruning")
{
  CHECK(PrunePool({10, 11, 12, 50}) == std::vector<int>{0, 1, 2});
  CHECK(PrunePool({7, 7, 7, 7, 7}) == std::vector<int>{0, 1, 2, 3, 4});
  CHECK(PrunePool({100, 300, 200}) == std::vector<int>{0, 1, 2});
  // 2x rule alone
  CHECK(PrunePool({10, 10, 10, 10, 21, 21}) == std::vector<int>{0, 1, 2, 3});
  // keep the three cheapest when rules leave fewer
  CHECK(PrunePool({1, 5, 6, 7}) == std::vector<int>{0, 1, 2});
  CHECK(PrunePool({3, std::numeric_limits<double>::infinity(), 4, 5})
        == std::vector<int>{0, 2, 3});
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> costs(3 + rng() % 10);
    for (auto& c : costs) {
      c = 1.0 + static_cast<double>(rng() % 1000) / 10.0;
    }
    const auto kept = PrunePool(costs);
    const int argmin = static_cast<int>(
        std::min_element(costs.begin(), costs.end()) - costs.begin());
    CHECK(kept.size() >= 3);
    CHECK(std::find(kept.begin(), kept.end(), argmin) != kept.end());
    CHECK(std::is_sorted(kept.begin(), kept.end()));
  }
}

TEST_CASE("pool has eleven entries")
{
  const SystemConfig cfg = PartitionToyConfig();
  const Netlist nl = ToyNetlist(8, 4);
  const Design d(nl, cfg);
  const Evaluator ev(d, MonolithicBaseline(d));
  const int t = d.TechIndex("7nm");
  const BlockGraph g = BuildBlockGraph(nl);
  const auto pool = BuildPool(ev, g, std::vector<int>(8, t), cfg.partition.full, 3);
  REQUIRE(pool.size() == 11);
  std::map<Origin, int> by_origin;
  for (const auto& e : pool) {
    ++by_origin[e.origin];
    CHECK(e.solution.partition.Valid(8));
  }
  CHECK(by_origin[Origin::kSpectral] == 1);
  CHECK(by_origin[Origin::kNodeExpansion] == 1);
  CHECK(by_origin[Origin::kRandom] == 5);
  CHECK(by_origin[Origin::kMincut] == 4);

  Netlist single;
  single.blocks = {MakeBlock("only", 20.0)};
  const Design ds(single, cfg);
  const Evaluator es(ds, MonolithicBaseline(ds));
  const auto one = BuildPool(es, BuildBlockGraph(single), {t, t, t}, cfg.partition.full, 1);
  CHECK(one.size() == 11);
  for (const auto& e : one) {
    CHECK(e.solution.partition.num_chiplets == 1);
  }
}

TEST_CASE("pool contains the optimal 2-way split of the bridge toy")
{
  SystemConfig cfg = PartitionToyConfig();
  const Netlist nl = TwoCliques(60.0);
  const Design d(nl, cfg);
  const Baseline base = MonolithicBaseline(d);
  const Evaluator ev(d, base);
  const int t = d.TechIndex("7nm");
  Partition best;
  ExhaustivePartitionMin(d, base, 2, t, &best);
  CHECK(best.num_chiplets == 2);
  const auto pool = BuildPool(ev, BuildBlockGraph(nl), {t, t}, cfg.partition.full, 9);
  bool found = false;
  for (const auto& e : pool) {
    found = found || (e.solution.partition.num_chiplets == 2
                      && SameGrouping(e.solution.partition.assignment, best.assignment));
  }
  CHECK(found);
}

TEST_CASE("fm refinement")
{
  const SystemConfig cfg = PartitionToyConfig();
  const Netlist nl = TwoCliques(60.0);
  const Design d(nl, cfg);
  const Baseline base = MonolithicBaseline(d);
  const Evaluator ev(d, base);
  const int t = d.TechIndex("7nm");

  SUBCASE("one misplaced block moves back in the first pass")
  {
    const Partition wrong{{0, 0, 0, 1, 1, 1, 1, 1}, 2};
    const Solution start = ev.Floorplanned(wrong, {t, t}, AnnealMode::kFast, 1);
    std::vector<double> trace;
    const Solution out = FmRefine(ev, start, 4, 0.5, 2, &trace);
    CHECK(SameGrouping(out.partition.assignment, {0, 0, 0, 0, 1, 1, 1, 1}));
    REQUIRE(!trace.empty());
    CHECK(trace[0] < start.score);
  }
  SUBCASE("optimal partition is kept")
  {
    Partition best;
    const double opt = ExhaustivePartitionMin(d, base, 2, t, &best);
    const Solution start = ev.Floorplanned(best, {t, t}, AnnealMode::kFast, 1);
    CHECK(start.score == doctest::Approx(opt));
    const Solution out = FmRefine(ev, start, 4, 0.5, 3);
    CHECK(SameGrouping(out.partition.assignment, best.assignment));
    CHECK(out.score == doctest::Approx(opt));
  }
}

TEST_CASE("kl swap repairs two exchanged blocks")
{
  const SystemConfig cfg = PartitionToyConfig();
  const Netlist nl = TwoCliques(60.0, 64, 1);
  const Design d(nl, cfg);
  const Baseline base = MonolithicBaseline(d);
  const Evaluator ev(d, base);
  const int t = d.TechIndex("7nm");
  const Partition swapped{{0, 0, 0, 1, 0, 1, 1, 1}, 2};
  const double here = FloorplanFreeObjective(d, base, swapped, t);
  // Every single move from here is worse; the pair swap is better.
  for (int b = 0; b < 8; ++b) {
    Partition q = swapped;
    q.assignment[b] = 1 - q.assignment[b];
    CHECK(FloorplanFreeObjective(d, base, q, t) > here);
  }
  Partition fixed = swapped;
  std::swap(fixed.assignment[3], fixed.assignment[4]);
  CHECK(FloorplanFreeObjective(d, base, fixed, t) < here);

  const Solution start = ev.Floorplanned(swapped, {t, t}, AnnealMode::kFast, 1);
  const Solution out = KlRefine(ev, start, 2, 0.25, 5);
  CHECK(SameGrouping(out.partition.assignment, {0, 0, 0, 0, 1, 1, 1, 1}));
  CHECK(out.score <= start.score);
}

TEST_CASE("fm can empty a chiplet and compacts it away")
{
  SystemConfig cfg = PartitionToyConfig();
  cfg.techs["7nm"].defect_density = 0.0;
  cfg.assembly.cost_per_bond = 50.0;
  const Netlist nl = TwoCliques(10.0);
  const Design d(nl, cfg);
  const Evaluator ev(d, MonolithicBaseline(d));
  const int t = d.TechIndex("7nm");
  const Partition two{{0, 0, 0, 0, 0, 0, 0, 1}, 2};
  const Solution start = ev.Floorplanned(two, {t, t}, AnnealMode::kFast, 1);
  const Solution out = FmRefine(ev, start, 2, 0.5, 1);
  CHECK(out.partition.num_chiplets == 1);
  CHECK(out.techs.size() == 1);
  CHECK(out.floorplan.size() == 1);
}

TEST_CASE("core chipletpart matches exhaustive enumeration on toys")
{
  int hits = 0;
  int runs = 0;
  for (uint64_t toy = 1; toy <= 3; ++toy) {
    const SystemConfig cfg = PartitionToyConfig();
    const Netlist nl = ToyNetlist(7, toy);
    const Design d(nl, cfg);
    const Baseline base = MonolithicBaseline(d);
    const Evaluator ev(d, base);
    const int t = d.TechIndex("7nm");
    const double opt = ExhaustivePartitionMin(d, base, 3, t);
    for (uint64_t seed = 1; seed <= 3; ++seed) {
      const CoreResult r = CoreChipletPart(ev, {t, t, t}, cfg.partition.full, seed);
      CHECK(r.best.feasible);
      CHECK(r.best.partition.num_chiplets <= 3);
      CHECK(r.best.score >= opt * (1.0 - 1e-9));
      hits += r.best.score <= opt * (1.0 + 1e-9);
      ++runs;
      for (const auto& trace : r.traces) {
        for (size_t i = 1; i < trace.size(); ++i) {
          CHECK(trace[i] <= trace[i - 1]);
        }
      }
    }
  }
  CHECK(hits >= runs * 9 / 10);
}

TEST_CASE("monolithic wins when assembly is expensive")
{
  SystemConfig cfg = PartitionToyConfig();
  cfg.techs["7nm"].defect_density = 0.01;
  cfg.assembly.cost_per_bond = 1000.0;
  const Netlist nl = ToyNetlist(6, 9);
  const Design d(nl, cfg);
  const Evaluator ev(d, MonolithicBaseline(d));
  const int t = d.TechIndex("7nm");
  const CoreResult r = CoreChipletPart(ev, {t, t, t, t}, cfg.partition.reduced, 4);
  CHECK(r.best.partition.num_chiplets == 1);
}

TEST_CASE("core chipletpart is deterministic and thread-count independent")
{
  const SystemConfig cfg = PartitionToyConfig();
  const Netlist nl = ToyNetlist(8, 2);
  const Design d(nl, cfg);
  const Evaluator ev(d, MonolithicBaseline(d));
  const int t = d.TechIndex("7nm");
  const CoreResult a = CoreChipletPart(ev, {t, t, t}, cfg.partition.reduced, 6, 1);
  const CoreResult b = CoreChipletPart(ev, {t, t, t}, cfg.partition.reduced, 6, 3);
  CHECK(a.best.partition == b.best.partition);
  CHECK(a.best.floorplan == b.best.floorplan);
  CHECK(a.best.score == b.best.score);
  CHECK(a.traces == b.traces);
}

TEST_CASE("full budget is no worse than reduced")
{
  for (uint64_t toy = 1; toy <= 3; ++toy) {
    const SystemConfig cfg = PartitionToyConfig();
    const Netlist nl = ToyNetlist(8, 10 + toy);
    const Design d(nl, cfg);
    const Evaluator ev(d, MonolithicBaseline(d));
    const int t = d.TechIndex("7nm");
    const CoreResult full = CoreChipletPart(ev, {t, t, t}, cfg.partition.full, toy);
    const CoreResult reduced = CoreChipletPart(ev, {t, t, t}, cfg.partition.reduced, toy);
    CHECK(full.best.score <= reduced.best.score + 1e-12);
  }
}
