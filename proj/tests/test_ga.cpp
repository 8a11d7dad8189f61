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

#include <cmath>
#include <set>

#include "chiplet/ga.h"
#include "fixtures.h"

using namespace chiplet;
using namespace chiplet::testing;

namespace {

GAConfig SmallGA()
{
  GAConfig ga;
  ga.tot_pop = 12;
  ga.k_pop = 10;
  ga.sigma = 2;
  ga.zeta = 3;
  ga.psi = 6;
  ga.epsilon = 2;
  ga.K_max = 3;
  return ga;
}

}  // namespace

TEST_CASE("canonical form")
{
  CHECK(Canonicalize({"7nm", "7nm", "14nm"}) == Canonicalize({"14nm", "7nm", "7nm"}));
  CHECK(Canonicalize({"10nm"}) == Genome{"10nm"});
  CHECK(GenomeKey(Canonicalize({"7nm", "14nm"})) == GenomeKey(Canonicalize({"14nm", "7nm"})));
  CHECK(GenomeSeed(Canonicalize({"7nm", "14nm"}), 5)
        == GenomeSeed(Canonicalize({"14nm", "7nm"}), 5));
  CHECK(GenomeSeed({"7nm"}, 5) != GenomeSeed({"7nm"}, 6));
  Rng rng(1);
  const std::vector<std::string> techs{"7nm", "10nm", "14nm", "28nm"};
  for (int i = 0; i < 1000; ++i) {
    Genome g(1 + UniformInt(rng, 0, 7));
    for (auto& gene : g) {
      gene = techs[UniformInt(rng, 0, 3)];
    }
    const Genome c = Canonicalize(g);
    CHECK(Canonicalize(c) == c);
    std::multiset<std::string> a(g.begin(), g.end());
    std::multiset<std::string> b(c.begin(), c.end());
    CHECK(a == b);
  }
}

TEST_CASE("initial population")
{
  const GAConfig ga;
  Rng a(3);
  Rng b(3);
  const auto pop = InitPopulation(ga, {"7nm", "10nm", "14nm"}, a);
  CHECK(pop.size() == 50);
  for (const auto& g : pop) {
    CHECK(g.size() == 8);
    CHECK(Canonicalize(g) == g);
  }
  CHECK(InitPopulation(ga, {"7nm", "10nm", "14nm"}, b) == pop);
  Rng c(4);
  const auto single = InitPopulation(ga, {"7nm"}, c);
  for (const auto& g : single) {
    CHECK(g == single[0]);
  }
}

TEST_CASE("tournament selection")
{
  const GAConfig ga;
  std::vector<double> fitness(50);
  for (int i = 0; i < 50; ++i) {
    fitness[i] = 10.0 + i;
  }
  Rng rng(5);
  CHECK(TournamentSelect(fitness, ga, rng).size() == 45);

  // Genome 17 strictly dominates; it wins a tournament iff it is drawn.
  fitness[17] = 0.0;
  const int n = 50;
  const int trials = 10000;
  int hits = 0;
  int slots = 0;
  GAConfig one = ga;
  one.k_pop = 1;
  for (int t = 0; t < trials / 2; ++t) {
    const auto pairs = TournamentSelect(fitness, one, rng);
    hits += (pairs[0].first == 17) + (pairs[0].second == 17);
    slots += 2;
  }
  const double p = 1.0 - std::pow((n - 1.0) / n, ga.zeta);
  const double sd = std::sqrt(slots * p * (1.0 - p));
  CHECK(std::abs(hits - slots * p) <= 3.0 * sd);
}

TEST_CASE("crossover and mutation")
{
  const Genome a{"7nm", "7nm", "14nm"};
  const Genome b{"10nm", "10nm", "10nm"};
  Rng rng(7);
  bool saw_mix = false;
  for (int i = 0; i < 200; ++i) {
    const Genome c = Crossover(a, b, 1.0, rng);
    REQUIRE(c.size() == 3);
    for (int j = 0; j < 3; ++j) {
      CHECK((c[j] == a[j] || c[j] == b[j]));
    }
    saw_mix = saw_mix || c == Genome{"7nm", "10nm", "14nm"};
    CHECK(Crossover(a, b, 0.0, rng) == a);
  }
  CHECK(saw_mix);
  CHECK(Mutate(a, 0.0, {"7nm", "10nm"}, rng) == a);
  CHECK(Mutate({"7nm", "7nm"}, 1.0, {"7nm"}, rng) == Genome{"7nm", "7nm"});
  const Genome m = Mutate(a, 1.0, {"3nm"}, rng);
  CHECK(m == Genome{"3nm", "3nm", "3nm"});
}

TEST_CASE("canonical genome enumeration")
{
  CHECK(AllCanonicalGenomes({"7nm", "10nm", "14nm"}, 3).size() == 19);
  CHECK(AllCanonicalGenomes({"7nm", "10nm", "14nm"}, 6).size() == 83);
  const auto all = AllCanonicalGenomes({"a", "b"}, 2);
  CHECK(all == std::vector<Genome>{{"a"}, {"b"}, {"a", "a"}, {"a", "b"}, {"b", "b"}});
}

TEST_CASE("fitness is memoized by canonical form")
{
  const SystemConfig cfg = ToyConfig();
  const Netlist nl = ToyNetlist(6, 3);
  const Design d(nl, cfg);
  const Evaluator ev(d, MonolithicBaseline(d));
  FitnessOracle oracle(ev, 9, 1);
  const double f1 = oracle.Evaluate(Canonicalize({"7nm", "14nm"}));
  const double f2 = oracle.Evaluate(Canonicalize({"14nm", "7nm"}));
  CHECK(f1 == f2);
  CHECK(oracle.evaluations() == 1);
  CHECK(oracle.cache_hits() == 1);
  const auto batch = oracle.EvaluateAll({{"7nm"}, {"7nm"}, {"14nm", "7nm"}});
  CHECK(batch[0] == batch[1]);
  CHECK(batch[2] == f1);
  CHECK(oracle.evaluations() == 2);
  // An uncached fresh oracle agrees.
  FitnessOracle fresh(ev, 9, 1);
  CHECK(fresh.Evaluate({"14nm", "7nm"}) == f1);
}

TEST_CASE("stall rule with an infinite threshold")
{
  const SystemConfig cfg = ToyConfig();
  const Netlist nl = ToyNetlist(6, 5);
  const Design d(nl, cfg);
  const Evaluator ev(d, MonolithicBaseline(d));
  GAConfig ga = SmallGA();
  ga.delta_threshold = std::numeric_limits<double>::infinity();
  ga.psi = 50;
  const GAResult r = Evolve(ev, ga, 2);
  CHECK(r.generations == ga.epsilon + 1);
  for (size_t i = 1; i < r.trace.size(); ++i) {
    CHECK(r.trace[i].best_ever <= r.trace[i - 1].best_ever);
  }
}

TEST_CASE("single technology collapses to the homogeneous run")
{
  SystemConfig cfg = ToyConfig();
  cfg.candidate_techs = {"10nm"};
  const Netlist nl = ToyNetlist(6, 6);
  const Design d(nl, cfg);
  const Evaluator ev(d, MonolithicBaseline(d));
  GAConfig ga = SmallGA();
  const GAResult r = Evolve(ev, ga, 4);
  CHECK(r.evaluations == 1);
  CHECK(r.genome == Genome(ga.K_max, "10nm"));
  const CoreResult homo = RunGenome(ev, Genome(ga.K_max, "10nm"), 4);
  CHECK(r.core.best.score == homo.best.score);
  CHECK(r.core.best.partition == homo.best.partition);
}

TEST_CASE("ga matches enumeration on a toy and is deterministic")
{
  const SystemConfig cfg = HeteroToyConfig();
  const Netlist nl = HeteroToyNetlist(6, 8);
  const Design d(nl, cfg);
  const Evaluator ev(d, MonolithicBaseline(d));
  const GAConfig ga = SmallGA();
  const GAResult r = Evolve(ev, ga, 1);
  const EnumerationResult e = EnumerateAssignments(ev, 3, 1);
  CHECK(e.all.size() == 19);
  // the toy rewards a technology mix
  CHECK(std::set<std::string>(e.best.begin(), e.best.end()).size() > 1);
  CHECK(r.fitness >= e.fitness - 1e-12);
  CHECK(r.fitness <= 1.01 * e.fitness);
  const GAResult again = Evolve(ev, ga, 1, 2);
  CHECK(again.genome == r.genome);
  CHECK(again.fitness == r.fitness);
  CHECK(again.core.best.partition == r.core.best.partition);
  CHECK(again.core.best.floorplan == r.core.best.floorplan);
  for (size_t i = 1; i < r.trace.size(); ++i) {
    CHECK(r.trace[i].best_ever <= r.trace[i - 1].best_ever);
  }
}
