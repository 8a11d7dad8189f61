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

#include "chiplet/partition.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

#include "chiplet/error.h"
#include "chiplet/parallel.h"
#include "chiplet/rng.h"

namespace chiplet {

Evaluator::Evaluator(const Design& design, const Baseline& baseline)
    : design_(&design), baseline_(baseline)
{
}

FPProblem Evaluator::Problem(const Partition& partition,
                             const std::vector<int>& techs) const
{
  FPProblem problem;
  for (const auto& chiplet : BuildChiplets(*design_, partition, techs)) {
    problem.areas.push_back(chiplet.area);
  }
  problem.nets = BuildChipletNets(*design_, partition);
  problem.separation = design_->config().assembly.separation;
  problem.params = design_->config().floorplan;
  return problem;
}

Solution Evaluator::Finish(const Partition& partition,
                           const std::vector<int>& techs,
                           const std::vector<Chiplet>& chiplets,
                           const std::vector<ChipletNet>& nets,
                           Floorplan fp) const
{
  const SystemConfig& config = design_->config();
  Solution s;
  s.partition = partition;
  s.techs = techs;
  s.floorplan = std::move(fp);
  for (const auto& chiplet : chiplets) {
    if (chiplet.area > design_->techs()[chiplet.tech].reticle_max_area) {
      s.reticle_ok = false;
      return s;
    }
  }
  s.fp_objective = Objective(s.floorplan, nets, config.floorplan);
  s.cost = SystemCost(*design_, partition, chiplets,
                      s.fp_objective.package_area);
  s.objective = MixedObjective(s.cost, config.weights, baseline_);
  const double wl = s.fp_objective.wl_reach;
  s.feasible = wl <= 0.0;
  s.score = s.objective;
  if (!s.feasible) {
    int64_t bits = 0;
    for (const auto& net : nets) {
      bits += net.bits;
    }
    s.score += config.partition.infeasible_penalty
               * (1.0 + wl / static_cast<double>(std::max<int64_t>(1, bits)));
  }
  return s;
}

Solution Evaluator::Quick(const Partition& partition,
                          const std::vector<int>& techs,
                          const Floorplan& reference) const
{
  auto chiplets = BuildChiplets(*design_, partition, techs);
  std::vector<double> areas;
  for (const auto& c : chiplets) {
    areas.push_back(c.area);
  }
  Floorplan fp = Rescale(reference, areas);
  EvaluateSP(fp, design_->config().assembly.separation);
  return Finish(partition, techs, chiplets,
                BuildChipletNets(*design_, partition), std::move(fp));
}

Solution Evaluator::Floorplanned(const Partition& partition,
                                 const std::vector<int>& techs,
                                 AnnealMode mode,
                                 uint64_t seed,
                                 const Floorplan* warm_start,
                                 int threads) const
{
  auto chiplets = BuildChiplets(*design_, partition, techs);
  FPProblem problem;
  for (const auto& c : chiplets) {
    problem.areas.push_back(c.area);
  }
  problem.nets = BuildChipletNets(*design_, partition);
  problem.separation = design_->config().assembly.separation;
  problem.params = design_->config().floorplan;
  std::optional<Floorplan> warm;
  if (warm_start != nullptr) {
    warm = *warm_start;
    for (int i = 0; i < warm->size(); ++i) {
      // Keep the warm shape when it already covers the chiplet exactly or
      // with bloat; otherwise rescale to the required area.
      if (warm->widths[i] * warm->heights[i] < problem.areas[i] * (1.0 - 1e-12)) {
        *warm = Rescale(*warm, problem.areas);
        break;
      }
    }
  }
  AnnealResult result
      = Anneal(problem, mode, seed, warm ? &*warm : nullptr, threads);
  return Finish(partition, techs, chiplets, problem.nets,
                std::move(result.floorplan));
}

Solution Evaluator::Improve(const Solution& current,
                            AnnealMode mode,
                            uint64_t seed,
                            int threads) const
{
  if (!current.reticle_ok) {
    return current;
  }
  Solution next = Floorplanned(current.partition, current.techs, mode, seed,
                               &current.floorplan, threads);
  return next.score < current.score ? next : current;
}

Floorplan RemoveChiplet(const Floorplan& fp, int c)
{
  Floorplan out;
  for (auto [src, dst] : {std::pair{&fp.sp.first, &out.sp.first},
                          std::pair{&fp.sp.second, &out.sp.second}}) {
    for (int v : *src) {
      if (v != c) {
        dst->push_back(v > c ? v - 1 : v);
      }
    }
  }
  for (int i = 0; i < fp.size(); ++i) {
    if (i != c) {
      out.widths.push_back(fp.widths[i]);
      out.heights.push_back(fp.heights[i]);
      out.xs.push_back(fp.xs[i]);
      out.ys.push_back(fp.ys[i]);
    }
  }
  return out;
}

Floorplan Rescale(const Floorplan& fp, const std::vector<double>& areas)
{
  Floorplan out = fp;
  for (int i = 0; i < out.size(); ++i) {
    const double aspect = fp.widths[i] / fp.heights[i];
    out.widths[i] = std::sqrt(areas[i] * aspect);
    out.heights[i] = areas[i] / out.widths[i];
  }
  return out;
}

namespace {

// Move of block `b` to chiplet `to`, compacting away an emptied source.
struct MoveResult
{
  Partition partition;
  std::vector<int> techs;
  Floorplan reference;
};

MoveResult ApplyMove(const Solution& cur,
                     const std::vector<int>& counts,
                     int b,
                     int to)
{
  MoveResult m{cur.partition, cur.techs, cur.floorplan};
  const int from = m.partition.assignment[b];
  m.partition.assignment[b] = to;
  if (counts[from] == 1) {
    for (int& c : m.partition.assignment) {
      if (c > from) {
        --c;
      }
    }
    --m.partition.num_chiplets;
    m.techs.erase(m.techs.begin() + from);
    m.reference = RemoveChiplet(cur.floorplan, from);
  }
  return m;
}

std::vector<int> Counts(const Partition& p)
{
  std::vector<int> counts(p.num_chiplets, 0);
  for (int c : p.assignment) {
    ++counts[c];
  }
  return counts;
}

const Solution& Better(const Solution& a, const Solution& b)
{
  return b.score < a.score ? b : a;
}

}  // namespace

Solution FmRefine(const Evaluator& evaluator,
                  const Solution& start,
                  int passes,
                  double vertex_fraction,
                  uint64_t seed,
                  std::vector<double>* trace)
{
  const int n = static_cast<int>(start.partition.assignment.size());
  const int quota = std::max(1, static_cast<int>(std::floor(vertex_fraction * n)));
  uint64_t stream = 0;
  Solution result = start;
  for (int pass = 0; pass < passes; ++pass) {
    const Solution pass_start = result;
    Solution cur = result;
    Solution best = cur;
    std::vector<bool> locked(n, false);
    for (int step = 0; step < quota; ++step) {
      const std::vector<int> counts = Counts(cur.partition);
      std::optional<Solution> pick;
      int pick_block = -1;
      for (int b = 0; b < n; ++b) {
        if (locked[b]) {
          continue;
        }
        for (int t = 0; t < cur.partition.num_chiplets; ++t) {
          if (t == cur.partition.assignment[b]) {
            continue;
          }
          MoveResult m = ApplyMove(cur, counts, b, t);
          Solution cand = evaluator.Quick(m.partition, m.techs, m.reference);
          if (!pick || cand.score < pick->score) {
            pick = std::move(cand);
            pick_block = b;
          }
        }
      }
      if (!pick) {
        break;
      }
      Solution annealed = evaluator.Floorplanned(
          pick->partition, pick->techs, AnnealMode::kFast,
          DeriveSeed(seed, stream++), &pick->floorplan);
      cur = Better(*pick, annealed);
      locked[pick_block] = true;
      if (cur.score < best.score) {
        best = cur;
      }
    }
    result = Better(best, evaluator.Improve(best, AnnealMode::kStandard,
                                            DeriveSeed(seed, stream++)));
    if (trace != nullptr) {
      trace->push_back(result.score);
    }
    if (!(result.score < pass_start.score)) {
      break;
    }
  }
  return result;
}

Solution KlRefine(const Evaluator& evaluator,
                  const Solution& start,
                  int passes,
                  double vertex_fraction,
                  uint64_t seed,
                  std::vector<double>* trace)
{
  const int n = static_cast<int>(start.partition.assignment.size());
  const int quota
      = std::max(1, static_cast<int>(std::floor(vertex_fraction * n / 2.0)));
  uint64_t stream = 0;
  Solution result = start;
  for (int pass = 0; pass < passes; ++pass) {
    const Solution pass_start = result;
    Solution cur = result;
    Solution best = cur;
    std::vector<bool> locked(n, false);
    for (int step = 0; step < quota; ++step) {
      std::optional<Solution> pick;
      int pick_a = -1;
      int pick_b = -1;
      for (int a = 0; a < n; ++a) {
        if (locked[a]) {
          continue;
        }
        for (int b = a + 1; b < n; ++b) {
          const auto& asg = cur.partition.assignment;
          if (locked[b] || asg[a] == asg[b]) {
            continue;
          }
          Partition p = cur.partition;
          std::swap(p.assignment[a], p.assignment[b]);
          Solution cand = evaluator.Quick(p, cur.techs, cur.floorplan);
          if (!pick || cand.score < pick->score) {
            pick = std::move(cand);
            pick_a = a;
            pick_b = b;
          }
        }
      }
      if (!pick) {
        break;
      }
      Solution annealed = evaluator.Floorplanned(
          pick->partition, pick->techs, AnnealMode::kFast,
          DeriveSeed(seed, stream++), &pick->floorplan);
      cur = Better(*pick, annealed);
      locked[pick_a] = true;
      locked[pick_b] = true;
      if (cur.score < best.score) {
        best = cur;
      }
    }
    result = Better(best, evaluator.Improve(best, AnnealMode::kStandard,
                                            DeriveSeed(seed, stream++)));
    if (trace != nullptr) {
      trace->push_back(result.score);
    }
    if (!(result.score < pass_start.score)) {
      break;
    }
  }
  return result;
}

const char* OriginName(Origin origin)
{
  switch (origin) {
    case Origin::kSpectral:
      return "spectral";
    case Origin::kNodeExpansion:
      return "node_expansion";
    case Origin::kRandom:
      return "random";
    case Origin::kMincut:
      return "mincut";
  }
  return "unknown";
}

std::vector<PoolEntry> BuildPool(const Evaluator& evaluator,
                                 const BlockGraph& graph,
                                 const std::vector<int>& genome,
                                 const RefineBudget& budget,
                                 uint64_t seed,
                                 int threads)
{
  if (genome.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "genome must not be empty");
  }
  const PartitionParams& params = evaluator.design().config().partition;
  const int n = graph.n;
  const int cap = std::min<int>(n, static_cast<int>(genome.size()));
  std::vector<std::pair<Origin, int>> specs;
  specs.push_back({Origin::kSpectral, std::min(params.spectral_k, cap)});
  specs.push_back({Origin::kNodeExpansion, std::min(params.expansion_k, cap)});
  for (int k = 1; k <= budget.pool_random; ++k) {
    specs.push_back({Origin::kRandom, std::min(k, cap)});
  }
  for (int k = 2; k < 2 + budget.pool_mincut; ++k) {
    specs.push_back({Origin::kMincut, std::min(k, cap)});
  }

  auto make = [&](Origin origin, int k, uint64_t s) {
    Partition p;
    switch (origin) {
      case Origin::kSpectral:
        p = SpectralInit(graph, k, s, params.kmeans_restarts);
        break;
      case Origin::kNodeExpansion:
        p = NodeExpansionInit(graph, k);
        break;
      case Origin::kRandom:
        p = RandomInit(n, k, s);
        break;
      case Origin::kMincut:
        p = MincutInit(graph, k, params.mincut_imbalance, s);
        break;
    }
    std::vector<int> techs(genome.begin(), genome.begin() + p.num_chiplets);
    PoolEntry entry;
    entry.origin = origin;
    entry.requested_k = k;
    entry.solution = evaluator.Floorplanned(p, techs, AnnealMode::kFast,
                                            DeriveSeed(s, 1));
    return entry;
  };

  std::vector<std::optional<PoolEntry>> built(specs.size());
  ParallelFor(static_cast<int>(specs.size()), threads, [&](int i) {
    // Seeded by (origin, position within its origin) so a smaller budget
    // draws a subset of the larger budget's entries.
    const int rank = static_cast<int>(std::count_if(
        specs.begin(), specs.begin() + i,
        [&](const auto& s) { return s.first == specs[i].first; }));
    const uint64_t key = static_cast<uint64_t>(specs[i].first) * 256 + rank;
    try {
      built[i] = make(specs[i].first, specs[i].second, DeriveSeed(seed, key));
    } catch (const Error&) {
      built[i].reset();
    }
  });
  std::vector<PoolEntry> pool;
  for (auto& entry : built) {
    if (entry) {
      pool.push_back(std::move(*entry));
    }
  }
  for (int j = 0; pool.size() < 3; ++j) {
    pool.push_back(make(Origin::kRandom, 1 + j % cap, DeriveSeed(seed, 1000 + j)));
  }
  return pool;
}

std::vector<int> PrunePool(const std::vector<double>& costs)
{
  const int n = static_cast<int>(costs.size());
  std::vector<int> finite;
  for (int i = 0; i < n; ++i) {
    if (std::isfinite(costs[i])) {
      finite.push_back(i);
    }
  }
  std::vector<int> kept;
  if (!finite.empty()) {
    double mean = 0.0;
    double min_cost = costs[finite[0]];
    for (int i : finite) {
      mean += costs[i];
      min_cost = std::min(min_cost, costs[i]);
    }
    mean /= static_cast<double>(finite.size());
    double var = 0.0;
    for (int i : finite) {
      var += (costs[i] - mean) * (costs[i] - mean);
    }
    const double sd = finite.size() > 1
                          ? std::sqrt(var / static_cast<double>(finite.size() - 1))
                          : 0.0;
    for (int i : finite) {
      const double z = sd > 0.0 ? (costs[i] - mean) / sd : 0.0;
      if (z <= 1.5 && costs[i] <= 2.0 * min_cost) {
        kept.push_back(i);
      }
    }
  }
  if (kept.size() < 3) {
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return costs[a] < costs[b]; });
    order.resize(std::min(n, 3));
    kept = order;
    std::sort(kept.begin(), kept.end());
  }
  return kept;
}

FeasibilityReport CheckSolution(const Evaluator& evaluator,
                                const Solution& solution)
{
  FPProblem problem = evaluator.Problem(solution.partition, solution.techs);
  FeasibilityReport report = CheckFeasible(solution.floorplan, problem.nets,
                                           problem.separation, &problem.areas);
  if (!solution.reticle_ok) {
    report.feasible = false;
  }
  return report;
}

CoreResult CoreChipletPart(const Evaluator& evaluator,
                           const std::vector<int>& genome,
                           const RefineBudget& budget,
                           uint64_t seed,
                           int threads)
{
  const BlockGraph graph = BuildBlockGraph(evaluator.design().netlist());
  CoreResult out;
  out.pool = BuildPool(evaluator, graph, genome, budget,
                       DeriveSeed(seed, 0x706f6f6cULL), threads);
  std::vector<double> costs;
  for (const auto& entry : out.pool) {
    costs.push_back(entry.cost());
  }
  out.survivors = PrunePool(costs);

  const int m = static_cast<int>(out.survivors.size());
  std::vector<Solution> refined(m);
  out.traces.assign(m, {});
  ParallelFor(m, threads, [&](int i) {
    const PoolEntry& entry = out.pool[out.survivors[i]];
    const uint64_t s = DeriveSeed(
        seed, 0x7265666eULL + static_cast<uint64_t>(entry.origin) * 256
                  + static_cast<uint64_t>(entry.requested_k));
    const Solution& start = out.pool[out.survivors[i]].solution;
    std::vector<double>& trace = out.traces[i];
    trace.push_back(start.score);
    Solution sol = FmRefine(evaluator, start, budget.fm_passes,
                            budget.fm_vertex_fraction, DeriveSeed(s, 1), &trace);
    sol = KlRefine(evaluator, sol, budget.kl_passes, budget.kl_vertex_fraction,
                   DeriveSeed(s, 2), &trace);
    if (trace.size() == 1) {
      sol = evaluator.Improve(sol, AnnealMode::kStandard, DeriveSeed(s, 3));
      trace.push_back(sol.score);
    }
    sol.feasible = CheckSolution(evaluator, sol).feasible;
    refined[i] = std::move(sol);
  });

  int best = 0;
  auto key = [&](int i) {
    return std::make_tuple(!refined[i].feasible, refined[i].score,
                           static_cast<int>(out.pool[out.survivors[i]].origin), i);
  };
  for (int i = 1; i < m; ++i) {
    if (key(i) < key(best)) {
      best = i;
    }
  }
  out.best = std::move(refined[best]);
  out.best_origin = out.pool[out.survivors[best]].origin;
  return out;
}

}  // namespace chiplet
