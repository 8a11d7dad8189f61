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

#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "chiplet/cost.h"
#include "chiplet/floorplan.h"
#include "chiplet/model.h"

namespace chiplet {

// Undirected block graph; parallel and opposite nets are merged by summing
// their bandwidth.  Vertex weights are block areas in the reference tech.
struct BlockGraph
{
  int n = 0;
  std::vector<std::vector<std::pair<int, double>>> adj;
  std::vector<double> vertex_weight;

  double WeightedDegree(int v) const;
  double CutWeight(const std::vector<int>& labels) const;
};

BlockGraph BuildBlockGraph(const Netlist& netlist);

// Two smallest nontrivial Laplacian eigenvectors + K-means++ (best of
// `restarts`).  Disconnected graphs are split per component.
Partition SpectralInit(const BlockGraph& graph,
                       int k,
                       uint64_t seed,
                       int restarts = 8);

// Top-k weighted-degree seeds grown by level-synchronous BFS.
Partition NodeExpansionInit(const BlockGraph& graph, int k);

Partition RandomInit(int num_blocks, int k, uint64_t seed);

// Multilevel recursive bisection (heavy-edge matching, greedy growing,
// two-way FM per level) with area balance tolerance `imbalance`.
Partition MincutInit(const BlockGraph& graph,
                     int k,
                     double imbalance,
                     uint64_t seed);

// A partition with its chiplet techs, floorplan and evaluated cost.
struct Solution
{
  Partition partition;
  std::vector<int> techs;  // Design tech index per chiplet
  Floorplan floorplan;
  FPObjective fp_objective;
  CostBreakdown cost;
  double objective = std::numeric_limits<double>::infinity();
  // objective plus the infeasibility penalty; what refinement minimizes
  double score = std::numeric_limits<double>::infinity();
  bool reticle_ok = true;
  bool feasible = false;
};

class Evaluator
{
 public:
  Evaluator(const Design& design, const Baseline& baseline);

  const Design& design() const { return *design_; }
  const Baseline& baseline() const { return baseline_; }

  FPProblem Problem(const Partition& partition,
                    const std::vector<int>& techs) const;

  // Scores a partition on `reference`'s sequence pair with its shapes
  // rescaled to the new chiplet areas; no annealing.
  Solution Quick(const Partition& partition,
                 const std::vector<int>& techs,
                 const Floorplan& reference) const;

  Solution Floorplanned(const Partition& partition,
                        const std::vector<int>& techs,
                        AnnealMode mode,
                        uint64_t seed,
                        const Floorplan* warm_start = nullptr,
                        int threads = 1) const;

  // Re-anneals `current` warm-started from its own floorplan; returns the
  // better of the two.
  Solution Improve(const Solution& current,
                   AnnealMode mode,
                   uint64_t seed,
                   int threads = 1) const;

 private:
  Solution Finish(const Partition& partition,
                  const std::vector<int>& techs,
                  const std::vector<Chiplet>& chiplets,
                  const std::vector<ChipletNet>& nets,
                  Floorplan fp) const;

  const Design* design_;
  Baseline baseline_;
};

// Same sequence pair with chiplet `c` removed and later indices shifted.
Floorplan RemoveChiplet(const Floorplan& fp, int c);

// Shapes rescaled to `areas` keeping each aspect ratio.
Floorplan Rescale(const Floorplan& fp, const std::vector<double>& areas);

// Multi-way FM with best-prefix rollback.  Appends the score after each
// pass to `trace` when given.
Solution FmRefine(const Evaluator& evaluator,
                  const Solution& start,
                  int passes,
                  double vertex_fraction,
                  uint64_t seed,
                  std::vector<double>* trace = nullptr);

// Pairwise-swap KL with best-prefix rollback.
Solution KlRefine(const Evaluator& evaluator,
                  const Solution& start,
                  int passes,
                  double vertex_fraction,
                  uint64_t seed,
                  std::vector<double>* trace = nullptr);

enum class Origin
{
  kSpectral,
  kNodeExpansion,
  kRandom,
  kMincut,
};

const char* OriginName(Origin origin);

struct PoolEntry
{
  Origin origin = Origin::kRandom;
  int requested_k = 1;
  Solution solution;

  double cost() const { return solution.score; }
  bool feasible() const { return solution.feasible; }
};

std::vector<PoolEntry> BuildPool(const Evaluator& evaluator,
                                 const BlockGraph& graph,
                                 const std::vector<int>& genome,
                                 const RefineBudget& budget,
                                 uint64_t seed,
                                 int threads = 1);

// Indices of the entries that survive pruning, in input order.
std::vector<int> PrunePool(const std::vector<double>& costs);

struct CoreResult
{
  Solution best;
  Origin best_origin = Origin::kRandom;
  std::vector<PoolEntry> pool;
  std::vector<int> survivors;
  // Per survivor: initial score then one entry per FM pass and KL pass.
  std::vector<std::vector<double>> traces;
};

CoreResult CoreChipletPart(const Evaluator& evaluator,
                           const std::vector<int>& genome,
                           const RefineBudget& budget,
                           uint64_t seed,
                           int threads = 1);

// Final feasibility with full geometric checks.
FeasibilityReport CheckSolution(const Evaluator& evaluator,
                                const Solution& solution);

}  // namespace chiplet
