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
#include <map>
#include <string>
#include <vector>

#include "chiplet/model.h"
#include "json.hpp"

namespace chiplet {

// Netlist and config resolved to dense indices, with every block pre-scaled
// into every technology.  Shared read-only by all optimizers.
class Design
{
 public:
  struct Edge
  {
    int src = 0;
    int dst = 0;
    int64_t bandwidth = 0;
    int io = 0;         // index into io_types()
    int64_t cells = 0;  // IO cells per endpoint when the edge is cut
  };

  Design(const Netlist& netlist, const SystemConfig& config);

  const Netlist& netlist() const { return *netlist_; }
  const SystemConfig& config() const { return *config_; }
  int num_blocks() const { return static_cast<int>(netlist_->blocks.size()); }
  const std::vector<TechNode>& techs() const { return techs_; }
  const std::vector<IOCellType>& io_types() const { return io_types_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<int>& incident(int block) const { return incident_[block]; }

  int TechIndex(const std::string& id) const;
  std::vector<int> TechIndices(const std::vector<std::string>& ids) const;
  const ScaledBlock& Scaled(int tech, int block) const
  {
    return scaled_[tech][block];
  }

 private:
  const Netlist* netlist_;
  const SystemConfig* config_;
  std::vector<TechNode> techs_;
  std::vector<IOCellType> io_types_;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> incident_;
  std::vector<std::vector<ScaledBlock>> scaled_;
};

struct Chiplet
{
  std::vector<int> blocks;
  int tech = 0;
  double block_area = 0.0;
  double io_area = 0.0;
  double area = 0.0;  // block_area + io_area
  double power = 0.0;
  std::vector<int64_t> io_cells;  // per Design::io_types() entry
};

// Net between two chiplets after bundling all cut block-level nets of one
// reach class.  `io_area` is the IO cell area each endpoint devotes to it.
struct ChipletNet
{
  int a = 0;
  int b = 0;
  int64_t bits = 0;
  double io_area = 0.0;
  double reach = 0.0;
};

struct CostBreakdown
{
  std::vector<double> die_areas;
  std::vector<double> die_costs;
  std::vector<double> die_yields;
  double package_area = 0.0;
  double substrate_cost = 0.0;
  double bond_cost = 0.0;
  double assembly_cost = 0.0;
  double assembly_yield = 1.0;
  double nre_total = 0.0;
  double volume = 1.0;
  double total = 0.0;
  double block_power = 0.0;
  double io_power = 0.0;
  double power_total = 0.0;
};

// Per-chiplet IO cell counts, indexed [chiplet][io type].
std::vector<std::vector<int64_t>> IoCellsForCut(const Design& design,
                                                const Partition& partition);

double DieYield(double area_mm2, const TechNode& tech);

// Whole square dies of `area_mm2` that fit on the usable wafer disc.
int64_t DiesPerWafer(double area_mm2, const TechNode& tech);

// Throws kReticleViolation when the die exceeds the reticle limit.
double DieCost(double area_mm2, const TechNode& tech);

// `techs` holds one Design tech index per chiplet.
std::vector<Chiplet> BuildChiplets(const Design& design,
                                   const Partition& partition,
                                   const std::vector<int>& techs);

std::vector<ChipletNet> BuildChipletNets(const Design& design,
                                         const Partition& partition);

int64_t CutBits(const Design& design, const Partition& partition);

// System cost (dies, yield, assembly, amortized NRE) plus power.
// `enforce_reticle` false lets the monolithic baseline exceed the reticle.
CostBreakdown SystemCost(const Design& design,
                         const Partition& partition,
                         const std::vector<Chiplet>& chiplets,
                         double package_area,
                         bool enforce_reticle = true);

// Recomputes the total from the breakdown's own terms.
double RecomposeTotal(const CostBreakdown& cost);

struct Baseline
{
  std::string tech;
  double cost = 1.0;
  double power = 1.0;
};

// Monolithic design in the candidate tech with the lowest total cost.
Baseline MonolithicBaseline(const Design& design);

double MixedObjective(const CostBreakdown& cost,
                      const ObjectiveWeights& weights,
                      const Baseline& baseline);

nlohmann::json CostToJson(const CostBreakdown& cost);

}  // namespace chiplet
