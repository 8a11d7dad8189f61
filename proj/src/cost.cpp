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

#include "chiplet/cost.h"

#include <cmath>
#include <limits>
#include <tuple>

#include "chiplet/error.h"

namespace chiplet {

Design::Design(const Netlist& netlist, const SystemConfig& config)
    : netlist_(&netlist), config_(&config)
{
  Validate(netlist, config);
  for (const auto& [id, tech] : config.techs) {
    techs_.push_back(tech);
  }
  std::map<std::string, int> io_index;
  for (const auto& [id, io] : config.io_cells) {
    io_index[id] = static_cast<int>(io_types_.size());
    io_types_.push_back(io);
  }
  std::map<std::string, int> block_index;
  for (size_t i = 0; i < netlist.blocks.size(); ++i) {
    block_index[netlist.blocks[i].id] = static_cast<int>(i);
  }
  incident_.resize(netlist.blocks.size());
  for (const auto& net : netlist.nets) {
    Edge e;
    e.src = block_index.at(net.source);
    e.dst = block_index.at(net.sink);
    e.bandwidth = net.bandwidth;
    e.io = io_index.at(net.reach_class);
    const int64_t per_cell = io_types_[e.io].bits_per_cell;
    e.cells = (net.bandwidth + per_cell - 1) / per_cell;
    incident_[e.src].push_back(static_cast<int>(edges_.size()));
    incident_[e.dst].push_back(static_cast<int>(edges_.size()));
    edges_.push_back(e);
  }
  scaled_.resize(techs_.size());
  for (size_t t = 0; t < techs_.size(); ++t) {
    for (const auto& block : netlist.blocks) {
      scaled_[t].push_back(ScaleBlock(block, techs_[t], config.techs));
    }
  }
}

int Design::TechIndex(const std::string& id) const
{
  for (size_t i = 0; i < techs_.size(); ++i) {
    if (techs_[i].id == id) {
      return static_cast<int>(i);
    }
  }
  throw Error(ErrorKind::kUnknownTech, "unknown technology '" + id + "'");
}

std::vector<int> Design::TechIndices(const std::vector<std::string>& ids) const
{
  std::vector<int> out;
  out.reserve(ids.size());
  for (const auto& id : ids) {
    out.push_back(TechIndex(id));
  }
  return out;
}

std::vector<std::vector<int64_t>> IoCellsForCut(const Design& design,
                                                const Partition& partition)
{
  std::vector<std::vector<int64_t>> cells(
      partition.num_chiplets,
      std::vector<int64_t>(design.io_types().size(), 0));
  for (const auto& e : design.edges()) {
    const int a = partition.assignment[e.src];
    const int b = partition.assignment[e.dst];
    if (a != b) {
      cells[a][e.io] += e.cells;
      cells[b][e.io] += e.cells;
    }
  }
  return cells;
}

double DieYield(double area_mm2, const TechNode& tech)
{
  const double area_cm2 = area_mm2 / 100.0;
  return std::pow(1.0 + area_cm2 * tech.defect_density / tech.clustering_alpha,
                  -tech.clustering_alpha);
}

int64_t DiesPerWafer(double area_mm2, const TechNode& tech)
{
  const double radius = tech.wafer_diameter / 2.0 - tech.edge_exclusion;
  const double side = std::sqrt(area_mm2);
  if (side <= 0.0 || radius <= 0.0) {
    return 0;
  }
  constexpr double kEps = 1e-9;
  int64_t best = 0;
  // Grid offsets are fractions of the die side, so every cell is a scaled
  // copy about the wafer center and each count is monotone in die size.
  for (double fx : {0.0, 0.5}) {
    for (double fy : {0.0, 0.5}) {
      const double ox = fx * side;
      const double oy = fy * side;
      int64_t count = 0;
      const int64_t cols = static_cast<int64_t>(std::ceil(radius / side)) + 1;
      for (int64_t i = -cols - 1; i <= cols; ++i) {
        const double x0 = ox + static_cast<double>(i) * side;
        const double x1 = x0 + side;
        const double xm = std::max(std::abs(x0), std::abs(x1));
        if (xm > radius + kEps) {
          continue;
        }
        const double half = std::sqrt(std::max(0.0, radius * radius - xm * xm));
        const double lo = std::ceil((-half - oy) / side - kEps);
        const double hi = std::floor((half - oy) / side + kEps);
        count += std::max<int64_t>(0, static_cast<int64_t>(hi - lo));
      }
      best = std::max(best, count);
    }
  }
  return best;
}

namespace {

double RawDieCost(double area_mm2, const TechNode& tech)
{
  const int64_t dies = DiesPerWafer(area_mm2, tech);
  if (dies <= 0) {
    return std::numeric_limits<double>::infinity();
  }
  return tech.wafer_cost / static_cast<double>(dies);
}

}  // namespace

double DieCost(double area_mm2, const TechNode& tech)
{
  if (area_mm2 > tech.reticle_max_area) {
    throw Error(ErrorKind::kReticleViolation,
                "die of " + std::to_string(area_mm2) + " mm^2 exceeds the "
                    + tech.id + " reticle limit of "
                    + std::to_string(tech.reticle_max_area) + " mm^2");
  }
  return RawDieCost(area_mm2, tech);
}

std::vector<Chiplet> BuildChiplets(const Design& design,
                                   const Partition& partition,
                                   const std::vector<int>& techs)
{
  if (static_cast<int>(techs.size()) < partition.num_chiplets) {
    throw Error(ErrorKind::kInvalidArgument,
                "genome shorter than the number of chiplets");
  }
  std::vector<Chiplet> chiplets(partition.num_chiplets);
  for (int c = 0; c < partition.num_chiplets; ++c) {
    chiplets[c].tech = techs[c];
    chiplets[c].io_cells.assign(design.io_types().size(), 0);
  }
  for (int b = 0; b < design.num_blocks(); ++b) {
    Chiplet& chiplet = chiplets[partition.assignment[b]];
    const ScaledBlock& s = design.Scaled(chiplet.tech, b);
    chiplet.blocks.push_back(b);
    chiplet.block_area += s.area;
    chiplet.power += s.power;
  }
  for (const auto& e : design.edges()) {
    const int a = partition.assignment[e.src];
    const int b = partition.assignment[e.dst];
    if (a != b) {
      chiplets[a].io_cells[e.io] += e.cells;
      chiplets[b].io_cells[e.io] += e.cells;
    }
  }
  for (auto& chiplet : chiplets) {
    for (size_t t = 0; t < chiplet.io_cells.size(); ++t) {
      chiplet.io_area += static_cast<double>(chiplet.io_cells[t])
                         * design.io_types()[t].cell_area;
    }
    chiplet.area = chiplet.block_area + chiplet.io_area;
  }
  return chiplets;
}

std::vector<ChipletNet> BuildChipletNets(const Design& design,
                                         const Partition& partition)
{
  std::map<std::tuple<int, int, int>, ChipletNet> bundles;
  for (const auto& e : design.edges()) {
    int a = partition.assignment[e.src];
    int b = partition.assignment[e.dst];
    if (a == b) {
      continue;
    }
    if (a > b) {
      std::swap(a, b);
    }
    const IOCellType& io = design.io_types()[e.io];
    ChipletNet& net = bundles[{a, b, e.io}];
    net.a = a;
    net.b = b;
    net.bits += e.bandwidth;
    net.io_area += static_cast<double>(e.cells) * io.cell_area;
    net.reach = io.reach;
  }
  std::vector<ChipletNet> nets;
  nets.reserve(bundles.size());
  for (auto& [key, net] : bundles) {
    nets.push_back(net);
  }
  return nets;
}

int64_t CutBits(const Design& design, const Partition& partition)
{
  int64_t bits = 0;
  for (const auto& e : design.edges()) {
    if (partition.assignment[e.src] != partition.assignment[e.dst]) {
      bits += e.bandwidth;
    }
  }
  return bits;
}

CostBreakdown SystemCost(const Design& design,
                         const Partition& partition,
                         const std::vector<Chiplet>& chiplets,
                         double package_area,
                         bool enforce_reticle)
{
  const SystemConfig& config = design.config();
  CostBreakdown cost;
  const int k = static_cast<int>(chiplets.size());
  double die_sum = 0.0;
  for (const auto& chiplet : chiplets) {
    const TechNode& tech = design.techs()[chiplet.tech];
    const double die_cost = enforce_reticle ? DieCost(chiplet.area, tech)
                                            : RawDieCost(chiplet.area, tech);
    const double yield = DieYield(chiplet.area, tech);
    cost.die_areas.push_back(chiplet.area);
    cost.die_costs.push_back(die_cost);
    cost.die_yields.push_back(yield);
    die_sum += die_cost / yield;
    cost.nre_total += tech.nre_design_cost;
    cost.block_power += chiplet.power;
  }
  cost.package_area = package_area;
  cost.substrate_cost = package_area * config.assembly.substrate_cost_per_mm2;
  cost.bond_cost = config.assembly.cost_per_bond * k;
  cost.assembly_cost = cost.substrate_cost + cost.bond_cost;
  cost.assembly_yield = std::pow(config.assembly.bond_yield, k);
  cost.volume = config.volume;
  cost.total = (cost.assembly_cost + die_sum) / cost.assembly_yield
               + cost.nre_total / cost.volume;

  for (const auto& e : design.edges()) {
    if (partition.assignment[e.src] != partition.assignment[e.dst]) {
      cost.io_power += static_cast<double>(e.bandwidth)
                       * design.io_types()[e.io].energy_per_bit
                       * config.io_bit_rate;
    }
  }
  cost.power_total = cost.block_power + cost.io_power;
  return cost;
}

double RecomposeTotal(const CostBreakdown& cost)
{
  double die_sum = 0.0;
  for (size_t i = 0; i < cost.die_costs.size(); ++i) {
    die_sum += cost.die_costs[i] / cost.die_yields[i];
  }
  return (cost.assembly_cost + die_sum) / cost.assembly_yield
         + cost.nre_total / cost.volume;
}

Baseline MonolithicBaseline(const Design& design)
{
  Partition mono{std::vector<int>(design.num_blocks(), 0), 1};
  Baseline best;
  bool found = false;
  for (const auto& id : design.config().Candidates()) {
    const int tech = design.TechIndex(id);
    auto chiplets = BuildChiplets(design, mono, {tech});
    CostBreakdown cost
        = SystemCost(design, mono, chiplets, chiplets[0].area, false);
    if (!found || cost.total < best.cost) {
      best = {id, cost.total, cost.power_total};
      found = true;
    }
  }
  if (!std::isfinite(best.cost) || best.cost <= 0.0) {
    best.cost = 1.0;
  }
  if (!std::isfinite(best.power) || best.power <= 0.0) {
    best.power = 1.0;
  }
  return best;
}

double MixedObjective(const CostBreakdown& cost,
                      const ObjectiveWeights& weights,
                      const Baseline& baseline)
{
  double value = 0.0;
  if (weights.cost_weight > 0.0) {
    value += weights.cost_weight * cost.total / baseline.cost;
  }
  if (weights.power_weight > 0.0) {
    value += weights.power_weight * cost.power_total / baseline.power;
  }
  return value;
}

nlohmann::json CostToJson(const CostBreakdown& cost)
{
  return nlohmann::json{{"die_areas", cost.die_areas},
                        {"die_costs", cost.die_costs},
                        {"die_yields", cost.die_yields},
                        {"package_area", cost.package_area},
                        {"substrate_cost", cost.substrate_cost},
                        {"bond_cost", cost.bond_cost},
                        {"assembly_cost", cost.assembly_cost},
                        {"assembly_yield", cost.assembly_yield},
                        {"nre_total", cost.nre_total},
                        {"volume", cost.volume},
                        {"total", cost.total},
                        {"block_power", cost.block_power},
                        {"io_power", cost.io_power},
                        {"power_total", cost.power_total}};
}

}  // namespace chiplet
