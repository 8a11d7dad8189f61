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

#include "chiplet/model.h"

#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "chiplet/error.h"

namespace chiplet {

using nlohmann::json;

const char* ErrorKindName(ErrorKind kind)
{
  switch (kind) {
    case ErrorKind::kSchema:
      return "schema";
    case ErrorKind::kDanglingReference:
      return "dangling_reference";
    case ErrorKind::kDuplicateId:
      return "duplicate_id";
    case ErrorKind::kUnknownTech:
      return "unknown_tech";
    case ErrorKind::kReticleViolation:
      return "reticle_violation";
    case ErrorKind::kInvalidArgument:
      return "invalid_argument";
    case ErrorKind::kIo:
      return "io";
  }
  return "unknown";
}

namespace {

[[noreturn]] void SchemaError(const std::string& where, const std::string& what)
{
  throw Error(ErrorKind::kSchema, where + ": " + what);
}

const json& Field(const json& obj, const char* key, const std::string& where)
{
  if (!obj.is_object()) {
    SchemaError(where, "expected an object");
  }
  auto it = obj.find(key);
  if (it == obj.end()) {
    SchemaError(where, std::string("missing field '") + key + "'");
  }
  return *it;
}

double Number(const json& obj, const char* key, const std::string& where)
{
  const json& v = Field(obj, key, where);
  if (!v.is_number()) {
    SchemaError(where, std::string("field '") + key + "' must be a number");
  }
  return v.get<double>();
}

double Number(const json& obj,
              const char* key,
              const std::string& where,
              double fallback)
{
  if (!obj.contains(key)) {
    return fallback;
  }
  return Number(obj, key, where);
}

int64_t Integer(const json& obj, const char* key, const std::string& where)
{
  const json& v = Field(obj, key, where);
  if (!v.is_number_integer()) {
    SchemaError(where, std::string("field '") + key + "' must be an integer");
  }
  return v.get<int64_t>();
}

int64_t Integer(const json& obj,
                const char* key,
                const std::string& where,
                int64_t fallback)
{
  if (!obj.contains(key)) {
    return fallback;
  }
  return Integer(obj, key, where);
}

std::string String(const json& obj, const char* key, const std::string& where)
{
  const json& v = Field(obj, key, where);
  if (!v.is_string()) {
    SchemaError(where, std::string("field '") + key + "' must be a string");
  }
  return v.get<std::string>();
}

const json& Array(const json& obj, const char* key, const std::string& where)
{
  const json& v = Field(obj, key, where);
  if (!v.is_array()) {
    SchemaError(where, std::string("field '") + key + "' must be an array");
  }
  return v;
}

void CheckVersion(const json& doc, const std::string& where)
{
  const int64_t version = Integer(doc, "schema_version", where);
  if (version != kSchemaVersion) {
    SchemaError(where,
                "unsupported schema_version " + std::to_string(version));
  }
}

void Require(bool ok, const std::string& where, const std::string& what)
{
  if (!ok) {
    SchemaError(where, what);
  }
}

BlockKind ParseKind(const std::string& s, const std::string& where)
{
  if (s == "logic") {
    return BlockKind::kLogic;
  }
  if (s == "memory") {
    return BlockKind::kMemory;
  }
  SchemaError(where, "kind must be 'logic' or 'memory', got '" + s + "'");
}

const char* KindName(BlockKind kind)
{
  return kind == BlockKind::kMemory ? "memory" : "logic";
}

AnnealModeParams ParseMode(const json& obj,
                           const std::string& where,
                           AnnealModeParams mode)
{
  mode.perturbations = Integer(obj, "perturbations", where, mode.perturbations);
  mode.cooling_rate = Number(obj, "cooling_rate", where, mode.cooling_rate);
  if (obj.contains("initial_temp")) {
    if (obj["initial_temp"].is_null()) {
      mode.initial_temp.reset();
    } else {
      mode.initial_temp = Number(obj, "initial_temp", where);
    }
  }
  Require(mode.perturbations >= 1, where, "perturbations must be >= 1");
  Require(mode.cooling_rate > 0.0 && mode.cooling_rate <= 1.0,
          where,
          "cooling_rate must be in (0, 1]");
  Require(!mode.initial_temp || *mode.initial_temp >= 0.0,
          where,
          "initial_temp must be >= 0");
  return mode;
}

json ModeToJson(const AnnealModeParams& mode)
{
  json j;
  j["perturbations"] = mode.perturbations;
  j["cooling_rate"] = mode.cooling_rate;
  j["initial_temp"] = mode.initial_temp ? json(*mode.initial_temp) : json();
  return j;
}

RefineBudget ParseBudget(const json& obj,
                         const std::string& where,
                         RefineBudget b)
{
  b.fm_passes = static_cast<int>(Integer(obj, "fm_passes", where, b.fm_passes));
  b.fm_vertex_fraction
      = Number(obj, "fm_vertex_fraction", where, b.fm_vertex_fraction);
  b.kl_passes = static_cast<int>(Integer(obj, "kl_passes", where, b.kl_passes));
  b.kl_vertex_fraction
      = Number(obj, "kl_vertex_fraction", where, b.kl_vertex_fraction);
  b.pool_random
      = static_cast<int>(Integer(obj, "pool_random", where, b.pool_random));
  b.pool_mincut
      = static_cast<int>(Integer(obj, "pool_mincut", where, b.pool_mincut));
  Require(b.fm_passes >= 0 && b.kl_passes >= 0, where, "passes must be >= 0");
  Require(b.fm_vertex_fraction >= 0.0 && b.fm_vertex_fraction <= 1.0,
          where,
          "fm_vertex_fraction must be in [0, 1]");
  Require(b.kl_vertex_fraction >= 0.0 && b.kl_vertex_fraction <= 1.0,
          where,
          "kl_vertex_fraction must be in [0, 1]");
  Require(b.pool_random >= 1 && b.pool_mincut >= 0,
          where,
          "pool_random must be >= 1 and pool_mincut >= 0");
  return b;
}

json BudgetToJson(const RefineBudget& b)
{
  return json{{"fm_passes", b.fm_passes},
              {"fm_vertex_fraction", b.fm_vertex_fraction},
              {"kl_passes", b.kl_passes},
              {"kl_vertex_fraction", b.kl_vertex_fraction},
              {"pool_random", b.pool_random},
              {"pool_mincut", b.pool_mincut}};
}

bool InUnit(double p)
{
  return p >= 0.0 && p <= 1.0;
}

}  // namespace

std::optional<int> Netlist::BlockIndex(const std::string& id) const
{
  for (size_t i = 0; i < blocks.size(); ++i) {
    if (blocks[i].id == id) {
      return static_cast<int>(i);
    }
  }
  return std::nullopt;
}

double Netlist::TotalArea() const
{
  double total = 0.0;
  for (const auto& b : blocks) {
    total += b.area;
  }
  return total;
}

const TechNode& SystemConfig::Tech(const std::string& id) const
{
  auto it = techs.find(id);
  if (it == techs.end()) {
    throw Error(ErrorKind::kUnknownTech, "unknown technology '" + id + "'");
  }
  return it->second;
}

const IOCellType& SystemConfig::Io(const std::string& id) const
{
  auto it = io_cells.find(id);
  if (it == io_cells.end()) {
    throw Error(ErrorKind::kDanglingReference,
                "unknown IO cell type '" + id + "'");
  }
  return it->second;
}

std::vector<std::string> SystemConfig::Candidates() const
{
  if (!candidate_techs.empty()) {
    return candidate_techs;
  }
  std::vector<std::string> ids;
  for (const auto& [id, tech] : techs) {
    ids.push_back(id);
  }
  return ids;
}

ScaledBlock ScaleBlock(const Block& block,
                       const TechNode& target,
                       const std::map<std::string, TechNode>& techs)
{
  auto it = techs.find(block.reference_tech);
  if (it == techs.end()) {
    throw Error(ErrorKind::kUnknownTech,
                "block '" + block.id + "' references unknown technology '"
                    + block.reference_tech + "'");
  }
  if (techs.find(target.id) == techs.end()) {
    throw Error(ErrorKind::kUnknownTech,
                "unknown target technology '" + target.id + "'");
  }
  const TechNode& ref = it->second;
  if (ref.id == target.id) {
    return {block.area, block.power};
  }
  const double area_ratio = block.kind == BlockKind::kMemory
                                ? target.memory_area_scale / ref.memory_area_scale
                                : target.logic_area_scale / ref.logic_area_scale;
  return {block.area * area_ratio,
          block.power * (target.power_scale / ref.power_scale)};
}

bool Partition::Valid(int num_blocks) const
{
  if (static_cast<int>(assignment.size()) != num_blocks || num_chiplets < 1) {
    return false;
  }
  std::vector<bool> used(num_chiplets, false);
  for (int c : assignment) {
    if (c < 0 || c >= num_chiplets) {
      return false;
    }
    used[c] = true;
  }
  return std::all_of(used.begin(), used.end(), [](bool u) { return u; });
}

void Compact(Partition& partition, std::vector<std::string>* techs)
{
  int max_index = -1;
  for (int c : partition.assignment) {
    max_index = std::max(max_index, c);
  }
  const int slots = std::max(partition.num_chiplets, max_index + 1);
  std::vector<int> remap(slots, -1);
  for (int c : partition.assignment) {
    remap[c] = 0;
  }
  int next = 0;
  std::vector<std::string> kept;
  for (int c = 0; c < slots; ++c) {
    if (remap[c] == 0) {
      remap[c] = next++;
      if (techs != nullptr && c < static_cast<int>(techs->size())) {
        kept.push_back((*techs)[c]);
      }
    }
  }
  for (int& c : partition.assignment) {
    c = remap[c];
  }
  partition.num_chiplets = next;
  if (techs != nullptr) {
    *techs = std::move(kept);
  }
}

Netlist ParseNetlist(const json& doc)
{
  CheckVersion(doc, "netlist");
  Netlist netlist;
  std::set<std::string> ids;
  const json& blocks = Array(doc, "blocks", "netlist");
  for (size_t i = 0; i < blocks.size(); ++i) {
    const std::string where = "netlist.blocks[" + std::to_string(i) + "]";
    Block b;
    b.id = String(blocks[i], "id", where);
    b.area = Number(blocks[i], "area", where);
    b.power = Number(blocks[i], "power", where);
    b.reference_tech = String(blocks[i], "reference_tech", where);
    if (blocks[i].contains("kind")) {
      b.kind = ParseKind(String(blocks[i], "kind", where), where);
    }
    Require(b.area > 0.0, where, "area must be > 0");
    Require(b.power >= 0.0, where, "power must be >= 0");
    if (!ids.insert(b.id).second) {
      throw Error(ErrorKind::kDuplicateId, "duplicate block id '" + b.id + "'");
    }
    netlist.blocks.push_back(std::move(b));
  }
  const json& nets = Array(doc, "nets", "netlist");
  for (size_t i = 0; i < nets.size(); ++i) {
    const std::string where = "netlist.nets[" + std::to_string(i) + "]";
    Net n;
    n.source = String(nets[i], "source", where);
    n.sink = String(nets[i], "sink", where);
    n.bandwidth = Integer(nets[i], "bandwidth", where);
    n.reach_class = String(nets[i], "reach_class", where);
    Require(n.bandwidth >= 1, where, "bandwidth must be >= 1");
    for (const std::string* end : {&n.source, &n.sink}) {
      if (ids.count(*end) == 0) {
        throw Error(ErrorKind::kDanglingReference,
                    where + ": unknown block '" + *end + "'");
      }
    }
    if (n.source == n.sink) {
      SchemaError(where, "self-loop on block '" + n.source + "'");
    }
    netlist.nets.push_back(std::move(n));
  }
  return netlist;
}

json NetlistToJson(const Netlist& netlist)
{
  json blocks = json::array();
  for (const auto& b : netlist.blocks) {
    blocks.push_back({{"id", b.id},
                      {"area", b.area},
                      {"power", b.power},
                      {"reference_tech", b.reference_tech},
                      {"kind", KindName(b.kind)}});
  }
  json nets = json::array();
  for (const auto& n : netlist.nets) {
    nets.push_back({{"source", n.source},
                    {"sink", n.sink},
                    {"bandwidth", n.bandwidth},
                    {"reach_class", n.reach_class}});
  }
  return json{{"schema_version", kSchemaVersion},
              {"blocks", std::move(blocks)},
              {"nets", std::move(nets)}};
}

SystemConfig ParseConfig(const json& doc)
{
  CheckVersion(doc, "config");
  SystemConfig cfg;

  const json& techs = Array(doc, "technologies", "config");
  for (size_t i = 0; i < techs.size(); ++i) {
    const std::string where = "config.technologies[" + std::to_string(i) + "]";
    const json& t = techs[i];
    TechNode node;
    node.id = String(t, "id", where);
    node.logic_area_scale = Number(t, "logic_area_scale", where);
    node.memory_area_scale = Number(t, "memory_area_scale", where);
    node.power_scale = Number(t, "power_scale", where);
    node.wafer_cost = Number(t, "wafer_cost", where);
    node.wafer_diameter = Number(t, "wafer_diameter", where, node.wafer_diameter);
    node.edge_exclusion = Number(t, "edge_exclusion", where, node.edge_exclusion);
    node.defect_density = Number(t, "defect_density", where);
    node.clustering_alpha
        = Number(t, "clustering_alpha", where, node.clustering_alpha);
    node.nre_design_cost = Number(t, "nre_design_cost", where);
    node.reticle_max_area
        = Number(t, "reticle_max_area", where, node.reticle_max_area);
    Require(node.logic_area_scale > 0 && node.memory_area_scale > 0
                && node.power_scale > 0,
            where,
            "scale factors must be > 0");
    Require(node.wafer_cost > 0 && node.nre_design_cost > 0,
            where,
            "costs must be > 0");
    Require(node.wafer_diameter > 2.0 * node.edge_exclusion
                && node.edge_exclusion >= 0,
            where,
            "wafer_diameter must exceed twice the edge exclusion");
    Require(node.defect_density >= 0, where, "defect_density must be >= 0");
    Require(node.clustering_alpha > 0, where, "clustering_alpha must be > 0");
    Require(node.reticle_max_area > 0, where, "reticle_max_area must be > 0");
    if (!cfg.techs.emplace(node.id, node).second) {
      throw Error(ErrorKind::kDuplicateId,
                  "duplicate technology id '" + node.id + "'");
    }
  }
  Require(!cfg.techs.empty(), "config", "technology table is empty");

  if (doc.contains("candidate_techs")) {
    for (const auto& id : Array(doc, "candidate_techs", "config")) {
      Require(id.is_string(), "config.candidate_techs", "entries must be strings");
      const std::string s = id.get<std::string>();
      if (cfg.techs.count(s) == 0) {
        throw Error(ErrorKind::kUnknownTech,
                    "candidate technology '" + s + "' not in technology table");
      }
      cfg.candidate_techs.push_back(s);
    }
  }

  const json& ios = Array(doc, "io_cells", "config");
  for (size_t i = 0; i < ios.size(); ++i) {
    const std::string where = "config.io_cells[" + std::to_string(i) + "]";
    IOCellType io;
    io.id = String(ios[i], "id", where);
    io.cell_area = Number(ios[i], "cell_area", where);
    io.reach = Number(ios[i], "reach", where);
    io.bits_per_cell = Integer(ios[i], "bits_per_cell", where);
    io.energy_per_bit = Number(ios[i], "energy_per_bit", where, 0.0);
    Require(io.cell_area > 0, where, "cell_area must be > 0");
    Require(io.reach > 0, where, "reach must be > 0");
    Require(io.bits_per_cell >= 1, where, "bits_per_cell must be >= 1");
    Require(io.energy_per_bit >= 0, where, "energy_per_bit must be >= 0");
    if (!cfg.io_cells.emplace(io.id, io).second) {
      throw Error(ErrorKind::kDuplicateId,
                  "duplicate IO cell id '" + io.id + "'");
    }
  }

  const json& asm_doc = Field(doc, "assembly", "config");
  cfg.assembly.cost_per_bond = Number(asm_doc, "cost_per_bond", "config.assembly");
  cfg.assembly.bond_yield = Number(asm_doc, "bond_yield", "config.assembly");
  cfg.assembly.substrate_cost_per_mm2
      = Number(asm_doc, "substrate_cost_per_mm2", "config.assembly");
  cfg.assembly.separation = Number(asm_doc, "separation", "config.assembly");
  Require(cfg.assembly.bond_yield > 0 && cfg.assembly.bond_yield <= 1,
          "config.assembly",
          "bond_yield must be in (0, 1]");
  Require(cfg.assembly.separation >= 0, "config.assembly", "separation must be >= 0");
  Require(cfg.assembly.cost_per_bond >= 0
              && cfg.assembly.substrate_cost_per_mm2 >= 0,
          "config.assembly",
          "assembly costs must be >= 0");

  cfg.volume = Number(doc, "volume", "config");
  Require(cfg.volume >= 1, "config", "volume must be >= 1");
  cfg.io_bit_rate = Number(doc, "io_bit_rate", "config", cfg.io_bit_rate);
  Require(cfg.io_bit_rate >= 0, "config", "io_bit_rate must be >= 0");

  if (doc.contains("objective")) {
    const json& o = doc["objective"];
    cfg.weights.cost_weight = Number(o, "cost_weight", "config.objective");
    cfg.weights.power_weight = Number(o, "power_weight", "config.objective");
  }
  Require(InUnit(cfg.weights.cost_weight) && InUnit(cfg.weights.power_weight)
              && std::abs(cfg.weights.cost_weight + cfg.weights.power_weight - 1.0)
                     < 1e-9,
          "config.objective",
          "weights must lie in [0, 1] and sum to 1");

  if (doc.contains("floorplan")) {
    const json& f = doc["floorplan"];
    const std::string where = "config.floorplan";
    FloorplanParams& fp = cfg.floorplan;
    fp.alpha = Number(f, "alpha", where, fp.alpha);
    fp.beta = Number(f, "beta", where, fp.beta);
    fp.gamma = Number(f, "gamma", where, fp.gamma);
    fp.walkers = static_cast<int>(Integer(f, "walkers", where, fp.walkers));
    if (f.contains("standard")) {
      fp.standard = ParseMode(f["standard"], where + ".standard", fp.standard);
    }
    if (f.contains("fast")) {
      fp.fast = ParseMode(f["fast"], where + ".fast", fp.fast);
    }
    if (f.contains("move_probs")) {
      const json& probs = Array(f, "move_probs", where);
      Require(probs.size() == 5, where, "move_probs must have 5 entries");
      for (size_t i = 0; i < 5; ++i) {
        Require(probs[i].is_number(), where, "move_probs entries must be numbers");
        fp.move_probs[i] = probs[i].get<double>();
      }
    }
    fp.temp_steps = static_cast<int>(Integer(f, "temp_steps", where, fp.temp_steps));
    fp.sync_divisions
        = static_cast<int>(Integer(f, "sync_divisions", where, fp.sync_divisions));
    fp.winners_fraction = Number(f, "winners_fraction", where, fp.winners_fraction);
    fp.min_aspect = Number(f, "min_aspect", where, fp.min_aspect);
    fp.max_aspect = Number(f, "max_aspect", where, fp.max_aspect);
    Require(fp.alpha >= 0 && fp.beta >= 0 && fp.gamma >= 0,
            where,
            "objective weights must be >= 0");
    Require(fp.walkers >= 1 && fp.temp_steps >= 1 && fp.sync_divisions >= 1,
            where,
            "walkers, temp_steps and sync_divisions must be >= 1");
    Require(fp.winners_fraction > 0 && fp.winners_fraction <= 1,
            where,
            "winners_fraction must be in (0, 1]");
    Require(fp.min_aspect > 0 && fp.min_aspect <= 1 && fp.max_aspect >= 1,
            where,
            "aspect bounds must satisfy 0 < min <= 1 <= max");
  }
  {
    double sum = 0.0;
    for (double p : cfg.floorplan.move_probs) {
      Require(p >= 0, "config.floorplan", "move_probs must be >= 0");
      sum += p;
    }
    Require(std::abs(sum - 1.0) < 1e-9, "config.floorplan", "move_probs must sum to 1");
  }

  if (doc.contains("partition")) {
    const json& p = doc["partition"];
    const std::string where = "config.partition";
    PartitionParams& pp = cfg.partition;
    if (p.contains("full")) {
      pp.full = ParseBudget(p["full"], where + ".full", pp.full);
    }
    if (p.contains("reduced")) {
      pp.reduced = ParseBudget(p["reduced"], where + ".reduced", pp.reduced);
    }
    pp.spectral_k = static_cast<int>(Integer(p, "spectral_k", where, pp.spectral_k));
    pp.expansion_k
        = static_cast<int>(Integer(p, "expansion_k", where, pp.expansion_k));
    pp.kmeans_restarts
        = static_cast<int>(Integer(p, "kmeans_restarts", where, pp.kmeans_restarts));
    pp.mincut_imbalance = Number(p, "mincut_imbalance", where, pp.mincut_imbalance);
    pp.infeasible_penalty
        = Number(p, "infeasible_penalty", where, pp.infeasible_penalty);
    Require(pp.spectral_k >= 1 && pp.expansion_k >= 1 && pp.kmeans_restarts >= 1,
            where,
            "spectral_k, expansion_k and kmeans_restarts must be >= 1");
    Require(pp.mincut_imbalance >= 0 && pp.infeasible_penalty >= 0,
            where,
            "mincut_imbalance and infeasible_penalty must be >= 0");
  }

  if (doc.contains("ga")) {
    const json& g = doc["ga"];
    const std::string where = "config.ga";
    GAConfig& ga = cfg.ga;
    ga.tot_pop = static_cast<int>(Integer(g, "tot_pop", where, ga.tot_pop));
    ga.k_pop = static_cast<int>(Integer(g, "k_pop", where, ga.k_pop));
    ga.zeta = static_cast<int>(Integer(g, "zeta", where, ga.zeta));
    ga.sigma = static_cast<int>(Integer(g, "sigma", where, ga.sigma));
    ga.psi = static_cast<int>(Integer(g, "psi", where, ga.psi));
    ga.epsilon = static_cast<int>(Integer(g, "epsilon", where, ga.epsilon));
    if (g.contains("delta_threshold") && g["delta_threshold"].is_string()
        && g["delta_threshold"].get<std::string>() == "inf") {
      ga.delta_threshold = std::numeric_limits<double>::infinity();
    } else {
      ga.delta_threshold = Number(g, "delta_threshold", where, ga.delta_threshold);
    }
    ga.p_c = Number(g, "p_c", where, ga.p_c);
    ga.p_m = Number(g, "p_m", where, ga.p_m);
    ga.K_max = static_cast<int>(Integer(g, "K_max", where, ga.K_max));
  }
  {
    const GAConfig& ga = cfg.ga;
    const std::string where = "config.ga";
    Require(ga.tot_pop == ga.k_pop + ga.sigma, where, "tot_pop must equal k_pop + sigma");
    Require(ga.k_pop >= 1 && ga.sigma >= 0 && ga.zeta >= 1 && ga.psi >= 1
                && ga.epsilon >= 0 && ga.K_max >= 1,
            where,
            "GA sizes out of range");
    Require(InUnit(ga.p_c) && InUnit(ga.p_m), where, "probabilities must be in [0, 1]");
    Require(ga.delta_threshold >= 0, where, "delta_threshold must be >= 0");
  }

  if (doc.contains("seed")) {
    const json& s = doc["seed"];
    Require(s.is_number_unsigned() || s.is_number_integer(),
            "config",
            "seed must be a non-negative integer");
    cfg.seed = s.get<uint64_t>();
  }
  return cfg;
}

json ConfigToJson(const SystemConfig& cfg)
{
  json techs = json::array();
  for (const auto& [id, t] : cfg.techs) {
    techs.push_back({{"id", t.id},
                     {"logic_area_scale", t.logic_area_scale},
                     {"memory_area_scale", t.memory_area_scale},
                     {"power_scale", t.power_scale},
                     {"wafer_cost", t.wafer_cost},
                     {"wafer_diameter", t.wafer_diameter},
                     {"edge_exclusion", t.edge_exclusion},
                     {"defect_density", t.defect_density},
                     {"clustering_alpha", t.clustering_alpha},
                     {"nre_design_cost", t.nre_design_cost},
                     {"reticle_max_area", t.reticle_max_area}});
  }
  json ios = json::array();
  for (const auto& [id, io] : cfg.io_cells) {
    ios.push_back({{"id", io.id},
                   {"cell_area", io.cell_area},
                   {"reach", io.reach},
                   {"bits_per_cell", io.bits_per_cell},
                   {"energy_per_bit", io.energy_per_bit}});
  }
  const FloorplanParams& fp = cfg.floorplan;
  const PartitionParams& pp = cfg.partition;
  const GAConfig& ga = cfg.ga;
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["technologies"] = std::move(techs);
  doc["candidate_techs"] = cfg.candidate_techs;
  doc["io_cells"] = std::move(ios);
  doc["assembly"] = {{"cost_per_bond", cfg.assembly.cost_per_bond},
                     {"bond_yield", cfg.assembly.bond_yield},
                     {"substrate_cost_per_mm2", cfg.assembly.substrate_cost_per_mm2},
                     {"separation", cfg.assembly.separation}};
  doc["volume"] = cfg.volume;
  doc["io_bit_rate"] = cfg.io_bit_rate;
  doc["objective"] = {{"cost_weight", cfg.weights.cost_weight},
                      {"power_weight", cfg.weights.power_weight}};
  doc["floorplan"] = {{"alpha", fp.alpha},
                      {"beta", fp.beta},
                      {"gamma", fp.gamma},
                      {"walkers", fp.walkers},
                      {"standard", ModeToJson(fp.standard)},
                      {"fast", ModeToJson(fp.fast)},
                      {"move_probs", fp.move_probs},
                      {"temp_steps", fp.temp_steps},
                      {"sync_divisions", fp.sync_divisions},
                      {"winners_fraction", fp.winners_fraction},
                      {"min_aspect", fp.min_aspect},
                      {"max_aspect", fp.max_aspect}};
  doc["partition"] = {{"full", BudgetToJson(pp.full)},
                      {"reduced", BudgetToJson(pp.reduced)},
                      {"spectral_k", pp.spectral_k},
                      {"expansion_k", pp.expansion_k},
                      {"kmeans_restarts", pp.kmeans_restarts},
                      {"mincut_imbalance", pp.mincut_imbalance},
                      {"infeasible_penalty", pp.infeasible_penalty}};
  doc["ga"] = {{"tot_pop", ga.tot_pop},
               {"k_pop", ga.k_pop},
               {"zeta", ga.zeta},
               {"sigma", ga.sigma},
               {"psi", ga.psi},
               {"epsilon", ga.epsilon},
               {"delta_threshold",
                std::isinf(ga.delta_threshold) ? json("inf")
                                               : json(ga.delta_threshold)},
               {"p_c", ga.p_c},
               {"p_m", ga.p_m},
               {"K_max", ga.K_max}};
  doc["seed"] = cfg.seed;
  return doc;
}

void Validate(const Netlist& netlist, const SystemConfig& config)
{
  for (const auto& b : netlist.blocks) {
    if (config.techs.count(b.reference_tech) == 0) {
      throw Error(ErrorKind::kUnknownTech,
                  "block '" + b.id + "' references unknown technology '"
                      + b.reference_tech + "'");
    }
  }
  for (const auto& n : netlist.nets) {
    if (config.io_cells.count(n.reach_class) == 0) {
      throw Error(ErrorKind::kDanglingReference,
                  "net " + n.source + "->" + n.sink
                      + " references unknown IO cell type '" + n.reach_class
                      + "'");
    }
  }
}

json ReadJsonFile(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::kIo, "cannot open '" + path.string() + "'");
  }
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kSchema,
                path.string() + ": malformed JSON: " + e.what());
  }
}

void WriteJsonFile(const std::filesystem::path& path, const json& doc)
{
  std::ofstream out(path);
  if (!out) {
    throw Error(ErrorKind::kIo, "cannot write '" + path.string() + "'");
  }
  out << doc.dump(2) << '\n';
}

std::pair<Netlist, SystemConfig> ParseSystem(
    const std::filesystem::path& netlist_file,
    const std::filesystem::path& config_file)
{
  Netlist netlist = ParseNetlist(ReadJsonFile(netlist_file));
  SystemConfig config = ParseConfig(ReadJsonFile(config_file));
  Validate(netlist, config);
  return {std::move(netlist), std::move(config)};
}

Partition ParsePartition(const json& doc, const Netlist& netlist)
{
  CheckVersion(doc, "partition");
  const json& map = Field(doc, "assignment", "partition");
  Require(map.is_object(), "partition", "assignment must be an object");
  Partition p;
  p.assignment.assign(netlist.blocks.size(), -1);
  for (auto it = map.begin(); it != map.end(); ++it) {
    auto idx = netlist.BlockIndex(it.key());
    if (!idx) {
      throw Error(ErrorKind::kDanglingReference,
                  "partition references unknown block '" + it.key() + "'");
    }
    Require(it.value().is_number_integer() && it.value().get<int>() >= 0,
            "partition",
            "chiplet index of '" + it.key() + "' must be a non-negative integer");
    p.assignment[*idx] = it.value().get<int>();
  }
  for (size_t i = 0; i < p.assignment.size(); ++i) {
    if (p.assignment[i] < 0) {
      SchemaError("partition",
                  "block '" + netlist.blocks[i].id + "' is not assigned");
    }
    p.num_chiplets = std::max(p.num_chiplets, p.assignment[i] + 1);
  }
  return p;
}

json PartitionToJson(const Partition& partition, const Netlist& netlist)
{
  json map = json::object();
  for (size_t i = 0; i < netlist.blocks.size(); ++i) {
    map[netlist.blocks[i].id] = partition.assignment[i];
  }
  return json{{"schema_version", kSchemaVersion},
              {"num_chiplets", partition.num_chiplets},
              {"assignment", std::move(map)}};
}

}  // namespace chiplet
