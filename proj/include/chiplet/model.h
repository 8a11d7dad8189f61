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
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "chiplet/params.h"
#include "json.hpp"

namespace chiplet {

inline constexpr int kSchemaVersion = 1;

enum class BlockKind
{
  kLogic,
  kMemory,
};

struct Block
{
  std::string id;
  double area = 0.0;   // mm^2 in reference_tech
  double power = 0.0;  // W in reference_tech
  std::string reference_tech;
  BlockKind kind = BlockKind::kLogic;

  bool operator==(const Block&) const = default;
};

// Two-pin directed connection.  Bandwidth of each direction is carried by
// its own Net; the two are never merged.
struct Net
{
  std::string source;
  std::string sink;
  int64_t bandwidth = 1;  // bits
  std::string reach_class;

  bool operator==(const Net&) const = default;
};

struct Netlist
{
  std::vector<Block> blocks;
  std::vector<Net> nets;

  std::optional<int> BlockIndex(const std::string& id) const;
  double TotalArea() const;
  bool operator==(const Netlist&) const = default;
};

struct TechNode
{
  std::string id;
  double logic_area_scale = 1.0;
  double memory_area_scale = 1.0;
  double power_scale = 1.0;
  double wafer_cost = 1.0;
  double wafer_diameter = 300.0;  // mm
  double edge_exclusion = 3.0;    // mm
  double defect_density = 0.0;    // defects / cm^2
  double clustering_alpha = 3.0;
  double nre_design_cost = 1.0;
  double reticle_max_area = 858.0;  // mm^2

  bool operator==(const TechNode&) const = default;
};

struct IOCellType
{
  std::string id;
  double cell_area = 0.0;  // mm^2 per cell
  double reach = 0.0;      // mm
  int64_t bits_per_cell = 1;
  double energy_per_bit = 0.0;  // J/bit

  bool operator==(const IOCellType&) const = default;
};

struct AssemblyParams
{
  double cost_per_bond = 0.0;
  double bond_yield = 1.0;  // per chiplet
  double substrate_cost_per_mm2 = 0.0;
  double separation = 0.0;  // mm

  bool operator==(const AssemblyParams&) const = default;
};

struct ObjectiveWeights
{
  double cost_weight = 1.0;
  double power_weight = 0.0;

  bool operator==(const ObjectiveWeights&) const = default;
};

struct SystemConfig
{
  std::map<std::string, TechNode> techs;
  // Technologies the optimizers may assign; empty means every entry of techs.
  std::vector<std::string> candidate_techs;
  std::map<std::string, IOCellType> io_cells;
  AssemblyParams assembly;
  double volume = 1.0;
  double io_bit_rate = 1e9;  // bit/s per wire, converts J/bit into W
  ObjectiveWeights weights;
  FloorplanParams floorplan;
  PartitionParams partition;
  GAConfig ga;
  uint64_t seed = 1;

  const TechNode& Tech(const std::string& id) const;
  const IOCellType& Io(const std::string& id) const;
  std::vector<std::string> Candidates() const;
};

struct ScaledBlock
{
  double area = 0.0;
  double power = 0.0;
};

// Area/power of `block` when implemented in `target`.
ScaledBlock ScaleBlock(const Block& block,
                       const TechNode& target,
                       const std::map<std::string, TechNode>& techs);

// Block-to-chiplet assignment.  Chiplet indices are dense: every index in
// [0, num_chiplets) owns at least one block once Compact() has run.
struct Partition
{
  std::vector<int> assignment;
  int num_chiplets = 0;

  bool Valid(int num_blocks) const;
  bool operator==(const Partition&) const = default;
};

// Renumbers chiplets to remove empty indices, preserving relative order.
// `techs`, when given, is compacted in lockstep.
void Compact(Partition& partition, std::vector<std::string>* techs = nullptr);

Netlist ParseNetlist(const nlohmann::json& doc);
SystemConfig ParseConfig(const nlohmann::json& doc);
nlohmann::json NetlistToJson(const Netlist& netlist);
nlohmann::json ConfigToJson(const SystemConfig& config);

// Cross-checks the netlist against the config: every block's reference
// technology and every net's reach class must exist.
void Validate(const Netlist& netlist, const SystemConfig& config);

nlohmann::json ReadJsonFile(const std::filesystem::path& path);
void WriteJsonFile(const std::filesystem::path& path,
                   const nlohmann::json& doc);

std::pair<Netlist, SystemConfig> ParseSystem(
    const std::filesystem::path& netlist_file,
    const std::filesystem::path& config_file);

Partition ParsePartition(const nlohmann::json& doc, const Netlist& netlist);
nlohmann::json PartitionToJson(const Partition& partition,
                               const Netlist& netlist);

}  // namespace chiplet
