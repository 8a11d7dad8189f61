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
#include <optional>
#include <string>
#include <vector>

#include "chiplet/floorplan.h"
#include "chiplet/model.h"
#include "json.hpp"

namespace chiplet {

inline constexpr const char* kToolVersion = "1.0.0";

struct PartitionOptions
{
  std::optional<std::string> homogeneous;  // tech id; skips the GA
  int threads = 1;
};

// Everything a partition run writes.  `timing` is kept out of the
// reproducible files.
struct Bundle
{
  nlohmann::json partition;
  nlohmann::json genome;
  nlohmann::json floorplan;
  nlohmann::json cost;
  nlohmann::json manifest;
  std::vector<nlohmann::json> ga_trace;
  nlohmann::json timing;
  bool feasible = false;
  int num_chiplets = 0;
};

Bundle RunPartition(const Netlist& netlist,
                    const SystemConfig& config,
                    const PartitionOptions& options);

// Re-runs the partition recorded in a manifest.
Bundle ReplayManifest(const nlohmann::json& manifest, int threads);

void WriteBundle(const Bundle& bundle, const std::filesystem::path& dir);

// Chiplet-level instance: {"chiplets": [{id, area}], "nets": [{source,
// sink, bits, reach, io_area}], "separation"?}.
struct ChipletInstance
{
  std::vector<std::string> names;
  FPProblem problem;
};

ChipletInstance ParseChipletInstance(const nlohmann::json& doc,
                                     const FloorplanParams& params,
                                     double default_separation);

nlohmann::json RunFloorplan(const ChipletInstance& instance,
                            AnnealMode mode,
                            uint64_t seed,
                            int threads);

// Floorplans an externally produced partition in standard mode and
// reports its cost and feasibility.
nlohmann::json RunEvaluate(const Netlist& netlist,
                           const SystemConfig& config,
                           const nlohmann::json& partition_doc,
                           const nlohmann::json& genome_doc,
                           int threads);

}  // namespace chiplet
