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

#include <random>
#include <string>
#include <vector>

#include "chiplet/model.h"

namespace chiplet::testing {

inline TechNode MakeTech(const std::string& id,
                         double logic,
                         double memory,
                         double power,
                         double wafer,
                         double defects,
                         double nre)
{
  TechNode t;
  t.id = id;
  t.logic_area_scale = logic;
  t.memory_area_scale = memory;
  t.power_scale = power;
  t.wafer_cost = wafer;
  t.defect_density = defects;
  t.nre_design_cost = nre;
  return t;
}

// Three candidate techs plus the 45nm reference, small SA budgets.
inline SystemConfig ToyConfig(double reach = 50.0)
{
  SystemConfig cfg;
  cfg.techs["45nm"] = MakeTech("45nm", 1.0, 1.0, 1.0, 2000.0, 0.1, 1e6);
  cfg.techs["14nm"] = MakeTech("14nm", 0.2, 0.3, 0.2, 4000.0, 0.2, 3e6);
  cfg.techs["10nm"] = MakeTech("10nm", 0.1, 0.25, 0.17, 6000.0, 0.3, 5e6);
  cfg.techs["7nm"] = MakeTech("7nm", 0.06, 0.2, 0.15, 9000.0, 0.4, 8e6);
  cfg.candidate_techs = {"7nm", "10nm", "14nm"};
  cfg.io_cells["default"] = {"default", 0.01, reach, 16, 1e-12};
  cfg.assembly = {0.5, 0.99, 0.0, 0.5};
  cfg.volume = 1e6;
  cfg.floorplan.standard.perturbations = 4000;
  cfg.floorplan.fast.perturbations = 400;
  cfg.floorplan.walkers = 4;
  return cfg;
}

inline Block MakeBlock(const std::string& id,
                       double area,
                       double power = 1.0,
                       BlockKind kind = BlockKind::kLogic)
{
  return {id, area, power, "45nm", kind};
}

inline Net MakeNet(const std::string& src, const std::string& dst, int64_t bits)
{
  return {src, dst, bits, "default"};
}

// Path of `n` blocks b0 - b1 - ... with `bits` per link.
inline Netlist PathNetlist(int n, double area, int64_t bits)
{
  Netlist nl;
  for (int i = 0; i < n; ++i) {
    nl.blocks.push_back(MakeBlock("b" + std::to_string(i), area));
  }
  for (int i = 0; i + 1 < n; ++i) {
    nl.nets.push_back(
        MakeNet("b" + std::to_string(i), "b" + std::to_string(i + 1), bits));
  }
  return nl;
}

// Costs where splitting pays (high defect density) but every cut net
// costs real IO area.  Substrate is free and reach is loose, so the cost
// of a homogeneous partition does not depend on its floorplan.
inline SystemConfig PartitionToyConfig()
{
  SystemConfig cfg = ToyConfig(1e4);
  TechNode& t = cfg.techs["7nm"];
  t.logic_area_scale = 0.5;
  t.memory_area_scale = 0.5;
  t.defect_density = 1.0;
  t.nre_design_cost = 0.0;
  cfg.io_cells["default"].cell_area = 0.2;
  cfg.assembly = {1.0, 0.99, 0.0, 0.5};
  return cfg;
}

// Connected random netlist with `n` blocks: a spanning tree plus extras.
inline Netlist ToyNetlist(int n, uint64_t seed)
{
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> area(10.0, 80.0);
  Netlist nl;
  for (int i = 0; i < n; ++i) {
    nl.blocks.push_back(MakeBlock("b" + std::to_string(i), area(rng), area(rng) / 20));
  }
  auto bits = [&] { return 8 + static_cast<int64_t>(rng() % 120); };
  for (int i = 1; i < n; ++i) {
    const int j = static_cast<int>(rng() % i);
    nl.nets.push_back(MakeNet(nl.blocks[j].id, nl.blocks[i].id, bits()));
  }
  for (int e = 0; e < n / 2; ++e) {
    const int a = static_cast<int>(rng() % n);
    const int b = static_cast<int>(rng() % n);
    if (a != b) {
      nl.nets.push_back(MakeNet(nl.blocks[a].id, nl.blocks[b].id, bits()));
    }
  }
  return nl;
}

// Large dies, negligible NRE and half memory blocks (cheaper in 14nm), so
// both splitting and the tech mix matter.
inline SystemConfig HeteroToyConfig()
{
  SystemConfig cfg = ToyConfig(1e4);
  cfg.volume = 1e12;
  return cfg;
}

inline Netlist HeteroToyNetlist(int n, uint64_t seed)
{
  Netlist nl = ToyNetlist(n, seed);
  for (size_t i = 0; i < nl.blocks.size(); ++i) {
    nl.blocks[i].area *= 25.0;
    nl.blocks[i].kind = i % 2 ? BlockKind::kMemory : BlockKind::kLogic;
  }
  return nl;
}

// Two 4-block cliques joined by one light edge.
inline Netlist TwoCliques(double area = 40.0, int64_t heavy = 64, int64_t light = 1)
{
  Netlist nl;
  for (int i = 0; i < 8; ++i) {
    nl.blocks.push_back(MakeBlock("b" + std::to_string(i), area));
  }
  for (int c = 0; c < 2; ++c) {
    for (int i = 0; i < 4; ++i) {
      for (int j = i + 1; j < 4; ++j) {
        nl.nets.push_back(MakeNet("b" + std::to_string(4 * c + i),
                                  "b" + std::to_string(4 * c + j), heavy));
      }
    }
  }
  nl.nets.push_back(MakeNet("b3", "b4", light));
  return nl;
}

}  // namespace chiplet::testing
