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

#include "chiplet/testgen.h"

#include <cmath>

#include "chiplet/error.h"

namespace chiplet {

int64_t RentTerminals(double components, double k, double p)
{
  if (components < 1.0 || p <= 0.0 || p >= 1.0) {
    throw Error(ErrorKind::kInvalidArgument,
                "Rent's rule needs components >= 1 and 0 < p < 1");
  }
  return std::llround(k * std::pow(components, p));
}

int64_t RentScaledBits(int64_t base, double scaling, double k, double p)
{
  const double ratio = static_cast<double>(RentTerminals(scaling, k, p))
                       / static_cast<double>(RentTerminals(1.0, k, p));
  return std::max<int64_t>(1, std::llround(static_cast<double>(base) * ratio));
}

namespace {

class Builder
{
 public:
  Builder(const std::string& tech, const std::string& reach)
      : tech_(tech), reach_(reach)
  {
  }

  void AddBlock(const std::string& id, double area, double power, BlockKind kind)
  {
    netlist_.blocks.push_back({id, area, power, tech_, kind});
  }

  void AddNet(const std::string& src, const std::string& dst, int64_t bits)
  {
    netlist_.nets.push_back({src, dst, bits, reach_});
  }

  Netlist Take() { return std::move(netlist_); }

 private:
  std::string tech_;
  std::string reach_;
  Netlist netlist_;
};

std::pair<int, int> MeshShape(const GridSpec& grid)
{
  if (grid.rows > 0 && grid.cols > 0) {
    if (grid.rows * grid.cols != grid.tiles) {
      throw Error(ErrorKind::kInvalidArgument,
                  "mesh rows x cols must equal the tile count");
    }
    return {grid.rows, grid.cols};
  }
  int rows = 1;
  for (int r = 1; r * r <= grid.tiles; ++r) {
    if (grid.tiles % r == 0) {
      rows = r;
    }
  }
  return {rows, grid.tiles / rows};
}

}  // namespace

Netlist GenWaferscale(const GridSpec& grid, const TileSpec& tile)
{
  if (grid.tiles < 1 || tile.cores < 0 || tile.shared_mems < 0) {
    throw Error(ErrorKind::kInvalidArgument, "invalid tile or grid spec");
  }
  const double s = tile.area_scaling;
  const double ps = tile.power_scaling;
  auto logic_bits = [&](int64_t base) {
    return RentScaledBits(base, s, tile.rent_k, tile.rent_p_logic);
  };
  auto memory_bits = [&](int64_t base) {
    return RentScaledBits(base, s, tile.rent_k, tile.rent_p_memory);
  };
  Builder b(tile.reference_tech, tile.reach_class);
  for (int t = 0; t < grid.tiles; ++t) {
    const std::string p = "t" + std::to_string(t) + "_";
    const std::string xbar = p + "xbar";
    const std::string router = p + "router";
    for (int i = 0; i < tile.cores; ++i) {
      const std::string idx = std::to_string(i);
      b.AddBlock(p + "core" + idx, tile.core_area * s, tile.core_power * ps,
                 BlockKind::kLogic);
      b.AddBlock(p + "bus" + idx, tile.bus_area * s, tile.bus_power * ps,
                 BlockKind::kLogic);
      b.AddBlock(p + "pmem" + idx, tile.private_mem_area * s,
                 tile.private_mem_power * ps, BlockKind::kMemory);
    }
    for (int j = 0; j < tile.shared_mems; ++j) {
      b.AddBlock(p + "smem" + std::to_string(j), tile.shared_mem_area * s,
                 tile.shared_mem_power * ps, BlockKind::kMemory);
    }
    if (tile.has_crossbar) {
      b.AddBlock(xbar, tile.crossbar_area * s, tile.crossbar_power * ps,
                 BlockKind::kLogic);
    }
    if (tile.has_router) {
      b.AddBlock(router, tile.router_area * s, tile.router_power * ps,
                 BlockKind::kLogic);
    }
    for (int i = 0; i < tile.cores; ++i) {
      const std::string idx = std::to_string(i);
      b.AddNet(p + "core" + idx, p + "bus" + idx, logic_bits(tile.core_bus_bits));
      b.AddNet(p + "bus" + idx, p + "pmem" + idx, memory_bits(tile.bus_mem_bits));
      if (tile.has_crossbar) {
        b.AddNet(p + "bus" + idx, xbar, logic_bits(tile.bus_xbar_bits));
      }
    }
    if (tile.has_crossbar) {
      for (int j = 0; j < tile.shared_mems; ++j) {
        b.AddNet(xbar, p + "smem" + std::to_string(j),
                 memory_bits(tile.xbar_mem_bits));
      }
      if (tile.has_router) {
        b.AddNet(xbar, router, logic_bits(tile.xbar_router_bits));
      }
    }
  }
  if (tile.has_router) {
    const auto [rows, cols] = MeshShape(grid);
    auto router = [](int t) { return "t" + std::to_string(t) + "_router"; };
    const int64_t bits = logic_bits(tile.mesh_bits);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        const int t = r * cols + c;
        if (c + 1 < cols) {
          b.AddNet(router(t), router(t + 1), bits);
          b.AddNet(router(t + 1), router(t), bits);
        }
        if (r + 1 < rows) {
          b.AddNet(router(t), router(t + cols), bits);
          b.AddNet(router(t + cols), router(t), bits);
        }
      }
    }
  }
  return b.Take();
}

Netlist GenMemPool(double area_scaling,
                   const std::string& reference_tech,
                   const std::string& reach_class)
{
  const double s = area_scaling;
  auto bits = [&](int64_t base) { return RentScaledBits(base, s, 4.0, 0.45); };
  Builder b(reference_tech, reach_class);
  for (int i = 0; i < 16; ++i) {
    b.AddBlock("tile" + std::to_string(i), 0.2 * s, 0.02 * s, BlockKind::kLogic);
  }
  for (int i = 0; i < 16; ++i) {
    b.AddBlock("remote_ic" + std::to_string(i), 0.02 * s, 0.004 * s,
               BlockKind::kLogic);
  }
  for (int g = 0; g < 4; ++g) {
    b.AddBlock("local_xbar" + std::to_string(g), 0.04 * s, 0.008 * s,
               BlockKind::kLogic);
  }
  for (int g = 0; g < 4; ++g) {
    b.AddBlock("axi" + std::to_string(g), 0.03 * s, 0.005 * s, BlockKind::kLogic);
  }
  for (int i = 0; i < 16; ++i) {
    const std::string idx = std::to_string(i);
    b.AddNet("tile" + idx, "remote_ic" + idx, bits(64));
    b.AddNet("remote_ic" + idx, "local_xbar" + std::to_string(i / 4), bits(64));
  }
  for (int g = 0; g < 4; ++g) {
    b.AddNet("local_xbar" + std::to_string(g),
             "local_xbar" + std::to_string((g + 1) % 4), bits(128));
    b.AddNet("local_xbar" + std::to_string(g), "axi" + std::to_string(g), bits(64));
  }
  return b.Take();
}

SystemConfig DefaultConfig()
{
  SystemConfig cfg;
  // Area and power factors relative to 45nm; logic 45nm->10nm is ~10x.
  // Wafer, defect and NRE figures are representative defaults.
  auto add = [&](const std::string& id, double logic, double memory, double power,
                 double wafer, double defects, double nre) {
    TechNode t;
    t.id = id;
    t.logic_area_scale = logic;
    t.memory_area_scale = memory;
    t.power_scale = power;
    t.wafer_cost = wafer;
    t.defect_density = defects;
    t.nre_design_cost = nre;
    cfg.techs[id] = t;
  };
  add("45nm", 1.0, 1.0, 1.0, 2274.0, 0.1, 37.7e6);
  add("14nm", 0.17, 0.22, 0.1917, 3984.0, 0.15, 106.0e6);
  add("10nm", 0.1, 0.21, 0.1669, 5992.0, 0.2, 174.0e6);
  add("7nm", 0.059, 0.17, 0.152, 9346.0, 0.3, 297.0e6);
  cfg.candidate_techs = {"7nm", "10nm", "14nm"};
  cfg.io_cells["default"] = {"default", 0.01, 10.0, 16, 0.25e-12};
  cfg.assembly = {0.5, 0.99, 0.005, 0.5};
  cfg.volume = 1e9;
  return cfg;
}

}  // namespace chiplet
