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
#include <string>

#include "chiplet/model.h"

namespace chiplet {

// Per-tile structure of a waferscale-style design.  Base areas (mm^2) and
// powers (W) are for the reference tech before scaling; they are
// calibration defaults, not measured data.
struct TileSpec
{
  int cores = 14;
  int shared_mems = 4;
  bool has_router = true;
  bool has_crossbar = true;

  double core_area = 0.025;
  double bus_area = 0.004;
  double private_mem_area = 0.012;
  double shared_mem_area = 0.07;
  double crossbar_area = 0.1;
  double router_area = 0.035;

  double core_power = 0.01;
  double bus_power = 0.002;
  double private_mem_power = 0.003;
  double shared_mem_power = 0.01;
  double crossbar_power = 0.03;
  double router_power = 0.015;

  // base bit widths
  int64_t core_bus_bits = 64;
  int64_t bus_mem_bits = 64;
  int64_t bus_xbar_bits = 32;
  int64_t xbar_mem_bits = 64;
  int64_t xbar_router_bits = 128;
  int64_t mesh_bits = 128;

  double area_scaling = 1600.0;
  double power_scaling = 1600.0;
  double rent_k = 4.0;
  double rent_p_logic = 0.45;
  double rent_p_memory = 0.12;

  std::string reference_tech = "45nm";
  std::string reach_class = "default";
};

struct GridSpec
{
  int tiles = 1;
  // 0 picks the most square factorization of `tiles`.
  int rows = 0;
  int cols = 0;
};

// round(k * C^p)
int64_t RentTerminals(double components, double k, double p);

// Bit width scaled from `base` as the block grows by `scaling` per Rent.
int64_t RentScaledBits(int64_t base, double scaling, double k, double p);

Netlist GenWaferscale(const GridSpec& grid, const TileSpec& tile);

// MemPool-style cluster: 16 tiles, 16 remote interconnects, 4 local
// crossbars and 4 AXI ports (40 blocks).
Netlist GenMemPool(double area_scaling = 100.0,
                   const std::string& reference_tech = "45nm",
                   const std::string& reach_class = "default");

// Default technology, IO and assembly table (labeled defaults).
SystemConfig DefaultConfig();

}  // namespace chiplet
