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

#include <array>
#include <cstdint>
#include <optional>

namespace chiplet {

// Hyperparameters for one annealing mode.  `perturbations` is the total
// number of moves shared by all walkers of a single invocation.
struct AnnealModeParams
{
  int64_t perturbations = 0;
  // nullopt: derive from probe moves (target uphill acceptance ~0.8).
  std::optional<double> initial_temp;
  double cooling_rate = 0.989;
};

struct FloorplanParams
{
  double alpha = 1.0;  // reach violation weight
  double beta = 1.0;   // total chiplet area weight
  double gamma = 1.0;  // package area weight
  int walkers = 10;
  AnnealModeParams standard{1'000'000, std::nullopt, 0.989};
  AnnealModeParams fast{10'000, 0.0, 0.989};
  // swap-first, swap-second, swap-both, reshape, bloat
  std::array<double, 5> move_probs{0.2, 0.2, 0.2, 0.2, 0.2};
  int temp_steps = 1000;
  int sync_divisions = 10;
  double winners_fraction = 0.2;
  double min_aspect = 0.25;
  double max_aspect = 4.0;
};

// Effort knobs of one CoreChipletPart invocation.
struct RefineBudget
{
  int fm_passes = 4;
  double fm_vertex_fraction = 0.5;
  int kl_passes = 4;
  double kl_vertex_fraction = 0.1;
  int pool_random = 5;
  int pool_mincut = 4;
};

struct PartitionParams
{
  RefineBudget full{};
  RefineBudget reduced{2, 0.25, 1, 0.1, 3, 2};
  int spectral_k = 4;
  int expansion_k = 4;
  int kmeans_restarts = 8;
  double mincut_imbalance = 0.05;
  // Added to the normalized objective of any plan with reach violations.
  double infeasible_penalty = 1.0;
};

struct GAConfig
{
  int tot_pop = 50;
  int k_pop = 45;
  int zeta = 3;
  int sigma = 5;
  int psi = 50;
  int epsilon = 10;
  double delta_threshold = 0.01;
  double p_c = 0.60;
  double p_m = 0.07;
  int K_max = 8;
};

}  // namespace chiplet
