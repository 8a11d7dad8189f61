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
#include <optional>
#include <string>
#include <vector>

#include "chiplet/cost.h"
#include "chiplet/params.h"
#include "json.hpp"

namespace chiplet {

struct SequencePair
{
  std::vector<int> first;
  std::vector<int> second;

  bool operator==(const SequencePair&) const = default;
};

struct Rect
{
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;
};

struct Floorplan
{
  SequencePair sp;
  std::vector<double> widths;
  std::vector<double> heights;
  std::vector<double> xs;
  std::vector<double> ys;
  double package_w = 0.0;
  double package_h = 0.0;

  int size() const { return static_cast<int>(widths.size()); }
  Rect rect(int i) const { return {xs[i], ys[i], widths[i], heights[i]}; }
  bool operator==(const Floorplan&) const = default;
};

struct FPObjective
{
  double wl_reach = 0.0;
  double chip_area = 0.0;
  double package_area = 0.0;
  double alpha = 1.0;
  double beta = 1.0;
  double gamma = 1.0;

  double Value() const
  {
    return alpha * wl_reach + beta * chip_area + gamma * package_area;
  }
};

// Chiplet-level floorplanning instance.
struct FPProblem
{
  std::vector<double> areas;  // minimum area of every chiplet, mm^2
  std::vector<ChipletNet> nets;
  double separation = 0.0;
  FloorplanParams params;
};

enum class AnnealMode
{
  kStandard,
  kFast,
};

// IO wirelength of a net whose endpoint chiplets face each other across a
// gap `h` along an overlap of width `w`, with IO area `io_area` per side.
double FacingNetLength(double w, double h, double io_area);

// Wirelength between two placed chiplets.  Non-facing pairs use the
// Manhattan corner gap plus the IO depth of a zero-width facing edge.
double NetLength(const Rect& a, const Rect& b, double io_area);

// Sum of bits x overshoot over all nets; fills per-chiplet totals if given.
double ReachPenalty(const Floorplan& fp,
                    const std::vector<ChipletNet>& nets,
                    std::vector<double>* per_chiplet = nullptr);

// Longest-path placement of a sequence pair with `separation` between
// every constrained pair; fills xs, ys and the package bounding box.
void EvaluateSP(Floorplan& fp, double separation);

FPObjective Objective(const Floorplan& fp,
                      const std::vector<ChipletNet>& nets,
                      const FloorplanParams& params);

struct Violation
{
  enum class Kind
  {
    kReach,
    kOverlap,
    kSeparation,
    kShape,
  };
  Kind kind = Kind::kReach;
  int a = 0;
  int b = 0;
  double magnitude = 0.0;  // excess mm for reach, missing mm for spacing
};

struct FeasibilityReport
{
  bool feasible = true;
  double wl_reach = 0.0;
  std::vector<Violation> violations;
};

// Checks non-overlap, pairwise separation, reach, and (when `areas` is
// given) that every shape covers its chiplet's required area.
FeasibilityReport CheckFeasible(const Floorplan& fp,
                                const std::vector<ChipletNet>& nets,
                                double separation,
                                const std::vector<double>* areas = nullptr);

// Square shapes at the required areas, identity sequence pair, evaluated.
Floorplan InitialFloorplan(const FPProblem& problem);

struct AnnealResult
{
  Floorplan floorplan;
  FPObjective objective;
  int64_t moves = 0;
  int64_t accepted = 0;
  double initial_temp = 0.0;
};

// Go-with-the-winners simulated annealing.  Walker 0 starts from
// `warm_start` when given (its shapes must cover the required areas);
// the other walkers start from random sequence pairs and square shapes.
AnnealResult Anneal(const FPProblem& problem,
                    AnnealMode mode,
                    uint64_t seed,
                    const Floorplan* warm_start = nullptr,
                    int threads = 1);

// Runs the annealer with `perturbations` total moves and explicit
// temperature, bypassing the mode presets.  Used by tests and tooling.
AnnealResult AnnealWith(const FPProblem& problem,
                        const AnnealModeParams& mode,
                        uint64_t seed,
                        const Floorplan* warm_start = nullptr,
                        int threads = 1,
                        std::vector<double>* accepted_trace = nullptr);

nlohmann::json FloorplanToJson(const Floorplan& fp,
                               const std::vector<std::string>& names);

const char* ViolationKindName(Violation::Kind kind);

}  // namespace chiplet
