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

#include "chiplet/floorplan.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "chiplet/error.h"
#include "chiplet/parallel.h"
#include "chiplet/rng.h"

namespace chiplet {

namespace {

constexpr double kGeomEps = 1e-9;

double Overlap(double a0, double a1, double b0, double b1)
{
  return std::min(a1, b1) - std::max(a0, b0);
}

double Gap(double a0, double a1, double b0, double b1)
{
  return std::max(b0 - a1, a0 - b1);
}

}  // namespace

double FacingNetLength(double w, double h, double io_area)
{
  const double depth = std::sqrt(w * w + 2.0 * io_area) - w;
  return h + 2.0 * depth;
}

double NetLength(const Rect& a, const Rect& b, double io_area)
{
  const double wx = Overlap(a.x, a.x + a.w, b.x, b.x + b.w);
  const double wy = Overlap(a.y, a.y + a.h, b.y, b.y + b.h);
  const double gx = std::max(0.0, Gap(a.x, a.x + a.w, b.x, b.x + b.w));
  const double gy = std::max(0.0, Gap(a.y, a.y + a.h, b.y, b.y + b.h));
  if (wx > 0.0 && wy > 0.0) {
    return FacingNetLength(std::max(wx, wy), 0.0, io_area);
  }
  if (wx > 0.0) {
    return FacingNetLength(wx, gy, io_area);
  }
  if (wy > 0.0) {
    return FacingNetLength(wy, gx, io_area);
  }
  return FacingNetLength(0.0, gx + gy, io_area);
}

double ReachPenalty(const Floorplan& fp,
                    const std::vector<ChipletNet>& nets,
                    std::vector<double>* per_chiplet)
{
  if (per_chiplet != nullptr) {
    per_chiplet->assign(fp.size(), 0.0);
  }
  double total = 0.0;
  for (const auto& net : nets) {
    const double length = NetLength(fp.rect(net.a), fp.rect(net.b), net.io_area);
    if (length > net.reach) {
      const double p = static_cast<double>(net.bits) * (length - net.reach);
      total += p;
      if (per_chiplet != nullptr) {
        (*per_chiplet)[net.a] += p;
        (*per_chiplet)[net.b] += p;
      }
    }
  }
  return total;
}

void EvaluateSP(Floorplan& fp, double separation)
{
  const int n = fp.size();
  std::vector<int> pos1(n), pos2(n);
  for (int i = 0; i < n; ++i) {
    pos1[fp.sp.first[i]] = i;
    pos2[fp.sp.second[i]] = i;
  }
  fp.xs.assign(n, 0.0);
  fp.ys.assign(n, 0.0);
  // i is left of j iff i precedes j in both sequences.
  for (int a = 0; a < n; ++a) {
    const int j = fp.sp.first[a];
    double x = 0.0;
    for (int b = 0; b < a; ++b) {
      const int i = fp.sp.first[b];
      if (pos2[i] < pos2[j]) {
        x = std::max(x, fp.xs[i] + fp.widths[i] + separation);
      }
    }
    fp.xs[j] = x;
  }
  // i is below j iff i follows j in first and precedes j in second.
  for (int a = 0; a < n; ++a) {
    const int j = fp.sp.second[a];
    double y = 0.0;
    for (int b = 0; b < a; ++b) {
      const int i = fp.sp.second[b];
      if (pos1[i] > pos1[j]) {
        y = std::max(y, fp.ys[i] + fp.heights[i] + separation);
      }
    }
    fp.ys[j] = y;
  }
  fp.package_w = 0.0;
  fp.package_h = 0.0;
  for (int i = 0; i < n; ++i) {
    fp.package_w = std::max(fp.package_w, fp.xs[i] + fp.widths[i]);
    fp.package_h = std::max(fp.package_h, fp.ys[i] + fp.heights[i]);
  }
}

FPObjective Objective(const Floorplan& fp,
                      const std::vector<ChipletNet>& nets,
                      const FloorplanParams& params)
{
  FPObjective obj;
  obj.alpha = params.alpha;
  obj.beta = params.beta;
  obj.gamma = params.gamma;
  obj.wl_reach = ReachPenalty(fp, nets);
  for (int i = 0; i < fp.size(); ++i) {
    obj.chip_area += fp.widths[i] * fp.heights[i];
  }
  obj.package_area = fp.package_w * fp.package_h;
  return obj;
}

FeasibilityReport CheckFeasible(const Floorplan& fp,
                                const std::vector<ChipletNet>& nets,
                                double separation,
                                const std::vector<double>* areas)
{
  FeasibilityReport report;
  const int n = fp.size();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const Rect a = fp.rect(i);
      const Rect b = fp.rect(j);
      const double gx = Gap(a.x, a.x + a.w, b.x, b.x + b.w);
      const double gy = Gap(a.y, a.y + a.h, b.y, b.y + b.h);
      const double gap = std::max(gx, gy);
      if (gap < -kGeomEps) {
        report.violations.push_back(
            {Violation::Kind::kOverlap, i, j, std::min(-gx, -gy)});
      } else if (gap < separation - kGeomEps) {
        report.violations.push_back(
            {Violation::Kind::kSeparation, i, j, separation - gap});
      }
    }
  }
  for (const auto& net : nets) {
    const double length = NetLength(fp.rect(net.a), fp.rect(net.b), net.io_area);
    if (length > net.reach) {
      report.violations.push_back(
          {Violation::Kind::kReach, net.a, net.b, length - net.reach});
    }
  }
  if (areas != nullptr) {
    for (int i = 0; i < n; ++i) {
      const double need = (*areas)[i];
      if (fp.widths[i] * fp.heights[i] < need * (1.0 - 1e-9)) {
        report.violations.push_back(
            {Violation::Kind::kShape, i, i, need - fp.widths[i] * fp.heights[i]});
      }
    }
  }
  report.wl_reach = ReachPenalty(fp, nets);
  report.feasible = report.violations.empty();
  return report;
}

Floorplan InitialFloorplan(const FPProblem& problem)
{
  const int n = static_cast<int>(problem.areas.size());
  Floorplan fp;
  fp.sp.first.resize(n);
  std::iota(fp.sp.first.begin(), fp.sp.first.end(), 0);
  fp.sp.second = fp.sp.first;
  for (double a : problem.areas) {
    fp.widths.push_back(std::sqrt(a));
    fp.heights.push_back(std::sqrt(a));
  }
  EvaluateSP(fp, problem.separation);
  return fp;
}

namespace {

struct WalkerState
{
  Floorplan fp;
  FPObjective obj;
  double value = 0.0;
  std::vector<double> penalty;
};

class Annealer
{
 public:
  explicit Annealer(const FPProblem& problem) : problem_(problem) {}

  void Evaluate(WalkerState& s) const
  {
    EvaluateSP(s.fp, problem_.separation);
    s.obj = Objective(s.fp, problem_.nets, problem_.params);
    ReachPenalty(s.fp, problem_.nets, &s.penalty);
    s.value = s.obj.Value();
  }

  // Applies one random move to `s` in place.  Returns false for a no-op.
  bool Perturb(WalkerState& s, Rng& rng) const
  {
    const auto& probs = problem_.params.move_probs;
    double u = Uniform01(rng);
    int op = 4;
    while (op > 0 && probs[op] <= 0.0) {
      --op;
    }
    for (int k = 0; k < 5; ++k) {
      if (u < probs[k]) {
        op = k;
        break;
      }
      u -= probs[k];
    }
    switch (op) {
      case 0:
        return SwapIn(s.fp.sp.first, rng);
      case 1:
        return SwapIn(s.fp.sp.second, rng);
      case 2:
        return SwapBoth(s.fp.sp, rng);
      case 3:
        return Reshape(s, rng);
      default:
        return Bloat(s);
    }
  }

 private:
  static bool SwapIn(std::vector<int>& seq, Rng& rng)
  {
    const int n = static_cast<int>(seq.size());
    if (n < 2) {
      return false;
    }
    const int i = UniformInt(rng, 0, n - 1);
    int j = UniformInt(rng, 0, n - 2);
    if (j >= i) {
      ++j;
    }
    std::swap(seq[i], seq[j]);
    return true;
  }

  static bool SwapBoth(SequencePair& sp, Rng& rng)
  {
    const int n = static_cast<int>(sp.first.size());
    if (n < 2) {
      return false;
    }
    const int a = UniformInt(rng, 0, n - 1);
    int b = UniformInt(rng, 0, n - 2);
    if (b >= a) {
      ++b;
    }
    for (auto* seq : {&sp.first, &sp.second}) {
      auto ia = std::find(seq->begin(), seq->end(), a);
      auto ib = std::find(seq->begin(), seq->end(), b);
      std::iter_swap(ia, ib);
    }
    return true;
  }

  static int Victim(const WalkerState& s)
  {
    int victim = -1;
    double worst = 0.0;
    for (int i = 0; i < s.fp.size(); ++i) {
      if (s.penalty[i] > worst) {
        worst = s.penalty[i];
        victim = i;
      }
    }
    return victim;
  }

  void SetShape(Floorplan& fp, int v, double w, double area) const
  {
    const FloorplanParams& p = problem_.params;
    w = std::clamp(w, std::sqrt(area * p.min_aspect), std::sqrt(area * p.max_aspect));
    fp.widths[v] = w;
    fp.heights[v] = area / w;
  }

  // Re-aspects the victim so one of its edges lines up with a boundary of
  // another chiplet, keeping its area.
  bool Reshape(WalkerState& s, Rng& rng) const
  {
    Floorplan& fp = s.fp;
    const int n = fp.size();
    int v = Victim(s);
    if (v < 0) {
      v = UniformInt(rng, 0, n - 1);
    }
    const double area = fp.widths[v] * fp.heights[v];
    std::vector<double> widths;
    for (int j = 0; j < n; ++j) {
      if (j == v) {
        continue;
      }
      for (double edge : {fp.xs[j], fp.xs[j] + fp.widths[j]}) {
        const double w = edge - fp.xs[v];
        if (w > kGeomEps && std::abs(w - fp.widths[v]) > kGeomEps) {
          widths.push_back(w);
        }
      }
      for (double edge : {fp.ys[j], fp.ys[j] + fp.heights[j]}) {
        const double h = edge - fp.ys[v];
        if (h > kGeomEps && std::abs(h - fp.heights[v]) > kGeomEps) {
          widths.push_back(area / h);
        }
      }
    }
    double w;
    if (widths.empty()) {
      const FloorplanParams& p = problem_.params;
      const double lo = std::log(p.min_aspect);
      const double hi = std::log(p.max_aspect);
      w = std::sqrt(area * std::exp(lo + (hi - lo) * Uniform01(rng)));
    } else {
      w = widths[UniformInt(rng, 0, static_cast<int>(widths.size()) - 1)];
    }
    SetShape(fp, v, w, area);
    return true;
  }

  // Free distance from the victim's right (or top) edge to the nearest
  // blocking chiplet, less the separation, or to the package boundary.
  double Whitespace(const Floorplan& fp, int v, bool horizontal) const
  {
    const Rect r = fp.rect(v);
    double limit = horizontal ? fp.package_w : fp.package_h;
    for (int j = 0; j < fp.size(); ++j) {
      if (j == v) {
        continue;
      }
      const Rect o = fp.rect(j);
      if (horizontal) {
        if (Overlap(r.y, r.y + r.h, o.y, o.y + o.h) > 0.0
            && o.x >= r.x + r.w - kGeomEps) {
          limit = std::min(limit, o.x - problem_.separation);
        }
      } else if (Overlap(r.x, r.x + r.w, o.x, o.x + o.w) > 0.0
                 && o.y >= r.y + r.h - kGeomEps) {
        limit = std::min(limit, o.y - problem_.separation);
      }
    }
    return limit - (horizontal ? r.x + r.w : r.y + r.h);
  }

  // Grows the victim toward the partner of its worst violating net by the
  // overshoot of that net, capped by whitespace and the aspect bound.
  bool Bloat(WalkerState& s) const
  {
    Floorplan& fp = s.fp;
    const int v = Victim(s);
    if (v < 0) {
      return false;
    }
    const ChipletNet* worst = nullptr;
    double worst_penalty = 0.0;
    double excess = 0.0;
    for (const auto& net : problem_.nets) {
      if (net.a != v && net.b != v) {
        continue;
      }
      const double length
          = NetLength(fp.rect(net.a), fp.rect(net.b), net.io_area);
      const double p = static_cast<double>(net.bits) * (length - net.reach);
      if (length > net.reach && p > worst_penalty) {
        worst_penalty = p;
        worst = &net;
        excess = length - net.reach;
      }
    }
    if (worst == nullptr) {
      return false;
    }
    const Rect r = fp.rect(v);
    const Rect o = fp.rect(worst->a == v ? worst->b : worst->a);
    bool horizontal;
    if (o.x >= r.x + r.w - kGeomEps) {
      horizontal = true;
    } else if (o.y >= r.y + r.h - kGeomEps) {
      horizontal = false;
    } else {
      // Partner lies left or below: widen the facing span instead.
      horizontal = !(o.x + o.w <= r.x + kGeomEps);
    }
    const FloorplanParams& p = problem_.params;
    double grow = std::min(excess, Whitespace(fp, v, horizontal));
    if (horizontal) {
      grow = std::min(grow, p.max_aspect * r.h - r.w);
    } else {
      grow = std::min(grow, r.w / p.min_aspect - r.h);
    }
    if (grow <= kGeomEps) {
      return false;
    }
    if (horizontal) {
      fp.widths[v] += grow;
    } else {
      fp.heights[v] += grow;
    }
    return true;
  }

  const FPProblem& problem_;
};

struct Walker
{
  WalkerState cur;
  WalkerState best;
  Rng rng;
  double temp = 0.0;
  int64_t steps = 0;
  int64_t accepted = 0;
};

}  // namespace

AnnealResult AnnealWith(const FPProblem& problem,
                        const AnnealModeParams& mode,
                        uint64_t seed,
                        const Floorplan* warm_start,
                        int threads,
                        std::vector<double>* accepted_trace)
{
  const int n = static_cast<int>(problem.areas.size());
  if (n < 1) {
    throw Error(ErrorKind::kInvalidArgument, "floorplan needs >= 1 chiplet");
  }
  const FloorplanParams& params = problem.params;
  const Annealer annealer(problem);
  const int num_walkers = std::max(1, params.walkers);

  std::vector<Walker> walkers(num_walkers);
  for (int w = 0; w < num_walkers; ++w) {
    Walker& walker = walkers[w];
    walker.rng.seed(DeriveSeed(seed, static_cast<uint64_t>(w)));
    WalkerState& s = walker.cur;
    if (w == 0 && warm_start != nullptr) {
      if (warm_start->size() != n) {
        throw Error(ErrorKind::kInvalidArgument,
                    "warm start floorplan has the wrong chiplet count");
      }
      s.fp = *warm_start;
    } else {
      s.fp = InitialFloorplan(problem);
      if (w > 0) {
        std::shuffle(s.fp.sp.first.begin(), s.fp.sp.first.end(), walker.rng);
        std::shuffle(s.fp.sp.second.begin(), s.fp.sp.second.end(), walker.rng);
      }
    }
    annealer.Evaluate(s);
    walker.best = s;
  }

  double t0 = 0.0;
  if (mode.initial_temp) {
    t0 = *mode.initial_temp;
  } else {
    Rng probe(DeriveSeed(seed, 0x70726f6265ULL));
    double uphill = 0.0;
    int count = 0;
    for (int k = 0; k < 100; ++k) {
      WalkerState trial = walkers[0].cur;
      if (!annealer.Perturb(trial, probe)) {
        continue;
      }
      annealer.Evaluate(trial);
      const double delta = trial.value - walkers[0].cur.value;
      if (delta > 0.0) {
        uphill += delta;
        ++count;
      }
    }
    if (count > 0) {
      t0 = -(uphill / count) / std::log(0.8);
    }
  }
  for (auto& walker : walkers) {
    walker.temp = t0;
  }

  const int64_t per_walker = std::max<int64_t>(1, mode.perturbations / num_walkers);
  const int64_t cool_every = std::max<int64_t>(1, per_walker / params.temp_steps);
  const int64_t sync_every
      = std::max<int64_t>(1, per_walker / params.sync_divisions);

  auto run_segment = [&](int w, int64_t moves) {
    Walker& walker = walkers[w];
    WalkerState trial;
    for (int64_t m = 0; m < moves; ++m) {
      trial = walker.cur;
      if (annealer.Perturb(trial, walker.rng)) {
        annealer.Evaluate(trial);
        const double delta = trial.value - walker.cur.value;
        bool accept = delta <= 0.0;
        if (!accept && walker.temp > 0.0) {
          accept = Uniform01(walker.rng) < std::exp(-delta / walker.temp);
        }
        if (accept) {
          std::swap(walker.cur, trial);
          ++walker.accepted;
          if (walker.cur.value < walker.best.value) {
            walker.best = walker.cur;
          }
        }
      }
      if (w == 0 && accepted_trace != nullptr) {
        accepted_trace->push_back(walker.cur.value);
      }
      ++walker.steps;
      if (walker.steps % cool_every == 0) {
        walker.temp *= mode.cooling_rate;
      }
    }
  };

  int64_t done = 0;
  while (done < per_walker) {
    const int64_t moves = std::min(sync_every, per_walker - done);
    ParallelFor(num_walkers, threads, [&](int w) { run_segment(w, moves); });
    done += moves;
    if (num_walkers > 1 && done < per_walker) {
      std::vector<int> order(num_walkers);
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return walkers[a].cur.value < walkers[b].cur.value;
      });
      const int winners = std::max(
          1, static_cast<int>(std::floor(num_walkers * params.winners_fraction)));
      for (int k = winners; k < num_walkers; ++k) {
        walkers[order[k]].cur = walkers[order[(k - winners) % winners]].cur;
      }
      if (accepted_trace != nullptr) {
        accepted_trace->push_back(walkers[0].cur.value);
      }
    }
  }

  AnnealResult result;
  int best = 0;
  for (int w = 0; w < num_walkers; ++w) {
    result.moves += walkers[w].steps;
    result.accepted += walkers[w].accepted;
    if (walkers[w].best.value < walkers[best].best.value) {
      best = w;
    }
  }
  result.floorplan = walkers[best].best.fp;
  result.objective = walkers[best].best.obj;
  result.initial_temp = t0;
  return result;
}

AnnealResult Anneal(const FPProblem& problem,
                    AnnealMode mode,
                    uint64_t seed,
                    const Floorplan* warm_start,
                    int threads)
{
  const AnnealModeParams& preset = mode == AnnealMode::kStandard
                                       ? problem.params.standard
                                       : problem.params.fast;
  return AnnealWith(problem, preset, seed, warm_start, threads);
}

const char* ViolationKindName(Violation::Kind kind)
{
  switch (kind) {
    case Violation::Kind::kReach:
      return "reach";
    case Violation::Kind::kOverlap:
      return "overlap";
    case Violation::Kind::kSeparation:
      return "separation";
    case Violation::Kind::kShape:
      return "shape";
  }
  return "unknown";
}

nlohmann::json FloorplanToJson(const Floorplan& fp,
                               const std::vector<std::string>& names)
{
  nlohmann::json chiplets = nlohmann::json::array();
  for (int i = 0; i < fp.size(); ++i) {
    chiplets.push_back({{"id", i < static_cast<int>(names.size())
                                   ? names[i]
                                   : std::to_string(i)},
                        {"x", fp.xs[i]},
                        {"y", fp.ys[i]},
                        {"width", fp.widths[i]},
                        {"height", fp.heights[i]}});
  }
  return nlohmann::json{
      {"schema_version", kSchemaVersion},
      {"package", {{"width", fp.package_w}, {"height", fp.package_h}}},
      {"sequence_pair", {{"first", fp.sp.first}, {"second", fp.sp.second}}},
      {"chiplets", std::move(chiplets)}};
}

}  // namespace chiplet
