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

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "chiplet/error.h"
#include "chiplet/partition.h"
#include "chiplet/rng.h"

namespace chiplet {

double BlockGraph::WeightedDegree(int v) const
{
  double d = 0.0;
  for (const auto& [u, w] : adj[v]) {
    d += w;
  }
  return d;
}

double BlockGraph::CutWeight(const std::vector<int>& labels) const
{
  double cut = 0.0;
  for (int v = 0; v < n; ++v) {
    for (const auto& [u, w] : adj[v]) {
      if (u > v && labels[u] != labels[v]) {
        cut += w;
      }
    }
  }
  return cut;
}

BlockGraph BuildBlockGraph(const Netlist& netlist)
{
  BlockGraph g;
  g.n = static_cast<int>(netlist.blocks.size());
  g.adj.resize(g.n);
  std::map<std::string, int> index;
  for (int i = 0; i < g.n; ++i) {
    index[netlist.blocks[i].id] = i;
    g.vertex_weight.push_back(netlist.blocks[i].area);
  }
  std::map<std::pair<int, int>, double> weights;
  for (const auto& net : netlist.nets) {
    int a = index.at(net.source);
    int b = index.at(net.sink);
    weights[{std::min(a, b), std::max(a, b)}] += static_cast<double>(net.bandwidth);
  }
  for (const auto& [key, w] : weights) {
    g.adj[key.first].push_back({key.second, w});
    g.adj[key.second].push_back({key.first, w});
  }
  for (auto& list : g.adj) {
    std::sort(list.begin(), list.end());
  }
  return g;
}

namespace {

std::vector<std::vector<int>> Components(const BlockGraph& g)
{
  std::vector<int> comp(g.n, -1);
  std::vector<std::vector<int>> out;
  for (int s = 0; s < g.n; ++s) {
    if (comp[s] >= 0) {
      continue;
    }
    std::vector<int> members{s};
    comp[s] = static_cast<int>(out.size());
    for (size_t h = 0; h < members.size(); ++h) {
      for (const auto& [u, w] : g.adj[members[h]]) {
        if (comp[u] < 0) {
          comp[u] = comp[s];
          members.push_back(u);
        }
      }
    }
    std::sort(members.begin(), members.end());
    out.push_back(std::move(members));
  }
  return out;
}

using Points = std::vector<std::array<double, 2>>;

double Dist2(const std::array<double, 2>& a, const std::array<double, 2>& b)
{
  const double dx = a[0] - b[0];
  const double dy = a[1] - b[1];
  return dx * dx + dy * dy;
}

// Lloyd iterations from K-means++ seeds; returns labels and inertia.
std::pair<std::vector<int>, double> KMeansOnce(const Points& pts, int k, Rng& rng)
{
  const int n = static_cast<int>(pts.size());
  std::vector<std::array<double, 2>> centers;
  centers.push_back(pts[UniformInt(rng, 0, n - 1)]);
  std::vector<double> d2(n);
  while (static_cast<int>(centers.size()) < k) {
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      d2[i] = std::numeric_limits<double>::infinity();
      for (const auto& c : centers) {
        d2[i] = std::min(d2[i], Dist2(pts[i], c));
      }
      total += d2[i];
    }
    int pick = 0;
    if (total > 0.0) {
      double r = Uniform01(rng) * total;
      for (pick = 0; pick < n - 1; ++pick) {
        r -= d2[pick];
        if (r < 0.0) {
          break;
        }
      }
    } else {
      pick = UniformInt(rng, 0, n - 1);
    }
    centers.push_back(pts[pick]);
  }
  std::vector<int> labels(n, -1);
  for (int iter = 0; iter < 100; ++iter) {
    bool changed = false;
    for (int i = 0; i < n; ++i) {
      int best = 0;
      for (int c = 1; c < k; ++c) {
        if (Dist2(pts[i], centers[c]) < Dist2(pts[i], centers[best])) {
          best = c;
        }
      }
      if (labels[i] != best) {
        labels[i] = best;
        changed = true;
      }
    }
    if (!changed) {
      break;
    }
    std::vector<std::array<double, 2>> sums(k, {0.0, 0.0});
    std::vector<int> counts(k, 0);
    for (int i = 0; i < n; ++i) {
      sums[labels[i]][0] += pts[i][0];
      sums[labels[i]][1] += pts[i][1];
      ++counts[labels[i]];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) {
        centers[c] = {sums[c][0] / counts[c], sums[c][1] / counts[c]};
      }
    }
  }
  double inertia = 0.0;
  for (int i = 0; i < n; ++i) {
    inertia += Dist2(pts[i], centers[labels[i]]);
  }
  return {labels, inertia};
}

// Spectral labels in [0, k) for the connected vertex set `members`.
std::vector<int> SpectralComponent(const BlockGraph& g,
                                   const std::vector<int>& members,
                                   int k,
                                   Rng& rng,
                                   int restarts)
{
  const int m = static_cast<int>(members.size());
  if (k <= 1) {
    return std::vector<int>(m, 0);
  }
  if (m <= k) {
    std::vector<int> labels(m);
    std::iota(labels.begin(), labels.end(), 0);
    return labels;
  }
  std::vector<int> local(g.n, -1);
  for (int i = 0; i < m; ++i) {
    local[members[i]] = i;
  }
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    for (const auto& [u, w] : g.adj[members[i]]) {
      const int j = local[u];
      lap(i, j) -= w;
      lap(i, i) += w;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(lap);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::kInvalidArgument, "Laplacian eigensolver failed");
  }
  const Eigen::MatrixXd& vecs = solver.eigenvectors();
  Points pts(m);
  for (int i = 0; i < m; ++i) {
    pts[i] = {vecs(i, 1), m > 2 ? vecs(i, 2) : 0.0};
  }
  std::vector<int> best_labels;
  double best_inertia = std::numeric_limits<double>::infinity();
  for (int r = 0; r < std::max(1, restarts); ++r) {
    auto [labels, inertia] = KMeansOnce(pts, k, rng);
    if (inertia < best_inertia) {
      best_inertia = inertia;
      best_labels = std::move(labels);
    }
  }
  return best_labels;
}

}  // namespace

Partition SpectralInit(const BlockGraph& graph, int k, uint64_t seed, int restarts)
{
  if (k < 1 || graph.n < 1) {
    throw Error(ErrorKind::kInvalidArgument, "spectral init needs k >= 1");
  }
  k = std::min(k, graph.n);
  Rng rng(seed);
  Partition p;
  p.assignment.assign(graph.n, 0);
  p.num_chiplets = k;
  const auto comps = Components(graph);
  const int nc = static_cast<int>(comps.size());
  if (nc >= k) {
    // Bin-pack whole components, largest first, into the lightest bin.
    std::vector<int> order(nc);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return comps[a].size() > comps[b].size();
    });
    std::vector<size_t> load(k, 0);
    for (int c : order) {
      const int bin = static_cast<int>(
          std::min_element(load.begin(), load.end()) - load.begin());
      load[bin] += comps[c].size();
      for (int v : comps[c]) {
        p.assignment[v] = bin;
      }
    }
  } else {
    // Every component gets at least one cluster; the rest are shared in
    // proportion to component size (largest remainder).
    std::vector<int> share(nc, 1);
    int left = k - nc;
    std::vector<double> rem(nc);
    int assigned = 0;
    for (int c = 0; c < nc; ++c) {
      const double exact
          = static_cast<double>(left) * comps[c].size() / graph.n;
      const int whole = static_cast<int>(std::floor(exact));
      share[c] += whole;
      assigned += whole;
      rem[c] = exact - whole;
    }
    std::vector<int> order(nc);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return rem[a] > rem[b]; });
    for (int i = 0; assigned < left; ++i, ++assigned) {
      ++share[order[i % nc]];
    }
    int offset = 0;
    for (int c = 0; c < nc; ++c) {
      const int kc = std::min<int>(share[c], comps[c].size());
      auto labels = SpectralComponent(graph, comps[c], kc, rng, restarts);
      for (size_t i = 0; i < comps[c].size(); ++i) {
        p.assignment[comps[c][i]] = offset + labels[i];
      }
      offset += kc;
    }
    p.num_chiplets = offset;
  }
  Compact(p);
  return p;
}

Partition NodeExpansionInit(const BlockGraph& graph, int k)
{
  if (k < 1 || graph.n < 1) {
    throw Error(ErrorKind::kInvalidArgument, "node expansion needs k >= 1");
  }
  k = std::min(k, graph.n);
  std::vector<int> order(graph.n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> degree(graph.n);
  for (int v = 0; v < graph.n; ++v) {
    degree[v] = graph.WeightedDegree(v);
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return degree[a] > degree[b]; });
  std::vector<int> label(graph.n, -1);
  std::vector<int> frontier;
  for (int c = 0; c < k; ++c) {
    label[order[c]] = c;
    frontier.push_back(order[c]);
  }
  while (!frontier.empty()) {
    std::vector<int> next;
    for (int v : frontier) {
      for (const auto& [u, w] : graph.adj[v]) {
        if (label[u] < 0) {
          next.push_back(u);
        }
      }
    }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    std::vector<int> choice(next.size());
    for (size_t i = 0; i < next.size(); ++i) {
      std::vector<double> strength(k, 0.0);
      for (const auto& [u, w] : graph.adj[next[i]]) {
        if (label[u] >= 0) {
          strength[label[u]] += w;
        }
      }
      choice[i] = static_cast<int>(
          std::max_element(strength.begin(), strength.end()) - strength.begin());
    }
    for (size_t i = 0; i < next.size(); ++i) {
      label[next[i]] = choice[i];
    }
    frontier = std::move(next);
  }
  // Blocks unreachable from every seed go to the lightest chiplet.
  std::vector<double> area(k, 0.0);
  for (int v = 0; v < graph.n; ++v) {
    if (label[v] >= 0) {
      area[label[v]] += graph.vertex_weight[v];
    }
  }
  for (int v = 0; v < graph.n; ++v) {
    if (label[v] < 0) {
      label[v] = static_cast<int>(std::min_element(area.begin(), area.end())
                                  - area.begin());
      area[label[v]] += graph.vertex_weight[v];
    }
  }
  Partition p{label, k};
  Compact(p);
  return p;
}

Partition RandomInit(int num_blocks, int k, uint64_t seed)
{
  if (k < 1 || num_blocks < 1) {
    throw Error(ErrorKind::kInvalidArgument, "random init needs k >= 1");
  }
  k = std::min(k, num_blocks);
  Rng rng(seed);
  Partition p;
  p.num_chiplets = k;
  p.assignment.resize(num_blocks);
  std::vector<std::vector<int>> members(k);
  for (int b = 0; b < num_blocks; ++b) {
    p.assignment[b] = UniformInt(rng, 0, k - 1);
    members[p.assignment[b]].push_back(b);
  }
  for (int c = 0; c < k; ++c) {
    if (!members[c].empty()) {
      continue;
    }
    int donor = 0;
    for (int d = 1; d < k; ++d) {
      if (members[d].size() > members[donor].size()) {
        donor = d;
      }
    }
    const int pick = UniformInt(rng, 0, static_cast<int>(members[donor].size()) - 1);
    const int b = members[donor][pick];
    members[donor].erase(members[donor].begin() + pick);
    members[c].push_back(b);
    p.assignment[b] = c;
  }
  return p;
}

namespace {

struct WGraph
{
  std::vector<std::vector<std::pair<int, double>>> adj;
  std::vector<double> vw;

  int size() const { return static_cast<int>(vw.size()); }
};

WGraph Induced(const BlockGraph& g, const std::vector<int>& members)
{
  std::vector<int> local(g.n, -1);
  for (size_t i = 0; i < members.size(); ++i) {
    local[members[i]] = static_cast<int>(i);
  }
  WGraph w;
  w.adj.resize(members.size());
  for (size_t i = 0; i < members.size(); ++i) {
    w.vw.push_back(g.vertex_weight[members[i]]);
    for (const auto& [u, wt] : g.adj[members[i]]) {
      if (local[u] >= 0) {
        w.adj[i].push_back({local[u], wt});
      }
    }
  }
  return w;
}

// Heavy-edge matching; fills `map` (fine -> coarse) and returns the
// coarse graph.
WGraph Coarsen(const WGraph& g, Rng& rng, std::vector<int>& map)
{
  const int n = g.size();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<int> mate(n, -1);
  for (int v : order) {
    if (mate[v] >= 0) {
      continue;
    }
    int best = -1;
    double best_w = 0.0;
    for (const auto& [u, w] : g.adj[v]) {
      if (u != v && mate[u] < 0 && (w > best_w || (w == best_w && u < best))) {
        best = u;
        best_w = w;
      }
    }
    mate[v] = best >= 0 ? best : v;
    if (best >= 0) {
      mate[best] = v;
    }
  }
  map.assign(n, -1);
  int nc = 0;
  for (int v = 0; v < n; ++v) {
    if (map[v] < 0) {
      map[v] = nc;
      map[mate[v]] = nc;
      ++nc;
    }
  }
  WGraph c;
  c.vw.assign(nc, 0.0);
  c.adj.resize(nc);
  std::vector<std::map<int, double>> acc(nc);
  for (int v = 0; v < n; ++v) {
    c.vw[map[v]] += g.vw[v];
    for (const auto& [u, w] : g.adj[v]) {
      if (map[u] != map[v]) {
        acc[map[v]][map[u]] += w;
      }
    }
  }
  for (int v = 0; v < nc; ++v) {
    for (const auto& [u, w] : acc[v]) {
      c.adj[v].push_back({u, w});
    }
  }
  return c;
}

double Cut(const WGraph& g, const std::vector<int>& side)
{
  double cut = 0.0;
  for (int v = 0; v < g.size(); ++v) {
    for (const auto& [u, w] : g.adj[v]) {
      if (u > v && side[u] != side[v]) {
        cut += w;
      }
    }
  }
  return cut;
}

struct Balance
{
  double max0 = 0.0;
  double max1 = 0.0;
};

bool Fits(const std::array<double, 2>& load, const Balance& bal)
{
  return load[0] <= bal.max0 + 1e-9 && load[1] <= bal.max1 + 1e-9;
}

// Two-way FM passes with best-prefix rollback under the balance bounds.
void TwoWayFm(const WGraph& g, std::vector<int>& side, const Balance& bal)
{
  const int n = g.size();
  for (int pass = 0; pass < 8; ++pass) {
    std::array<double, 2> load{0.0, 0.0};
    for (int v = 0; v < n; ++v) {
      load[side[v]] += g.vw[v];
    }
    std::vector<double> gain(n, 0.0);
    for (int v = 0; v < n; ++v) {
      for (const auto& [u, w] : g.adj[v]) {
        gain[v] += side[u] != side[v] ? w : -w;
      }
    }
    std::vector<bool> locked(n, false);
    std::vector<int> moves;
    double running = 0.0;
    double best = 0.0;
    size_t best_len = 0;
    for (int step = 0; step < n; ++step) {
      int pick = -1;
      for (int v = 0; v < n; ++v) {
        if (locked[v]) {
          continue;
        }
        std::array<double, 2> after = load;
        after[side[v]] -= g.vw[v];
        after[1 - side[v]] += g.vw[v];
        const bool relieves = side[v] == 0 ? load[0] > bal.max0 : load[1] > bal.max1;
        if (!Fits(after, bal) && !relieves) {
          continue;
        }
        if (pick < 0 || gain[v] > gain[pick]) {
          pick = v;
        }
      }
      if (pick < 0) {
        break;
      }
      running += gain[pick];
      load[side[pick]] -= g.vw[pick];
      side[pick] = 1 - side[pick];
      load[side[pick]] += g.vw[pick];
      locked[pick] = true;
      moves.push_back(pick);
      gain[pick] = -gain[pick];
      for (const auto& [u, w] : g.adj[pick]) {
        gain[u] += side[u] == side[pick] ? -2.0 * w : 2.0 * w;
      }
      if (running > best + 1e-12 && Fits(load, bal)) {
        best = running;
        best_len = moves.size();
      }
    }
    for (size_t i = moves.size(); i > best_len; --i) {
      side[moves[i - 1]] = 1 - side[moves[i - 1]];
    }
    if (best_len == 0) {
      break;
    }
  }
}

// Greedy graph growing from a random seed until side 1 reaches `target`.
std::vector<int> GrowBisection(const WGraph& g, double target, Rng& rng)
{
  const int n = g.size();
  std::vector<int> side(n, 0);
  double grown = 0.0;
  std::vector<double> conn(n, 0.0);
  int seed = UniformInt(rng, 0, n - 1);
  while (grown < target) {
    int pick = -1;
    if (seed >= 0) {
      pick = seed;
      seed = -1;
    } else {
      for (int v = 0; v < n; ++v) {
        if (side[v] == 0 && (pick < 0 || conn[v] > conn[pick])) {
          pick = v;
        }
      }
    }
    if (pick < 0 || grown + g.vw[pick] > target + 0.5 * g.vw[pick]) {
      break;
    }
    side[pick] = 1;
    grown += g.vw[pick];
    for (const auto& [u, w] : g.adj[pick]) {
      conn[u] += w;
    }
  }
  return side;
}

std::vector<int> Bisect(const WGraph& g, double frac1, double imbalance, Rng& rng)
{
  const int n = g.size();
  double total = 0.0;
  double heaviest = 0.0;
  for (double w : g.vw) {
    total += w;
    heaviest = std::max(heaviest, w);
  }
  const double slack = std::max(imbalance * total, heaviest);
  const Balance bal{total * (1.0 - frac1) + slack, total * frac1 + slack};
  if (n <= 24) {
    std::vector<int> best;
    double best_cut = std::numeric_limits<double>::infinity();
    for (int attempt = 0; attempt < 8; ++attempt) {
      auto side = GrowBisection(g, total * frac1, rng);
      TwoWayFm(g, side, bal);
      const double cut = Cut(g, side);
      if (cut < best_cut) {
        best_cut = cut;
        best = side;
      }
    }
    return best;
  }
  std::vector<int> map;
  WGraph coarse = Coarsen(g, rng, map);
  std::vector<int> side;
  if (coarse.size() == n) {
    side = GrowBisection(g, total * frac1, rng);
  } else {
    auto coarse_side = Bisect(coarse, frac1, imbalance, rng);
    side.resize(n);
    for (int v = 0; v < n; ++v) {
      side[v] = coarse_side[map[v]];
    }
  }
  TwoWayFm(g, side, bal);
  return side;
}

void RecursiveBisect(const BlockGraph& graph,
                     const std::vector<int>& members,
                     int k,
                     int offset,
                     double imbalance,
                     Rng& rng,
                     std::vector<int>& labels)
{
  if (k <= 1 || members.size() <= 1) {
    for (int v : members) {
      labels[v] = offset;
    }
    return;
  }
  const int k0 = k / 2;
  const int k1 = k - k0;
  WGraph g = Induced(graph, members);
  auto side = Bisect(g, static_cast<double>(k1) / k, imbalance, rng);
  std::vector<int> part0, part1;
  for (size_t i = 0; i < members.size(); ++i) {
    (side[i] == 0 ? part0 : part1).push_back(members[i]);
  }
  if (part0.empty() || part1.empty()) {
    // Degenerate split: fall back to an even split by index.
    part0.assign(members.begin(), members.begin() + members.size() / 2);
    part1.assign(members.begin() + members.size() / 2, members.end());
  }
  RecursiveBisect(graph, part0, std::min<int>(k0, part0.size()), offset,
                  imbalance, rng, labels);
  RecursiveBisect(graph, part1, std::min<int>(k1, part1.size()), offset + k0,
                  imbalance, rng, labels);
}

}  // namespace

Partition MincutInit(const BlockGraph& graph, int k, double imbalance, uint64_t seed)
{
  if (k < 1 || graph.n < 1) {
    throw Error(ErrorKind::kInvalidArgument, "mincut init needs k >= 1");
  }
  k = std::min(k, graph.n);
  Rng rng(seed);
  std::vector<int> members(graph.n);
  std::iota(members.begin(), members.end(), 0);
  Partition p;
  p.assignment.assign(graph.n, 0);
  RecursiveBisect(graph, members, k, 0, imbalance, rng, p.assignment);
  p.num_chiplets = k;
  Compact(p);
  return p;
}

}  // namespace chiplet
