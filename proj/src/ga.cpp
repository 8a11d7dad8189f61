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

#include "chiplet/ga.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include "chiplet/error.h"
#include "chiplet/parallel.h"

namespace chiplet {

Genome Canonicalize(Genome genome)
{
  std::sort(genome.begin(), genome.end());
  return genome;
}

std::string GenomeKey(const Genome& genome)
{
  std::string key;
  for (const auto& gene : genome) {
    key += gene;
    key += '|';
  }
  return key;
}

uint64_t GenomeSeed(const Genome& canonical, uint64_t master_seed)
{
  return Fnv1a(GenomeKey(canonical), SplitMix64(master_seed));
}

std::vector<Genome> InitPopulation(const GAConfig& config,
                                   const std::vector<std::string>& techs,
                                   Rng& rng)
{
  if (techs.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "technology table is empty");
  }
  std::vector<Genome> population(config.tot_pop);
  for (auto& genome : population) {
    genome.resize(config.K_max);
    for (auto& gene : genome) {
      gene = techs[UniformInt(rng, 0, static_cast<int>(techs.size()) - 1)];
    }
    genome = Canonicalize(std::move(genome));
  }
  return population;
}

std::vector<std::pair<int, int>> TournamentSelect(
    const std::vector<double>& fitness,
    const GAConfig& config,
    Rng& rng)
{
  const int n = static_cast<int>(fitness.size());
  std::vector<int> winners;
  winners.reserve(2 * config.k_pop);
  for (int t = 0; t < 2 * config.k_pop; ++t) {
    int best = UniformInt(rng, 0, n - 1);
    for (int z = 1; z < config.zeta; ++z) {
      const int draw = UniformInt(rng, 0, n - 1);
      if (fitness[draw] < fitness[best]) {
        best = draw;
      }
    }
    winners.push_back(best);
  }
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < config.k_pop; ++i) {
    pairs.push_back({winners[2 * i], winners[2 * i + 1]});
  }
  return pairs;
}

Genome Crossover(const Genome& a, const Genome& b, double p_c, Rng& rng)
{
  if (Uniform01(rng) >= p_c) {
    return a;
  }
  Genome child = a;
  for (size_t i = 0; i < child.size(); ++i) {
    const bool from_b = Uniform01(rng) < 0.5;
    if (from_b && i < b.size()) {
      child[i] = b[i];
    }
  }
  return child;
}

Genome Mutate(Genome genome,
              double p_m,
              const std::vector<std::string>& techs,
              Rng& rng)
{
  for (auto& gene : genome) {
    if (Uniform01(rng) < p_m) {
      gene = techs[UniformInt(rng, 0, static_cast<int>(techs.size()) - 1)];
    }
  }
  return genome;
}

FitnessOracle::FitnessOracle(const Evaluator& evaluator,
                             uint64_t master_seed,
                             int threads)
    : evaluator_(evaluator), master_seed_(master_seed), threads_(threads)
{
}

double FitnessOracle::Compute(const Genome& genome) const
{
  try {
    const auto techs = evaluator_.design().TechIndices(genome);
    const CoreResult result = CoreChipletPart(
        evaluator_, techs, evaluator_.design().config().partition.reduced,
        GenomeSeed(genome, master_seed_));
    return result.best.score;
  } catch (const Error&) {
    return std::numeric_limits<double>::infinity();
  }
}

std::vector<double> FitnessOracle::EvaluateAll(const std::vector<Genome>& genomes)
{
  std::vector<Genome> todo;
  std::map<std::string, bool> queued;
  for (const auto& g : genomes) {
    const std::string key = GenomeKey(g);
    ++lookups_;
    if (cache_.count(key) != 0 || queued.count(key) != 0) {
      ++cache_hits_;
      continue;
    }
    queued[key] = true;
    todo.push_back(g);
  }
  std::vector<double> values(todo.size());
  ParallelFor(static_cast<int>(todo.size()), threads_,
              [&](int i) { values[i] = Compute(todo[i]); });
  for (size_t i = 0; i < todo.size(); ++i) {
    cache_[GenomeKey(todo[i])] = values[i];
  }
  evaluations_ += static_cast<int64_t>(todo.size());
  std::vector<double> out;
  out.reserve(genomes.size());
  for (const auto& g : genomes) {
    out.push_back(cache_.at(GenomeKey(g)));
  }
  return out;
}

double FitnessOracle::Evaluate(const Genome& genome)
{
  return EvaluateAll({genome})[0];
}

CoreResult RunGenome(const Evaluator& evaluator,
                     const Genome& genome,
                     uint64_t master_seed,
                     int threads)
{
  const Genome canonical = Canonicalize(genome);
  return CoreChipletPart(evaluator, evaluator.design().TechIndices(canonical),
                         evaluator.design().config().partition.full,
                         GenomeSeed(canonical, master_seed), threads);
}

GAResult Evolve(const Evaluator& evaluator,
                const GAConfig& config,
                uint64_t seed,
                int threads)
{
  const std::vector<std::string> techs = evaluator.design().config().Candidates();
  Rng rng(DeriveSeed(seed, 0x6761ULL));
  FitnessOracle oracle(evaluator, seed, threads);
  std::vector<Genome> population = InitPopulation(config, techs, rng);

  GAResult result;
  double best_cost = std::numeric_limits<double>::infinity();
  double prev_cost = std::numeric_limits<double>::infinity();
  std::optional<Genome> best_genome;
  int stall = 0;
  for (int gen = 0;; ++gen) {
    const std::vector<double> fitness = oracle.EvaluateAll(population);
    GenerationLog log;
    log.generation = gen;
    log.best = std::numeric_limits<double>::infinity();
    double sum = 0.0;
    int finite = 0;
    for (size_t i = 0; i < population.size(); ++i) {
      if (fitness[i] < log.best) {
        log.best = fitness[i];
      }
      if (!best_genome || fitness[i] < best_cost) {
        best_cost = fitness[i];
        best_genome = population[i];
      }
      if (std::isfinite(fitness[i])) {
        sum += fitness[i];
        ++finite;
      }
    }
    log.mean = finite > 0 ? sum / finite : std::numeric_limits<double>::infinity();
    log.best_ever = best_cost;
    log.evaluations = oracle.evaluations();
    log.cache_hit_rate = oracle.lookups() > 0
                             ? static_cast<double>(oracle.cache_hits())
                                   / static_cast<double>(oracle.lookups())
                             : 0.0;
    result.trace.push_back(log);
    result.generations = gen + 1;

    if (result.generations >= config.psi) {
      break;
    }
    const double delta = prev_cost - best_cost;
    if (delta <= config.delta_threshold) {
      if (++stall > config.epsilon) {
        break;
      }
    } else {
      stall = 0;
    }
    prev_cost = best_cost;

    std::vector<int> order(population.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return fitness[a] < fitness[b]; });
    std::vector<Genome> next;
    for (int e = 0; e < config.sigma && e < static_cast<int>(order.size()); ++e) {
      next.push_back(population[order[e]]);
    }
    for (const auto& [a, b] : TournamentSelect(fitness, config, rng)) {
      Genome child = Crossover(population[a], population[b], config.p_c, rng);
      child = Mutate(std::move(child), config.p_m, techs, rng);
      next.push_back(Canonicalize(std::move(child)));
    }
    population = std::move(next);
  }

  result.genome = *best_genome;
  result.fitness = best_cost;
  result.evaluations = oracle.evaluations();
  result.core = RunGenome(evaluator, result.genome, seed, threads);
  return result;
}

std::vector<Genome> AllCanonicalGenomes(const std::vector<std::string>& techs,
                                        int k_max)
{
  std::vector<std::string> sorted = techs;
  std::sort(sorted.begin(), sorted.end());
  std::vector<Genome> out;
  Genome current;
  // Non-decreasing index sequences enumerate each multiset once.
  auto rec = [&](auto&& self, int start, int length) -> void {
    if (static_cast<int>(current.size()) == length) {
      out.push_back(current);
      return;
    }
    for (int t = start; t < static_cast<int>(sorted.size()); ++t) {
      current.push_back(sorted[t]);
      self(self, t, length);
      current.pop_back();
    }
  };
  for (int k = 1; k <= k_max; ++k) {
    rec(rec, 0, k);
  }
  return out;
}

EnumerationResult EnumerateAssignments(const Evaluator& evaluator,
                                       int k_max,
                                       uint64_t seed,
                                       int threads)
{
  const auto genomes
      = AllCanonicalGenomes(evaluator.design().config().Candidates(), k_max);
  FitnessOracle oracle(evaluator, seed, threads);
  const auto fitness = oracle.EvaluateAll(genomes);
  EnumerationResult result;
  result.fitness = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < genomes.size(); ++i) {
    result.all.push_back({genomes[i], fitness[i]});
    if (result.best.empty() || fitness[i] < result.fitness) {
      result.best = genomes[i];
      result.fitness = fitness[i];
    }
  }
  return result;
}

nlohmann::json GenerationToJson(const GenerationLog& log)
{
  auto num = [](double v) {
    return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json("inf");
  };
  return nlohmann::json{{"generation", log.generation},
                        {"best", num(log.best)},
                        {"mean", num(log.mean)},
                        {"best_ever", num(log.best_ever)},
                        {"evaluations", log.evaluations},
                        {"cache_hit_rate", log.cache_hit_rate}};
}

}  // namespace chiplet
