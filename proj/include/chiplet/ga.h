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
#include <map>
#include <string>
#include <vector>

#include "chiplet/params.h"
#include "chiplet/partition.h"
#include "chiplet/rng.h"
#include "json.hpp"

namespace chiplet {

using Genome = std::vector<std::string>;

// Sorted multiset representative.
Genome Canonicalize(Genome genome);
std::string GenomeKey(const Genome& genome);

// Seed of the inner partitioning run for a canonical genome.
uint64_t GenomeSeed(const Genome& canonical, uint64_t master_seed);

std::vector<Genome> InitPopulation(const GAConfig& config,
                                   const std::vector<std::string>& techs,
                                   Rng& rng);

// 2 * k_pop tournaments of size zeta (with replacement); lower fitness wins,
// ties go to the first drawn.  Returns k_pop (parent_a, parent_b) pairs.
std::vector<std::pair<int, int>> TournamentSelect(
    const std::vector<double>& fitness,
    const GAConfig& config,
    Rng& rng);

Genome Crossover(const Genome& a, const Genome& b, double p_c, Rng& rng);
Genome Mutate(Genome genome,
              double p_m,
              const std::vector<std::string>& techs,
              Rng& rng);

// Memoized fitness: reduced-budget CoreChipletPart score per canonical
// genome.  Model errors yield +inf.
class FitnessOracle
{
 public:
  FitnessOracle(const Evaluator& evaluator, uint64_t master_seed, int threads);

  // Evaluates every uncached genome of `genomes` (canonical) and returns
  // their fitness in order.
  std::vector<double> EvaluateAll(const std::vector<Genome>& genomes);
  double Evaluate(const Genome& genome);

  int64_t evaluations() const { return evaluations_; }
  int64_t cache_hits() const { return cache_hits_; }
  int64_t lookups() const { return lookups_; }

 private:
  double Compute(const Genome& genome) const;

  const Evaluator& evaluator_;
  uint64_t master_seed_;
  int threads_;
  std::map<std::string, double> cache_;
  int64_t evaluations_ = 0;
  int64_t cache_hits_ = 0;
  int64_t lookups_ = 0;
};

struct GenerationLog
{
  int generation = 0;
  double best = 0.0;
  double mean = 0.0;
  double best_ever = 0.0;
  int64_t evaluations = 0;
  double cache_hit_rate = 0.0;
};

struct GAResult
{
  Genome genome;      // best canonical genome
  double fitness = 0.0;  // its reduced-budget fitness
  CoreResult core;    // full-budget re-evaluation
  std::vector<GenerationLog> trace;
  int64_t evaluations = 0;
  int generations = 0;
};

GAResult Evolve(const Evaluator& evaluator,
                const GAConfig& config,
                uint64_t seed,
                int threads = 1);

// Full-budget CoreChipletPart for one genome with its canonical seed.
CoreResult RunGenome(const Evaluator& evaluator,
                     const Genome& genome,
                     uint64_t master_seed,
                     int threads = 1);

struct EnumerationResult
{
  Genome best;
  double fitness = 0.0;
  std::vector<std::pair<Genome, double>> all;
};

// Every canonical genome of length 1..k_max over the candidate techs.
std::vector<Genome> AllCanonicalGenomes(const std::vector<std::string>& techs,
                                        int k_max);

EnumerationResult EnumerateAssignments(const Evaluator& evaluator,
                                       int k_max,
                                       uint64_t seed,
                                       int threads = 1);

nlohmann::json GenerationToJson(const GenerationLog& log);

}  // namespace chiplet
