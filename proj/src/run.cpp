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

#include "chiplet/run.h"

#include <chrono>
#include <fstream>
#include <map>

#include "chiplet/cost.h"
#include "chiplet/error.h"
#include "chiplet/ga.h"
#include "chiplet/partition.h"

namespace chiplet {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point since)
{
  return std::chrono::duration<double>(Clock::now() - since).count();
}

json Finite(double v)
{
  return std::isfinite(v) ? json(v) : json("inf");
}

std::vector<std::string> ChipletNames(int n)
{
  std::vector<std::string> names;
  for (int i = 0; i < n; ++i) {
    names.push_back("chiplet" + std::to_string(i));
  }
  return names;
}

json ViolationsToJson(const std::vector<Violation>& violations,
                      const std::vector<std::string>& names)
{
  json out = json::array();
  for (const auto& v : violations) {
    out.push_back({{"kind", ViolationKindName(v.kind)},
                   {"a", names[v.a]},
                   {"b", names[v.b]},
                   {"magnitude", v.magnitude}});
  }
  return out;
}

json SolutionReport(const Evaluator& evaluator,
                    const Solution& sol,
                    const FeasibilityReport& report)
{
  const auto names = ChipletNames(sol.partition.num_chiplets);
  const Baseline& base = evaluator.baseline();
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["num_chiplets"] = sol.partition.num_chiplets;
  doc["feasible"] = report.feasible;
  doc["reticle_ok"] = sol.reticle_ok;
  doc["violations"] = ViolationsToJson(report.violations, names);
  doc["objective"] = Finite(sol.objective);
  doc["score"] = Finite(sol.score);
  doc["baseline"] = {{"tech", base.tech}, {"cost", base.cost}, {"power", base.power}};
  if (sol.reticle_ok) {
    doc["breakdown"] = CostToJson(sol.cost);
    doc["normalized_cost"] = sol.cost.total / base.cost;
    doc["normalized_power"] = sol.cost.power_total / base.power;
    doc["floorplan_objective"] = {{"wl_reach", sol.fp_objective.wl_reach},
                                  {"chip_area", sol.fp_objective.chip_area},
                                  {"package_area", sol.fp_objective.package_area},
                                  {"value", sol.fp_objective.Value()}};
  }
  std::vector<std::string> techs;
  for (int t : sol.techs) {
    techs.push_back(evaluator.design().techs()[t].id);
  }
  doc["chiplet_techs"] = techs;
  return doc;
}

}  // namespace

Bundle RunPartition(const Netlist& netlist,
                    const SystemConfig& config,
                    const PartitionOptions& options)
{
  const auto start = Clock::now();
  Design design(netlist, config);
  const Baseline baseline = MonolithicBaseline(design);
  Evaluator evaluator(design, baseline);
  Bundle bundle;

  Genome genome;
  CoreResult core;
  if (options.homogeneous) {
    design.TechIndex(*options.homogeneous);
    genome.assign(config.ga.K_max, *options.homogeneous);
    const auto t0 = Clock::now();
    core = RunGenome(evaluator, genome, config.seed, options.threads);
    bundle.timing["core_chipletpart"] = Seconds(t0);
  } else {
    const auto t0 = Clock::now();
    GAResult ga = Evolve(evaluator, config.ga, config.seed, options.threads);
    bundle.timing["evolve"] = Seconds(t0);
    genome = ga.genome;
    core = std::move(ga.core);
    for (const auto& log : ga.trace) {
      bundle.ga_trace.push_back(GenerationToJson(log));
    }
  }
  const Solution& sol = core.best;
  const FeasibilityReport report = CheckSolution(evaluator, sol);
  bundle.feasible = report.feasible;
  bundle.num_chiplets = sol.partition.num_chiplets;

  bundle.partition = PartitionToJson(sol.partition, netlist);
  bundle.cost = SolutionReport(evaluator, sol, report);
  bundle.cost["origin"] = OriginName(core.best_origin);
  json traces = json::array();
  for (const auto& trace : core.traces) {
    json t = json::array();
    for (double v : trace) {
      t.push_back(Finite(v));
    }
    traces.push_back(std::move(t));
  }
  bundle.cost["refinement_traces"] = std::move(traces);
  bundle.genome = {{"schema_version", kSchemaVersion},
                   {"genome", genome},
                   {"chiplet_techs", bundle.cost["chiplet_techs"]}};
  bundle.floorplan
      = FloorplanToJson(sol.floorplan, ChipletNames(sol.partition.num_chiplets));
  bundle.manifest = {{"schema_version", kSchemaVersion},
                     {"tool", "chipletpart"},
                     {"version", kToolVersion},
                     {"command", "partition"},
                     {"seed", config.seed},
                     {"options",
                      {{"homogeneous", options.homogeneous
                                           ? json(*options.homogeneous)
                                           : json()}}},
                     {"netlist", NetlistToJson(netlist)},
                     {"config", ConfigToJson(config)}};
  bundle.timing["total"] = Seconds(start);
  return bundle;
}

Bundle ReplayManifest(const json& manifest, int threads)
{
  const Netlist netlist = ParseNetlist(manifest.at("netlist"));
  const SystemConfig config = ParseConfig(manifest.at("config"));
  Validate(netlist, config);
  PartitionOptions options;
  options.threads = threads;
  const json& homo = manifest.at("options").at("homogeneous");
  if (!homo.is_null()) {
    options.homogeneous = homo.get<std::string>();
  }
  return RunPartition(netlist, config, options);
}

void WriteBundle(const Bundle& bundle, const std::filesystem::path& dir)
{
  std::filesystem::create_directories(dir);
  WriteJsonFile(dir / "partition.json", bundle.partition);
  WriteJsonFile(dir / "genome.json", bundle.genome);
  WriteJsonFile(dir / "floorplan.json", bundle.floorplan);
  WriteJsonFile(dir / "cost.json", bundle.cost);
  WriteJsonFile(dir / "manifest.json", bundle.manifest);
  WriteJsonFile(dir / "timing.json", bundle.timing);
  std::ofstream trace(dir / "ga_trace.jsonl");
  if (!trace) {
    throw Error(ErrorKind::kIo, "cannot write ga_trace.jsonl");
  }
  for (const auto& line : bundle.ga_trace) {
    trace << line.dump() << '\n';
  }
}

ChipletInstance ParseChipletInstance(const json& doc,
                                     const FloorplanParams& params,
                                     double default_separation)
{
  auto schema = [](const std::string& what) {
    return Error(ErrorKind::kSchema, "chiplet instance: " + what);
  };
  if (!doc.is_object() || !doc.contains("chiplets") || !doc["chiplets"].is_array()) {
    throw schema("missing 'chiplets' array");
  }
  ChipletInstance inst;
  inst.problem.params = params;
  inst.problem.separation = doc.value("separation", default_separation);
  std::map<std::string, int> index;
  for (const auto& c : doc["chiplets"]) {
    if (!c.contains("id") || !c["id"].is_string() || !c.contains("area")
        || !c["area"].is_number() || c["area"].get<double>() <= 0.0) {
      throw schema("each chiplet needs a string id and a positive area");
    }
    const std::string id = c["id"].get<std::string>();
    if (!index.emplace(id, static_cast<int>(inst.names.size())).second) {
      throw Error(ErrorKind::kDuplicateId, "duplicate chiplet id '" + id + "'");
    }
    inst.names.push_back(id);
    inst.problem.areas.push_back(c["area"].get<double>());
  }
  for (const auto& n : doc.value("nets", json::array())) {
    ChipletNet net;
    for (const char* key : {"source", "sink"}) {
      if (!n.contains(key) || !n[key].is_string()) {
        throw schema(std::string("net is missing '") + key + "'");
      }
      auto it = index.find(n[key].get<std::string>());
      if (it == index.end()) {
        throw Error(ErrorKind::kDanglingReference,
                    "net references unknown chiplet '"
                        + n[key].get<std::string>() + "'");
      }
      (std::string(key) == "source" ? net.a : net.b) = it->second;
    }
    if (!n.contains("bits") || !n["bits"].is_number_integer()
        || n["bits"].get<int64_t>() < 1 || !n.contains("reach")
        || !n["reach"].is_number() || n["reach"].get<double>() <= 0.0) {
      throw schema("each net needs bits >= 1 and reach > 0");
    }
    net.bits = n["bits"].get<int64_t>();
    net.reach = n["reach"].get<double>();
    net.io_area = n.value("io_area", 0.0);
    if (net.a == net.b || net.io_area < 0.0) {
      throw schema("nets must join two distinct chiplets with io_area >= 0");
    }
    inst.problem.nets.push_back(net);
  }
  if (inst.names.empty()) {
    throw schema("at least one chiplet is required");
  }
  return inst;
}

json RunFloorplan(const ChipletInstance& instance,
                  AnnealMode mode,
                  uint64_t seed,
                  int threads)
{
  const AnnealResult result
      = Anneal(instance.problem, mode, seed, nullptr, threads);
  const FeasibilityReport report
      = CheckFeasible(result.floorplan, instance.problem.nets,
                      instance.problem.separation, &instance.problem.areas);
  return {{"schema_version", kSchemaVersion},
          {"mode", mode == AnnealMode::kStandard ? "standard" : "fast"},
          {"seed", seed},
          {"objective",
           {{"wl_reach", result.objective.wl_reach},
            {"chip_area", result.objective.chip_area},
            {"package_area", result.objective.package_area},
            {"value", result.objective.Value()}}},
          {"feasible", report.feasible},
          {"violations", ViolationsToJson(report.violations, instance.names)},
          {"floorplan", FloorplanToJson(result.floorplan, instance.names)}};
}

json RunEvaluate(const Netlist& netlist,
                 const SystemConfig& config,
                 const json& partition_doc,
                 const json& genome_doc,
                 int threads)
{
  Design design(netlist, config);
  Evaluator evaluator(design, MonolithicBaseline(design));
  Partition partition = ParsePartition(partition_doc, netlist);

  const char* key = genome_doc.contains("chiplet_techs") ? "chiplet_techs" : "techs";
  if (!genome_doc.is_object() || !genome_doc.contains(key)
      || !genome_doc[key].is_array()) {
    throw Error(ErrorKind::kSchema, "genome file needs a 'chiplet_techs' array");
  }
  std::vector<std::string> tech_ids;
  for (const auto& t : genome_doc[key]) {
    if (!t.is_string()) {
      throw Error(ErrorKind::kSchema, "genome entries must be strings");
    }
    tech_ids.push_back(t.get<std::string>());
  }
  if (static_cast<int>(tech_ids.size()) < partition.num_chiplets) {
    throw Error(ErrorKind::kInvalidArgument,
                "genome has fewer entries than the partition has chiplets");
  }
  tech_ids.resize(partition.num_chiplets);
  Compact(partition, &tech_ids);
  const std::vector<int> techs = design.TechIndices(tech_ids);

  Solution sol = evaluator.Floorplanned(partition, techs, AnnealMode::kStandard,
                                        config.seed, nullptr, threads);
  const FeasibilityReport report = CheckSolution(evaluator, sol);
  json doc = SolutionReport(evaluator, sol, report);
  doc["floorplan"]
      = FloorplanToJson(sol.floorplan, ChipletNames(partition.num_chiplets));
  return doc;
}

}  // namespace chiplet
