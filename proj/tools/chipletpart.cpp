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

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "chiplet/error.h"
#include "chiplet/model.h"
#include "chiplet/run.h"
#include "chiplet/testgen.h"

namespace {

using chiplet::Error;
using chiplet::ErrorKind;
using nlohmann::json;

constexpr int kExitInfeasible = 1;
constexpr int kExitError = 2;

struct ConfigFlags
{
  std::string path;
  std::optional<uint64_t> seed;
  std::string weights;
  std::optional<int64_t> perturbations;
  std::optional<int64_t> fast_perturbations;
  std::optional<int> walkers;
  std::optional<int> tot_pop, k_pop, zeta, sigma, psi, epsilon, K_max;
  std::optional<double> delta_threshold, p_c, p_m;
};

void AddConfigFlags(CLI::App* cmd, ConfigFlags& f, bool ga)
{
  cmd->add_option("--config", f.path,
                  "System config JSON (default: $CHIPLETPART_CONFIG or built-in)");
  cmd->add_option("--seed", f.seed, "Master seed");
  cmd->add_option("--perturbations", f.perturbations,
                  "Standard-mode annealing moves");
  cmd->add_option("--fast-perturbations", f.fast_perturbations,
                  "Fast-mode annealing moves");
  cmd->add_option("--walkers", f.walkers, "Annealing walkers");
  if (!ga) {
    return;
  }
  cmd->add_option("--weights", f.weights, "cost_weight,power_weight");
  cmd->add_option("--tot_pop", f.tot_pop);
  cmd->add_option("--k_pop", f.k_pop);
  cmd->add_option("--zeta", f.zeta);
  cmd->add_option("--sigma", f.sigma);
  cmd->add_option("--psi", f.psi);
  cmd->add_option("--epsilon", f.epsilon);
  cmd->add_option("--delta_threshold", f.delta_threshold);
  cmd->add_option("--p_c", f.p_c);
  cmd->add_option("--p_m", f.p_m);
  cmd->add_option("--K_max", f.K_max);
}

chiplet::SystemConfig ResolveConfig(const ConfigFlags& f)
{
  std::string path = f.path;
  if (path.empty()) {
    if (const char* env = std::getenv("CHIPLETPART_CONFIG")) {
      path = env;
    }
  }
  chiplet::SystemConfig cfg = path.empty()
                                  ? chiplet::DefaultConfig()
                                  : chiplet::ParseConfig(chiplet::ReadJsonFile(path));
  if (f.seed) {
    cfg.seed = *f.seed;
  }
  if (!f.weights.empty()) {
    std::stringstream ss(f.weights);
    char comma = 0;
    if (!(ss >> cfg.weights.cost_weight >> comma >> cfg.weights.power_weight)
        || comma != ',') {
      throw Error(ErrorKind::kInvalidArgument,
                  "--weights expects cost_weight,power_weight");
    }
  }
  if (f.perturbations) {
    cfg.floorplan.standard.perturbations = *f.perturbations;
  }
  if (f.fast_perturbations) {
    cfg.floorplan.fast.perturbations = *f.fast_perturbations;
  }
  if (f.walkers) {
    cfg.floorplan.walkers = *f.walkers;
  }
  auto set = [](auto& dst, const auto& src) {
    if (src) {
      dst = *src;
    }
  };
  set(cfg.ga.tot_pop, f.tot_pop);
  set(cfg.ga.k_pop, f.k_pop);
  set(cfg.ga.zeta, f.zeta);
  set(cfg.ga.sigma, f.sigma);
  set(cfg.ga.psi, f.psi);
  set(cfg.ga.epsilon, f.epsilon);
  set(cfg.ga.K_max, f.K_max);
  set(cfg.ga.delta_threshold, f.delta_threshold);
  set(cfg.ga.p_c, f.p_c);
  set(cfg.ga.p_m, f.p_m);
  if ((f.k_pop || f.sigma) && !f.tot_pop) {
    cfg.ga.tot_pop = cfg.ga.k_pop + cfg.ga.sigma;
  }
  // Round-trip through the parser so overrides get the same validation.
  return chiplet::ParseConfig(chiplet::ConfigToJson(cfg));
}

void Emit(const json& doc, const std::string& out)
{
  if (out.empty()) {
    std::cout << doc.dump(2) << '\n';
  } else {
    chiplet::WriteJsonFile(out, doc);
  }
}

int ReportError(ErrorKind kind, const std::string& message)
{
  json err{{"error", {{"kind", chiplet::ErrorKindName(kind)}, {"message", message}}}};
  std::cerr << err.dump() << '\n';
  return kExitError;
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Cost-driven chiplet partitioning, technology assignment and "
               "reach-aware floorplanning"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(chiplet::kToolVersion));

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a benchmark netlist");
  std::string gen_template = "waferscale";
  chiplet::GridSpec grid;
  chiplet::TileSpec tile;
  bool no_router = false;
  bool no_crossbar = false;
  std::string gen_out;
  std::string gen_config_out;
  std::optional<double> area_scaling;
  gen->add_option("--template", gen_template, "waferscale or mempool")
      ->check(CLI::IsMember({"waferscale", "mempool"}));
  gen->add_option("--tiles", grid.tiles, "Tile count");
  gen->add_option("--rows", grid.rows, "Mesh rows (0: auto)");
  gen->add_option("--cols", grid.cols, "Mesh columns (0: auto)");
  gen->add_option("--cores", tile.cores, "Cores per tile");
  gen->add_option("--mems", tile.shared_mems, "Shared memories per tile");
  gen->add_flag("--no-router", no_router);
  gen->add_flag("--no-crossbar", no_crossbar);
  gen->add_option("--area-scaling", area_scaling,
                  "Block area multiplier (waferscale 1600, mempool 100)");
  gen->add_option("--power-scaling", tile.power_scaling);
  gen->add_option("--rent-k", tile.rent_k);
  gen->add_option("--rent-p-logic", tile.rent_p_logic);
  gen->add_option("--rent-p-memory", tile.rent_p_memory);
  gen->add_option("--out", gen_out, "Netlist output path (default stdout)");
  gen->add_option("--config-out", gen_config_out,
                  "Also write the default config here");

  // partition
  auto* part = app.add_subcommand("partition", "Partition a netlist");
  std::string part_netlist;
  std::string part_out = "chipletpart_out";
  std::string homogeneous;
  std::string manifest_path;
  int threads = 1;
  bool allow_infeasible = false;
  ConfigFlags part_flags;
  part->add_option("netlist", part_netlist, "Netlist JSON");
  part->add_option("--homogeneous", homogeneous,
                   "Use one technology for every chiplet (skips the GA)");
  part->add_option("--out", part_out, "Output directory");
  part->add_option("--manifest", manifest_path, "Replay a run manifest");
  part->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  part->add_flag("--allow-infeasible", allow_infeasible,
                 "Exit 0 even if no feasible solution was found");
  AddConfigFlags(part, part_flags, true);

  // floorplan
  auto* fp = app.add_subcommand("floorplan", "Floorplan a chiplet-level netlist");
  std::string fp_input;
  std::string fp_out;
  std::string fp_mode = "standard";
  int fp_threads = 1;
  ConfigFlags fp_flags;
  fp->add_option("chiplets", fp_input, "Chiplet-level JSON")->required();
  fp->add_option("--mode", fp_mode)->check(CLI::IsMember({"standard", "fast"}));
  fp->add_option("--out", fp_out, "Output path (default stdout)");
  fp->add_option("--threads", fp_threads)->check(CLI::PositiveNumber);
  AddConfigFlags(fp, fp_flags, false);

  // evaluate
  auto* ev = app.add_subcommand("evaluate", "Cost an external partition");
  std::string ev_netlist;
  std::string ev_partition;
  std::string ev_genome;
  std::string ev_out;
  int ev_threads = 1;
  ConfigFlags ev_flags;
  ev->add_option("netlist", ev_netlist, "Netlist JSON")->required();
  ev->add_option("--partition", ev_partition, "Partition JSON")->required();
  ev->add_option("--genome", ev_genome, "Per-chiplet technology JSON")->required();
  ev->add_option("--out", ev_out, "Output path (default stdout)");
  ev->add_option("--threads", ev_threads)->check(CLI::PositiveNumber);
  AddConfigFlags(ev, ev_flags, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      return app.exit(e);
    }
    return ReportError(ErrorKind::kInvalidArgument, e.what());
  }

  try {
    if (gen->parsed()) {
      tile.has_router = !no_router;
      tile.has_crossbar = !no_crossbar;
      if (area_scaling) {
        tile.area_scaling = *area_scaling;
      }
      const chiplet::Netlist netlist
          = gen_template == "mempool"
                ? chiplet::GenMemPool(area_scaling.value_or(100.0))
                : chiplet::GenWaferscale(grid, tile);
      Emit(chiplet::NetlistToJson(netlist), gen_out);
      if (!gen_config_out.empty()) {
        chiplet::WriteJsonFile(gen_config_out,
                               chiplet::ConfigToJson(chiplet::DefaultConfig()));
      }
      return 0;
    }
    if (part->parsed()) {
      chiplet::Bundle bundle;
      if (!manifest_path.empty()) {
        bundle = chiplet::ReplayManifest(chiplet::ReadJsonFile(manifest_path),
                                         threads);
      } else {
        if (part_netlist.empty()) {
          throw Error(ErrorKind::kInvalidArgument,
                      "partition needs a netlist or --manifest");
        }
        const chiplet::Netlist netlist
            = chiplet::ParseNetlist(chiplet::ReadJsonFile(part_netlist));
        const chiplet::SystemConfig config = ResolveConfig(part_flags);
        chiplet::Validate(netlist, config);
        chiplet::PartitionOptions options;
        options.threads = threads;
        if (!homogeneous.empty()) {
          options.homogeneous = homogeneous;
        }
        bundle = chiplet::RunPartition(netlist, config, options);
      }
      chiplet::WriteBundle(bundle, part_out);
      std::cout << json{{"feasible", bundle.feasible},
                        {"num_chiplets", bundle.num_chiplets},
                        {"objective", bundle.cost["objective"]},
                        {"out", part_out}}
                       .dump()
                << '\n';
      return bundle.feasible || allow_infeasible ? 0 : kExitInfeasible;
    }
    if (fp->parsed()) {
      const chiplet::SystemConfig config = ResolveConfig(fp_flags);
      const auto instance = chiplet::ParseChipletInstance(
          chiplet::ReadJsonFile(fp_input), config.floorplan,
          config.assembly.separation);
      const json result = chiplet::RunFloorplan(
          instance,
          fp_mode == "fast" ? chiplet::AnnealMode::kFast
                            : chiplet::AnnealMode::kStandard,
          config.seed, fp_threads);
      Emit(result, fp_out);
      return result["feasible"].get<bool>() ? 0 : kExitInfeasible;
    }
    if (ev->parsed()) {
      const chiplet::Netlist netlist
          = chiplet::ParseNetlist(chiplet::ReadJsonFile(ev_netlist));
      const chiplet::SystemConfig config = ResolveConfig(ev_flags);
      chiplet::Validate(netlist, config);
      const json result = chiplet::RunEvaluate(
          netlist, config, chiplet::ReadJsonFile(ev_partition),
          chiplet::ReadJsonFile(ev_genome), ev_threads);
      Emit(result, ev_out);
      return result["feasible"].get<bool>() ? 0 : kExitInfeasible;
    }
  } catch (const Error& e) {
    return ReportError(e.kind(), e.what());
  } catch (const nlohmann::json::exception& e) {
    return ReportError(ErrorKind::kSchema, e.what());
  } catch (const std::exception& e) {
    return ReportError(ErrorKind::kIo, e.what());
  }
  return 0;
}
