// Copyright 2026 The scenesynth Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// scenesynth command-line interface.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "scenesynth/arch.h"
#include "scenesynth/dataset.h"
#include "scenesynth/error.h"
#include "scenesynth/pipeline.h"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace scenesynth;

namespace {

enum ExitCode { kOk = 0, kUsageExit = 1, kValidationExit = 2, kBudgetExit = 3, kIoExit = 4 };

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kUsage:
      return kUsageExit;
    case ErrorKind::kParse:
    case ErrorKind::kValidation:
      return kValidationExit;
    case ErrorKind::kBudget:
      return kBudgetExit;
    case ErrorKind::kIo:
    case ErrorKind::kNotFound:
      return kIoExit;
  }
  return kValidationExit;
}

// Options shared by commands that open a workspace.
struct Common {
  std::vector<std::string> configs;
  std::optional<std::string> scene;
  std::optional<uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> k_threshold;
  std::optional<double> percentile;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", configs, "Config file(s), merged in order")
        ->envname("SCENESYNTH_CONFIG")
        ->delimiter(',');
    cmd->add_option("--scene", scene, "Scene profile name")->envname("SCENESYNTH_SCENE");
    cmd->add_option("--seed", seed, "Random seed")->envname("SCENESYNTH_SEED");
    cmd->add_option("--threads", threads, "Worker threads (0 = all cores)")
        ->envname("SCENESYNTH_THREADS");
    cmd->add_option("--k-threshold", k_threshold,
                    "Normalized log-likelihood threshold, or 'calibrate'")
        ->envname("SCENESYNTH_K_THRESHOLD");
    cmd->add_option("--calibrate-percentile", percentile,
                    "Pilot percentile used when calibrating the threshold")
        ->envname("SCENESYNTH_CALIBRATE_PERCENTILE");
  }

  json config() const {
    std::vector<fs::path> layers(configs.begin(), configs.end());
    json cfg = load_config(layers);
    if (scene) cfg["scene"] = *scene;
    if (seed) cfg["seed"] = *seed;
    if (threads) cfg["threads"] = *threads;
    if (percentile) cfg["generation"]["calibration_percentile"] = *percentile;
    if (k_threshold) {
      if (*k_threshold == "calibrate") {
        cfg["k_threshold"] = "calibrate";
      } else {
        try {
          size_t used = 0;
          const double v = std::stod(*k_threshold, &used);
          if (used != k_threshold->size()) throw std::invalid_argument("trailing");
          cfg["k_threshold"] = v;
        } catch (const std::exception&) {
          fail(ErrorKind::kUsage, "--k-threshold must be a number or 'calibrate'");
        }
      }
    }
    return cfg;
  }
};

void write_json(const json& doc, const std::optional<std::string>& out) {
  if (!out) {
    std::cout << doc.dump(2) << '\n';
    return;
  }
  std::ofstream f(*out, std::ios::binary);
  if (!f) fail(ErrorKind::kIo, "cannot write " + *out);
  f << doc.dump(2) << '\n';
  if (!f) fail(ErrorKind::kIo, "write failed: " + *out);
}

fs::path manifest_path(const std::string& dataset) {
  const fs::path p(dataset);
  return fs::is_directory(p) ? p / "manifest.json" : p;
}

int run(int argc, char** argv) {
  CLI::App app{"scenesynth: synthetic instance segmentation data"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "scenesynth 0.1.0");
  int code = kOk;

  // import
  Common import_opts;
  std::optional<std::string> import_out;
  auto* import_cmd = app.add_subcommand("import", "Load and validate assets and priors");
  import_opts.attach(import_cmd);
  import_cmd->add_option("--out", import_out, "Write the summary here")->envname("SCENESYNTH_OUT");
  import_cmd->callback([&] {
    const Workspace ws = open_workspace(import_opts.config());
    write_json(cmd_import(ws), import_out);
  });

  // gen
  Common gen_opts;
  std::optional<size_t> count;
  std::string gen_out;
  bool quiet = false;
  auto* gen_cmd = app.add_subcommand("gen", "Generate, render and package samples");
  gen_opts.attach(gen_cmd);
  gen_cmd->add_option("--count", count, "Number of samples")->envname("SCENESYNTH_COUNT");
  gen_cmd->add_option("--out", gen_out, "Output directory")->required()->envname("SCENESYNTH_OUT");
  gen_cmd->add_flag("--quiet", quiet, "No progress output");
  gen_cmd->callback([&] {
    json cfg = gen_opts.config();
    if (count) cfg["count"] = *count;
    const Workspace ws = open_workspace(cfg);
    const size_t n = cfg.at("count").get<size_t>();
    const DatasetManifest m = cmd_generate(ws, n, gen_out, quiet ? nullptr : &std::cerr);
    std::cout << gen_stats_to_json(m.stats).dump() << '\n';
    if (!m.complete) {
      std::cerr << "error: attempt budget exhausted after " << m.samples.size() << " of "
                << n << " samples; manifest marked incomplete\n";
      code = kBudgetExit;
    }
  });

  // validate
  std::string validate_dataset_arg;
  auto* validate_cmd = app.add_subcommand("validate", "Check manifest and file integrity");
  validate_cmd->add_option("dataset", validate_dataset_arg, "Dataset directory or manifest")
      ->required();
  validate_cmd->callback([&] {
    const fs::path mp = manifest_path(validate_dataset_arg);
    const DatasetManifest m = load_manifest(mp);
    const auto problems = validate_dataset(m, mp.parent_path());
    for (const std::string& p : problems) std::cerr << "invalid: " << p << '\n';
    std::cout << json({{"valid", problems.empty()},
                       {"samples", m.samples.size()},
                       {"problems", problems.size()}})
                     .dump()
              << '\n';
    if (!problems.empty()) code = kValidationExit;
  });

  // export-coco
  std::string coco_dataset;
  std::optional<std::string> coco_out;
  auto* coco_cmd = app.add_subcommand("export-coco", "Write COCO instance annotations");
  coco_cmd->add_option("dataset", coco_dataset, "Dataset directory or manifest")->required();
  coco_cmd->add_option("--out", coco_out, "Annotation file (default: <dataset>/annotations.json)")
      ->envname("SCENESYNTH_OUT");
  coco_cmd->callback([&] {
    const fs::path mp = manifest_path(coco_dataset);
    const DatasetManifest m = load_manifest(mp);
    const json coco = export_coco(m, mp.parent_path());
    const std::string out = coco_out.value_or((mp.parent_path() / "annotations.json").string());
    write_json(coco, out);
    std::cout << json({{"images", coco["images"].size()},
                       {"annotations", coco["annotations"].size()},
                       {"out", out}})
                     .dump()
              << '\n';
  });

  // stats
  std::string stats_dataset;
  bool recount = false;
  auto* stats_cmd = app.add_subcommand("stats", "Instance counts per category");
  stats_cmd->add_option("dataset", stats_dataset, "Dataset directory or manifest")->required();
  stats_cmd->add_flag("--recount", recount, "Verify counts against the segmentation maps");
  stats_cmd->callback([&] {
    const fs::path mp = manifest_path(stats_dataset);
    const DatasetManifest m = load_manifest(mp);
    json report = dataset_stats(m);
    if (recount) {
      const auto counts = recount_instances(m, mp.parent_path());
      bool match = true;
      for (const auto& [c, n] : counts) {
        const auto it = m.instance_counts.find(c);
        match = match && it != m.instance_counts.end() && it->second == n;
      }
      report["recount_matches"] = match;
      if (!match) code = kValidationExit;
    }
    std::cout << report.dump(2) << '\n';
  });

  // losses
  Common loss_opts;
  LossInputs loss_in;
  std::string sample_arg;
  std::string candidate_arg;
  std::optional<std::string> pred_seg, pred_normal, pred_depth, real_scores, fake_scores;
  bool no_rough = false;
  auto* loss_cmd = app.add_subcommand("losses", "Evaluate the GeoGAN objective on one sample");
  loss_cmd->add_option("--config", loss_opts.configs, "Config file(s) for loss weights")
      ->envname("SCENESYNTH_CONFIG")
      ->delimiter(',');
  loss_cmd->add_option("--sample", sample_arg, "Sample path prefix, e.g. out/samples/000000")
      ->required();
  loss_cmd->add_option("--candidate", candidate_arg, "Generated RGB image (PNG)")->required();
  loss_cmd->add_option("--pred-seg", pred_seg, "Predicted instance map (16-bit PNG)");
  loss_cmd->add_option("--pred-normal", pred_normal, "Predicted normal map (8-bit PNG)");
  loss_cmd->add_option("--pred-depth", pred_depth, "Predicted depth map (16-bit PNG)");
  loss_cmd->add_option("--real-scores", real_scores, "Discriminator scores on real (CSV)");
  loss_cmd->add_option("--fake-scores", fake_scores, "Discriminator scores on fake (CSV)");
  loss_cmd->add_flag("--no-rough", no_rough, "Reconstruct only the three geometric maps");
  loss_cmd->callback([&] {
    const json cfg = loss_opts.config();
    const json& w = cfg.at("weights");
    loss_in.weights.gan = w.value("gan", 2.0);
    loss_in.weights.pmse = w.value("pmse", 5.0);
    loss_in.weights.rec = w.value("rec", 10.0);
    loss_in.weights.geo = w.value("geo", 3.0);
    const fs::path prefix(sample_arg);
    loss_in.sample_dir = prefix.parent_path();
    loss_in.stem = prefix.filename().string();
    loss_in.candidate = candidate_arg;
    if (pred_seg) loss_in.pred_seg = *pred_seg;
    if (pred_normal) loss_in.pred_normal = *pred_normal;
    if (pred_depth) loss_in.pred_depth = *pred_depth;
    if (real_scores) loss_in.real_scores = *real_scores;
    if (fake_scores) loss_in.fake_scores = *fake_scores;
    loss_in.include_rough = !no_rough;
    std::cout << cmd_losses(loss_in).dump(2) << '\n';
  });

  // rf
  std::optional<std::string> arch;
  std::string preset = "discriminator";
  int rf_size = 256;
  int rf_channels = 3;
  auto* rf_cmd = app.add_subcommand("rf", "Shape trace and receptive field of an architecture");
  rf_cmd->add_option("--arch", arch, "Architecture string, e.g. 4n64s2LReLU-4n1s1");
  rf_cmd->add_option("--preset", preset, "discriminator | color | geometry | predictor")
      ->check(CLI::IsMember({"discriminator", "color", "geometry", "predictor"}));
  rf_cmd->add_option("--input", rf_size, "Input height and width")->check(CLI::PositiveNumber);
  rf_cmd->add_option("--channels", rf_channels, "Input channels")->check(CLI::PositiveNumber);
  rf_cmd->callback([&] {
    std::string text;
    if (arch) {
      text = *arch;
    } else if (preset == "discriminator") {
      text = kDiscriminatorArch;
    } else if (preset == "color") {
      text = kColorPathArch;
    } else if (preset == "geometry") {
      text = kGeometryPathArch;
    } else {
      text = kPredictorArch;
    }
    const ConvSpec spec = parse_arch(text);
    json layers = json::array();
    for (const LayerShape& s : shape_trace(spec, rf_size, rf_size, rf_channels)) {
      layers.push_back({{"layer", s.token}, {"shape", {s.height, s.width, s.channels}}});
    }
    json rf = nullptr;
    try {
      rf = receptive_field(spec);
    } catch (const Error&) {
      rf = nullptr;
    }
    std::cout << json({{"arch", to_string(spec)}, {"layers", layers}, {"receptive_field", rf}})
                     .dump(2)
              << '\n';
  });

  // sensitivity
  Common sens_opts;
  std::optional<int> annotators;
  std::optional<double> noise;
  std::optional<size_t> per_base;
  std::string sens_out;
  auto* sens_cmd = app.add_subcommand("sensitivity", "Annotator-bias divergence study");
  sens_opts.attach(sens_cmd);
  sens_cmd->add_option("--annotators", annotators, "Number of simulated annotators")
      ->envname("SCENESYNTH_ANNOTATORS");
  sens_cmd->add_option("--noise", noise, "Multiplicative noise half-width")
      ->envname("SCENESYNTH_NOISE");
  sens_cmd->add_option("--count", per_base, "Layouts per knowledge base")
      ->envname("SCENESYNTH_COUNT");
  sens_cmd->add_option("--out", sens_out, "Output directory")->required()->envname("SCENESYNTH_OUT");
  sens_cmd->callback([&] {
    json cfg = sens_opts.config();
    if (annotators) cfg["sensitivity"]["annotators"] = *annotators;
    if (noise) cfg["sensitivity"]["noise"] = *noise;
    if (per_base) cfg["sensitivity"]["layouts_per_base"] = *per_base;
    const Workspace ws = open_workspace(cfg);
    const json& s = ws.config.at("sensitivity");
    const SensitivityReport r = cmd_sensitivity(ws, s.at("annotators").get<int>(),
                                                s.at("noise").get<double>(), sens_out, &std::cerr);
    std::cout << json({{"bases", r.divergence.size()},
                       {"median_divergence", r.median_divergence},
                       {"noise_floor", r.noise_floor},
                       {"bootstrap_floor", r.bootstrap_floor}})
                     .dump()
              << '\n';
  });

  // preview
  std::string preview_dataset;
  std::string preview_out;
  int columns = 4;
  int limit = 16;
  auto* preview_cmd = app.add_subcommand("preview", "Contact sheet of rendered samples");
  preview_cmd->add_option("dataset", preview_dataset, "Dataset directory or manifest")->required();
  preview_cmd->add_option("--out", preview_out, "PNG to write")->required()->envname("SCENESYNTH_OUT");
  preview_cmd->add_option("--columns", columns, "Thumbnails per row")->check(CLI::PositiveNumber);
  preview_cmd->add_option("--limit", limit, "Maximum samples")->check(CLI::PositiveNumber);
  preview_cmd->callback([&] {
    const fs::path mp = manifest_path(preview_dataset);
    const DatasetManifest m = load_manifest(mp);
    write_png(preview_out, contact_sheet(m, mp.parent_path(), columns, limit));
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsageExit;
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidationExit;
  }
}
