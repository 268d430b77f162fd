// Copyright 2026 The vcl Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "vcl/core/config.hpp"
#include "vcl/core/errors.hpp"
#include "vcl/encoders/cache.hpp"
#include "vcl/encoders/frames.hpp"
#include "vcl/harness/experiment.hpp"
#include "acceptance.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <map>

namespace fs = std::filesystem;

namespace {

struct RunArgs {
  std::string config;
  std::string variant;
  std::uint64_t seed = 0;
  std::string out;
  std::string cache;
  std::vector<std::string> overrides;
  bool quiet = false;
};

int do_run(const RunArgs& a, const CLI::App& cmd) {
  vcl::ExperimentConfig cfg = a.config.empty() ? vcl::ExperimentConfig::synthetic_benchmark()
                                               : vcl::load_config(a.config);
  for (const auto& kv : a.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw vcl::ConfigError("--set expects key=value, got '" + kv + "'");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (cmd.count("--variant")) cfg.variant = vcl::parse_variant(a.variant);
  if (cmd.count("--seed")) cfg.seed = a.seed;
  if (cmd.count("--cache")) {
    cfg.dataset = "cache";
    cfg.cache_dir = a.cache;
  }
  vcl::apply_cache_profile(cfg);
  cfg.validate();
  fs::create_directories(a.out);
  vcl::write_file((fs::path(a.out) / "config.txt").string(), vcl::format_config(cfg));

  vcl::RunOptions opts;
  opts.out_dir = a.out;
  if (!a.quiet) opts.progress = [](const std::string& s) { std::cerr << s << "\n"; };
  const vcl::ResultRecord rec = vcl::run_experiment(cfg, opts);
  vcl::emit_report(rec, a.out);

  std::cout << "variant " << rec.variant << "  seed " << rec.seed << "\n";
  std::cout << "Acc " << rec.acc << "\n";
  std::cout << "BWF " << (rec.bwf ? std::to_string(*rec.bwf) : std::string("n/a")) << "\n";
  return 0;
}

int do_build_cache(const std::string& data, const std::string& out, const std::string& profile,
                   std::uint64_t seed) {
  auto encoder = vcl::make_profile_encoder(profile, seed);
  const auto& p = encoder->profile();
  const auto classes = vcl::read_class_names(data);
  std::map<std::string, vcl::ClassId> id_of;
  for (std::size_t i = 0; i < classes.size(); ++i) id_of[classes[i]] = vcl::ClassId(i);

  std::vector<vcl::VideoSample> samples;
  for (const char* split : {"train", "eval"}) {
    if (!fs::exists(fs::path(data) / split)) continue;
    for (const auto& video : vcl::list_frame_videos(data, split)) {
      vcl::VideoSample s;
      s.label = id_of.at(video.class_name);
      s.source_id = video.id;
      for (const auto& path : video.frame_paths) {
        s.frames.push_back(vcl::clip_preprocess(vcl::read_ppm(path), p.frame_height));
      }
      samples.push_back(std::move(s));
    }
  }
  if (samples.empty()) throw vcl::InputError("no videos found under '" + data + "'");
  const auto manifest = vcl::build_cache(samples, *encoder, out, classes);
  std::cout << "cached " << manifest.records.size() << " videos, " << classes.size()
            << " classes, encoder " << manifest.encoder_digest.substr(0, 16) << "\n";
  return 0;
}

int do_report(const std::vector<std::string>& in, const std::string& out) {
  std::vector<vcl::ResultRecord> records;
  for (const auto& dir : in) records.push_back(vcl::load_report(dir));
  fs::create_directories(out);
  vcl::emit_sweep(records, out);
  std::cout << "wrote " << records.size() << " rows to " << out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Video class-incremental learning with frozen image-text encoders"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Train and evaluate one variant over a task stream");
  run_cmd->add_option("--config", run.config, "key = value config file")->check(CLI::ExistingFile);
  run_cmd->add_option("--variant", run.variant, "zero_shot, spatial_prompting_linear, memory_linear, "
                                                "memory_mcl, temporal_mcl, pivot_no_prompts, pivot");
  run_cmd->add_option("--seed", run.seed);
  run_cmd->add_option("--out", run.out, "output directory")->required();
  run_cmd->add_option("--cache", run.cache, "cached token store (real-data mode)");
  run_cmd->add_option("--set", run.overrides, "config override key=value");
  run_cmd->add_flag("-q,--quiet", run.quiet);

  std::string data, cache_out, profile = "vit-b32";
  std::uint64_t cache_seed = vcl::SyntheticSettings{}.encoder_seed;
  auto* cache_cmd = app.add_subcommand("build-cache", "Encode a frame-directory dataset");
  cache_cmd->add_option("--data", data)->required()->check(CLI::ExistingDirectory);
  cache_cmd->add_option("--out", cache_out, "cache directory (default $VCL_CACHE_DIR)");
  cache_cmd->add_option("--profile", profile);
  cache_cmd->add_option("--encoder-seed", cache_seed);

  std::vector<std::string> report_in;
  std::string report_out;
  auto* report_cmd = app.add_subcommand("report", "Collect results into ladder and memory-sweep tables");
  report_cmd->add_option("--in", report_in)->required()->expected(1, -1);
  report_cmd->add_option("--out", report_out)->required();

  bool full = false;
  auto* self_cmd = app.add_subcommand("selftest", "Run the oracle and invariant checks");
  self_cmd->add_flag("--full", full, "include the end-to-end synthetic runs");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run_cmd) return do_run(run, *run_cmd);
    if (*cache_cmd) {
      return do_build_cache(data, cache_out.empty() ? vcl::default_cache_dir() : cache_out, profile,
                            cache_seed);
    }
    if (*report_cmd) return do_report(report_in, report_out);
    if (*self_cmd) return vcl::acceptance::run_selftest(std::cout, full, fs::read_symlink("/proc/self/exe").string())
                 ? 0
                 : 1;
  } catch (const vcl::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
