// sheeppain: command-line front end for the facial pain scoring pipeline.
//
// Exit codes: 0 success, 1 validation failure, 2 numerical failure,
// 3 oracle mismatch. Failures print one JSON object on stderr.

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sheeppain/sheeppain.hpp"

namespace sp = sheeppain;

namespace {

bool g_quiet = false;

void note(const std::string& message) {
  if (!g_quiet) std::cerr << message << '\n';
}

int exit_code(sp::ErrorKind kind) {
  switch (kind) {
    case sp::ErrorKind::validation: return 1;
    case sp::ErrorKind::io: return 1;
    case sp::ErrorKind::numerical: return 2;
    case sp::ErrorKind::oracle: return 3;
  }
  return 1;
}

void report_error(const sp::Error& e) {
  nlohmann::ordered_json j;
  j["error"] = std::string(sp::kind_name(e.kind()));
  j["message"] = e.what();
  if (e.line()) j["line"] = *e.line();
  if (!e.field().empty()) j["field"] = e.field();
  std::cerr << j.dump() << '\n';
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw sp::Error(sp::ErrorKind::io, "cannot open '" + path + "' for reading");
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw sp::Error(sp::ErrorKind::io, "cannot open '" + path + "' for writing");
  return out;
}

std::string slurp(const std::string& path) {
  auto in = open_in(path);
  return {std::istreambuf_iterator<char>(in), {}};
}

sp::EngineConfig load_config(const std::string& path) {
  return path.empty() ? sp::parse_config("") : sp::parse_config(slurp(path));
}

sp::Checkpoint load_checkpoint(const std::string& path) {
  auto in = open_in(path);
  return sp::read_checkpoint(in);
}

sp::WeightTable load_weights(const std::string& path, const sp::EngineConfig& cfg,
                             std::size_t clusters) {
  if (path.empty()) {
    // Config weights apply when their cluster count matches the checkpoint.
    if (cfg.weights.cluster_weights().size() == clusters) return cfg.weights;
    return sp::WeightTable(clusters);
  }
  return sp::parse_weights(slurp(path), clusters);
}

std::vector<sp::Detection> load_detections(const std::string& path,
                                           const sp::EngineConfig& cfg) {
  auto in = open_in(path);
  sp::ParseOptions opts;
  opts.pains = cfg.pains;
  return sp::parse_detections(in, opts).detections;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Facial-landmark pain scoring with graph message passing"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_flag("-q,--quiet", g_quiet, "Suppress all non-data output");

  // validate
  std::string validate_path;
  bool permissive = false;
  std::string validate_config;
  auto* validate_cmd = app.add_subcommand("validate", "Parse a detection file and report errors");
  validate_cmd->add_option("detections", validate_path, "Detection record file")->required();
  validate_cmd->add_flag("--permissive", permissive, "Skip malformed lines instead of failing");
  validate_cmd->add_option("--config", validate_config, "Engine config file");

  // gen-data
  std::uint64_t gen_seed = 1;
  std::size_t gen_samples = 200;
  double gen_separation = 0.9;
  std::string gen_out;
  std::string gen_scenario;
  std::size_t gen_days = 5;
  std::size_t gen_frames_per_day = 10;
  double gen_noise = 0.0;
  auto* gen_cmd = app.add_subcommand("gen-data", "Generate a labeled synthetic dataset");
  gen_cmd->add_option("--seed", gen_seed, "Generator seed");
  gen_cmd->add_option("--samples", gen_samples, "Number of faces")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--separation", gen_separation, "Cluster separation in [0,1]")
      ->check(CLI::Range(0.0, 1.0));
  gen_cmd->add_option("--out", gen_out,
                      "Detection output file; labels go to <out>.labels")
      ->required();
  gen_cmd->add_option("--scenario", gen_scenario,
                      "Emit a monitoring scenario instead (rising|falling|flat)");
  gen_cmd->add_option("--days", gen_days, "Scenario length in days");
  gen_cmd->add_option("--frames-per-day", gen_frames_per_day, "Scenario frames per day");
  gen_cmd->add_option("--noise", gen_noise, "Scenario pain noise std-dev");

  // train
  std::string train_data;
  std::string train_config;
  std::string train_out;
  auto* train_cmd = app.add_subcommand("train", "Fit the edge scorer and train the model");
  train_cmd->add_option("--data", train_data, "Detection file with <data>.labels sidecar")
      ->required();
  train_cmd->add_option("--config", train_config, "Engine config file");
  train_cmd->add_option("--out-checkpoint", train_out, "Checkpoint output path")->required();

  // gradcheck
  sp::GradCheckOptions grad_opts;
  auto* grad_cmd = app.add_subcommand("gradcheck", "Compare analytic and finite-difference gradients");
  grad_cmd->add_option("--trials", grad_opts.trials, "Random instances");
  grad_cmd->add_option("--seed", grad_opts.seed, "Seed");
  grad_cmd->add_option("--step", grad_opts.step, "Finite-difference step");

  // oracle
  sp::OracleOptions oracle_opts;
  auto* oracle_cmd = app.add_subcommand("oracle", "Compare parse-graph inference with enumeration");
  oracle_cmd->add_option("--trials", oracle_opts.trials, "Random instances");
  oracle_cmd->add_option("--seed", oracle_opts.seed, "Seed");

  // score
  std::string score_detections;
  std::string score_checkpoint;
  std::string score_weights;
  std::string score_config;
  auto* score_cmd = app.add_subcommand("score", "Emit one pain report per frame");
  score_cmd->add_option("--detections", score_detections, "Detection file")->required();
  score_cmd->add_option("--checkpoint", score_checkpoint, "Trained checkpoint")->required();
  score_cmd->add_option("--weights", score_weights, "Weight table file");
  score_cmd->add_option("--config", score_config, "Engine config file");

  // track
  std::string track_frames;
  std::string track_checkpoint;
  std::string track_weights;
  std::string track_config;
  auto* track_cmd = app.add_subcommand("track", "Emit the pain score time series");
  track_cmd->add_option("--frames", track_frames, "Detection file, one frame per frame_id")
      ->required();
  track_cmd->add_option("--checkpoint", track_checkpoint, "Trained checkpoint")->required();
  track_cmd->add_option("--weights", track_weights, "Weight table file");
  track_cmd->add_option("--config", track_config, "Engine config file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    nlohmann::ordered_json j;
    j["error"] = "usage";
    j["message"] = e.what();
    std::cerr << j.dump() << '\n';
    return 1;
  }

  try {
    if (*validate_cmd) {
      const auto cfg = load_config(validate_config);
      auto in = open_in(validate_path);
      sp::ParseOptions opts;
      opts.permissive = permissive;
      opts.pains = cfg.pains;
      const auto result = sp::parse_detections(in, opts);
      for (const auto& reason : result.skipped_reasons) note("skipped: " + reason);
      const auto frames = sp::group_frames(result.detections);
      std::cout << "valid detections=" << result.detections.size()
                << " frames=" << frames.size() << " skipped=" << result.skipped << '\n';
      return 0;
    }

    if (*gen_cmd) {
      if (!gen_scenario.empty()) {
        sp::ScenarioOptions opts;
        opts.days = gen_days;
        opts.frames_per_day = gen_frames_per_day;
        opts.trend = sp::parse_trend(gen_scenario);
        opts.noise = gen_noise;
        const auto frames = sp::generate_monitoring_scenario(gen_seed, opts);
        auto out = open_out(gen_out);
        for (const auto& f : frames) sp::write_detections(out, f.detections);
        note("wrote " + std::to_string(frames.size()) + " frames to " + gen_out);
        return 0;
      }
      const auto samples = sp::generate_dataset(gen_seed, gen_samples, gen_separation);
      auto out = open_out(gen_out);
      sp::write_dataset_detections(out, samples);
      auto labels = open_out(gen_out + ".labels");
      sp::write_dataset_labels(labels, samples);
      note("wrote " + std::to_string(samples.size()) + " samples to " + gen_out + " and " +
           gen_out + ".labels");
      return 0;
    }

    if (*train_cmd) {
      const auto cfg = load_config(train_config);
      auto det_in = open_in(train_data);
      auto lab_in = open_in(train_data + ".labels");
      const auto samples = sp::read_dataset(det_in, lab_in);
      note("training on " + std::to_string(samples.size()) + " samples");
      const auto fit = sp::fit_model(samples, cfg.train, cfg.dims, cfg.prior, cfg.edge_fit);
      {
        std::ostringstream msg;
        msg << "edge scorer accuracy " << std::fixed << std::setprecision(4) << fit.edge_accuracy;
        note(msg.str());
      }
      auto out = open_out(train_out);
      sp::write_checkpoint(out, {fit.params, cfg.train});
      std::cout << "epoch\tloss\taccuracy\n" << std::fixed << std::setprecision(6);
      for (std::size_t e = 0; e < fit.history.epochs.size(); ++e) {
        std::cout << (e + 1) << '\t' << fit.history.epochs[e].mean_loss << '\t'
                  << fit.history.epochs[e].accuracy << '\n';
      }
      return 0;
    }

    if (*grad_cmd) {
      const auto report = sp::run_gradient_check(grad_opts);
      std::cout << "max_relative_error=" << std::scientific << std::setprecision(3)
                << report.max_relative_error << " trials=" << report.trials
                << " checked=" << report.checked << " skipped=" << report.skipped << '\n';
      if (!report.passed()) {
        std::ostringstream msg;
        msg << "gradient check failed: max relative error " << report.max_relative_error
            << " >= " << report.tolerance;
        throw sp::Error(sp::ErrorKind::oracle, msg.str());
      }
      return 0;
    }

    if (*oracle_cmd) {
      const auto report = sp::run_parse_graph_oracle(oracle_opts);
      std::cout << "instances=" << report.instances << " mismatches=" << report.mismatches << '\n';
      if (!report.passed()) {
        throw sp::Error(sp::ErrorKind::oracle,
                        std::to_string(report.mismatches) + " parse graph mismatches");
      }
      return 0;
    }

    if (*score_cmd) {
      const auto cfg = load_config(score_config);
      const auto cp = load_checkpoint(score_checkpoint);
      const auto weights = load_weights(score_weights, cfg, cp.params.num_clusters());
      const auto detections = load_detections(score_detections, cfg);
      std::size_t frame_index = 0;
      for (const auto& frame : sp::group_frames(detections)) {
        const auto kept = sp::filter_confidence(frame.detections, cfg.confidence_threshold);
        const auto frame_id = frame.detections.front().frame_id;
        ++frame_index;
        if (kept.empty()) {
          note("frame " + std::to_string(frame_id) + ": no detections above threshold");
          std::cout << sp::report_json(sp::PainReport{}, frame_id, frame.timestamp) << '\n';
          continue;
        }
        const auto report = sp::score_face(kept, cp.params, weights, cfg.prior);
        std::cout << sp::report_json(report, frame_id, frame.timestamp) << '\n';
      }
      note("scored " + std::to_string(frame_index) + " frames");
      return 0;
    }

    if (*track_cmd) {
      const auto cfg = load_config(track_config);
      const auto cp = load_checkpoint(track_checkpoint);
      const auto weights = load_weights(track_weights, cfg, cp.params.num_clusters());
      auto frames = sp::group_frames(load_detections(track_frames, cfg));
      for (auto& f : frames) f.detections = sp::filter_confidence(f.detections, cfg.confidence_threshold);
      const auto series = sp::track_tps(frames, cp.params, weights, cfg.prior);
      std::cout << sp::tps_table(series);
      return 0;
    }
  } catch (const sp::Error& e) {
    report_error(e);
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    report_error(sp::Error(sp::ErrorKind::validation, e.what()));
    return 1;
  }
  return 0;
}
