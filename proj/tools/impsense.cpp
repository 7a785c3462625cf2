#include <cstdio>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "impsense/commands.hpp"

namespace fs = std::filesystem;
using impsense::pipeline::PipelineConfig;

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  std::string input_dir;
};

void add_common(CLI::App* cmd, Common& c, bool with_input) {
  cmd->add_option("--config", c.config, "JSON config file");
  cmd->add_option("--seed", c.seed, "Master seed (overrides the config)");
  cmd->add_option("--out-dir", c.out_dir, "Directory for outputs and the run manifest");
  if (with_input) cmd->add_option("--input-dir", c.input_dir, "Dataset directory (overrides the config)");
}

PipelineConfig resolve(const Common& c) {
  PipelineConfig cfg = c.config.empty() ? PipelineConfig{} : PipelineConfig::load(c.config);
  if (c.seed) cfg.seed = *c.seed;
  if (!c.input_dir.empty()) cfg.input_dir = c.input_dir;
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Impersonator detection on social media profiles and posts"};
  app.require_subcommand(1);

  Common synth_opts, identify_opts, cluster_opts, train_opts, eval_opts, predict_opts;
  std::optional<std::uint64_t> train_balance_seed, eval_balance_seed;
  std::string separability;
  std::string model_dir, posts;

  auto* synth = app.add_subcommand("synth", "Generate a labeled synthetic dataset");
  add_common(synth, synth_opts, false);
  synth->add_option("--separability", separability, "easy or hard")->check(CLI::IsMember({"easy", "hard"}));
  auto* identify = app.add_subcommand("identify", "Score candidate profiles against the genuine accounts");
  add_common(identify, identify_opts, true);
  auto* cluster = app.add_subcommand("cluster", "Cluster identified impersonators into bots and fans");
  add_common(cluster, cluster_opts, true);
  auto* train = app.add_subcommand("train", "Train the post classifier on all labeled posts");
  add_common(train, train_opts, true);
  train->add_option("--balance-seed", train_balance_seed, "Seed for SMOTE and under-sampling");
  auto* evaluate = app.add_subcommand("eval", "Benchmark RF+TF-IDF, post-only and post+profile models");
  add_common(evaluate, eval_opts, true);
  evaluate->add_option("--balance-seed", eval_balance_seed, "Seed for SMOTE and under-sampling");
  auto* predict = app.add_subcommand("predict", "Label posts as bot, fan or genuine");
  add_common(predict, predict_opts, true);
  predict->add_option("--model-dir", model_dir, "Output directory of a train run (default: --out-dir)");
  predict->add_option("--posts", posts, "Posts JSONL to score")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  namespace cmd = impsense::commands;
  try {
    if (*synth) {
      PipelineConfig cfg = resolve(synth_opts);
      if (!separability.empty()) {
        const auto sep = separability == "hard" ? impsense::synth::Separability::hard : impsense::synth::Separability::easy;
        auto g = impsense::synth::GeneratorConfig::defaults(sep);
        g.n_genuine = cfg.generator.n_genuine;
        g.n_fan = cfg.generator.n_fan;
        g.n_bot = cfg.generator.n_bot;
        g.n_posts = cfg.generator.n_posts;
        cfg.generator = g;
      }
      cmd::run_synth(cfg, synth_opts.out_dir);
    } else if (*identify) {
      cmd::run_identify(resolve(identify_opts), identify_opts.out_dir);
    } else if (*cluster) {
      cmd::run_cluster(resolve(cluster_opts), cluster_opts.out_dir);
    } else if (*train) {
      PipelineConfig cfg = resolve(train_opts);
      if (train_balance_seed) cfg.balance_seed = train_balance_seed;
      cmd::run_train(cfg, train_opts.out_dir);
    } else if (*evaluate) {
      PipelineConfig cfg = resolve(eval_opts);
      if (eval_balance_seed) cfg.balance_seed = eval_balance_seed;
      cmd::run_eval(cfg, eval_opts.out_dir);
    } else if (*predict) {
      cmd::run_predict(resolve(predict_opts), predict_opts.out_dir,
                       model_dir.empty() ? fs::path(predict_opts.out_dir) : fs::path(model_dir), posts);
    }
  } catch (const impsense::Error& e) {
    std::fprintf(stderr, "impsense: %s\n", e.what());
    return e.exit_code();
  } catch (const std::filesystem::filesystem_error& e) {
    std::fprintf(stderr, "impsense: %s\n", e.what());
    return 3;
  }
  return 0;
}
