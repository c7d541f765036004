// Command-line entry point: gen | train | eval | ablate | verify.
//
// Exit codes: 0 success, 1 runtime/verification failure, 2 usage error.
// CMM_SEED overrides the default seed; an explicit --seed flag wins over it.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cmm/evaluator.hpp"
#include "cmm/kernels.hpp"
#include "cmm/model.hpp"
#include "cmm/objective.hpp"
#include "cmm/rng.hpp"
#include "cmm/selfcheck.hpp"
#include "cmm/synthgen.hpp"
#include "cmm/trainer.hpp"

namespace fs = std::filesystem;

namespace {

std::uint64_t default_seed() {
  if (const char* env = std::getenv("CMM_SEED"))
    return std::strtoull(env, nullptr, 10);
  return 0;
}

void print_split_counts(const char* name, const cmm::Dataset& ds) {
  std::map<cmm::Regime, std::size_t> counts;
  for (const auto& sm : ds.samples) counts[sm.regime]++;
  std::printf("%-10s n=%zu  ROTO=%zu RXTO=%zu ROTX=%zu\n", name,
              ds.samples.size(), counts[cmm::Regime::kRoto],
              counts[cmm::Regime::kRxto], counts[cmm::Regime::kRotx]);
}

struct MixOpt {
  double a = -1.0, b = 0.0, c = 0.0;
  bool set = false;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Causal Mode Multiplexer - synthetic multispectral pipeline"};
  app.require_subcommand(1);

  // ---- gen ----------------------------------------------------------------
  auto* gen = app.add_subcommand(
      "gen", "Generate the standard splits (or one custom-mix dataset)");
  std::string gen_out = "data";
  std::uint64_t gen_seed = default_seed();
  cmm::GenConfig gen_cfg;
  MixOpt mix;
  gen->add_option("--out", gen_out, "Output directory")->capture_default_str();
  gen->add_option("--seed", gen_seed, "Root seed")->capture_default_str();
  gen->add_option("--d", gen_cfg.d, "Feature dimension per modality")
      ->capture_default_str();
  gen->add_option("--n", gen_cfg.n, "Sample count (custom mix only)")
      ->capture_default_str();
  gen->add_option("--signal", gen_cfg.signal_strength, "Signal strength s")
      ->capture_default_str();
  gen->add_option("--sigma", gen_cfg.noise_sigma, "Noise sigma")
      ->capture_default_str();
  gen->add_option("--tboost", gen_cfg.thermal_boost,
                  "Thermal signal scale relative to RGB")
      ->capture_default_str();
  gen->add_option("--atten", gen_cfg.rgb_night_atten,
                  "RGB attenuation in RXTO (0 = pure noise)")
      ->capture_default_str();
  std::vector<double> mix_vals;
  gen->add_option("--mix", mix_vals,
                  "ROTO,RXTO,ROTX mix; generates one dataset instead of the "
                  "standard splits")
      ->expected(3)
      ->delimiter(',');

  // ---- train --------------------------------------------------------------
  auto* train_cmd = app.add_subcommand("train", "Train one strategy");
  std::string train_data, train_out = "model";
  std::string train_strategy = "stie";
  std::uint64_t train_seed = default_seed();
  cmm::TrainConfig train_cfg;
  double train_tau = 1.0;
  std::vector<std::size_t> train_hidden = {16};
  train_cmd->add_option("--data", train_data, "Training dataset (.jsonl)")
      ->required();
  train_cmd->add_option("--strategy", train_strategy,
                        "baseline | te | tie | stie")
      ->capture_default_str();
  train_cmd->add_option("--seed", train_seed, "Seed (init + shuffling)")
      ->capture_default_str();
  train_cmd->add_option("--out", train_out, "Checkpoint prefix")
      ->capture_default_str();
  train_cmd->add_option("--epochs", train_cfg.epochs)->capture_default_str();
  train_cmd->add_option("--lr", train_cfg.learning_rate)->capture_default_str();
  train_cmd->add_option("--batch", train_cfg.batch_size)->capture_default_str();
  train_cmd->add_option("--momentum", train_cfg.momentum)->capture_default_str();
  train_cmd->add_option("--tau", train_tau, "Gate temperature")
      ->capture_default_str();
  train_cmd->add_option("--hidden", train_hidden, "Hidden layer widths")
      ->capture_default_str();
  train_cmd
      ->add_option("--checkpoint-every", train_cfg.checkpoint_every,
                   "Also write a checkpoint every k epochs")
      ->capture_default_str();

  // ---- eval ---------------------------------------------------------------
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint");
  std::string eval_ckpt, eval_data, eval_strategy = "stie", eval_pr_out;
  eval_cmd->add_option("--model", eval_ckpt, "Checkpoint path")->required();
  eval_cmd->add_option("--data", eval_data, "Dataset (.jsonl)")->required();
  eval_cmd->add_option("--strategy", eval_strategy, "baseline | te | tie | stie")
      ->capture_default_str();
  eval_cmd->add_option("--pr-out", eval_pr_out,
                       "Write per-threshold precision/recall points CSV");

  // ---- ablate -------------------------------------------------------------
  auto* ablate = app.add_subcommand(
      "ablate", "Train and evaluate all four strategies across seeds");
  std::string ablate_out = "reports";
  cmm::AblationConfig ab;
  ab.root_seed = default_seed();
  std::size_t ablate_runs = 1;
  ablate->add_option("--seed", ab.root_seed, "Root seed")->capture_default_str();
  ablate->add_option("--runs", ablate_runs, "Number of seeds")
      ->capture_default_str();
  ablate->add_option("--out", ablate_out, "Output directory")
      ->capture_default_str();
  ablate->add_option("--signal", ab.gen.signal_strength)->capture_default_str();
  ablate->add_option("--sigma", ab.gen.noise_sigma)->capture_default_str();
  ablate->add_option("--tboost", ab.gen.thermal_boost)->capture_default_str();
  ablate->add_option("--atten", ab.gen.rgb_night_atten)->capture_default_str();
  ablate->add_option("--d", ab.gen.d)->capture_default_str();
  ablate->add_option("--epochs", ab.train.epochs)->capture_default_str();
  ablate->add_option("--lr", ab.train.learning_rate)->capture_default_str();
  ablate->add_option("--batch", ab.train.batch_size)->capture_default_str();
  ablate->add_option("--tau", ab.tau)->capture_default_str();
  ablate->add_option("--hidden", ab.hidden)->capture_default_str();

  // ---- verify ---------------------------------------------------------
  app.add_subcommand("verify", "Run the invariant suites");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      fs::create_directories(gen_out);
      if (!mix_vals.empty()) {
        gen_cfg.mix = {mix_vals[0], mix_vals[1], mix_vals[2]};
        gen_cfg.seed = gen_seed;
        cmm::Dataset ds = cmm::generate(gen_cfg);
        cmm::save_dataset(ds, gen_out + "/dataset.jsonl");
        print_split_counts("dataset", ds);
      } else {
        cmm::StandardSplits sp = cmm::standard_splits(gen_seed, gen_cfg);
        cmm::save_dataset(sp.train, gen_out + "/train.jsonl");
        cmm::save_dataset(sp.test_roto, gen_out + "/test_roto.jsonl");
        cmm::save_dataset(sp.test_rxto, gen_out + "/test_rxto.jsonl");
        cmm::save_dataset(sp.test_rotx, gen_out + "/test_rotx.jsonl");
        print_split_counts("train", sp.train);
        print_split_counts("test_roto", sp.test_roto);
        print_split_counts("test_rxto", sp.test_rxto);
        print_split_counts("test_rotx", sp.test_rotx);
      }
      return 0;
    }

    if (train_cmd->parsed()) {
      cmm::Dataset data = cmm::load_dataset(train_data);
      train_cfg.strategy = cmm::strategy_from_string(train_strategy);
      train_cfg.seed = train_seed;
      train_cfg.checkpoint_prefix = train_out;
      cmm::CmmModel model =
          cmm::init_model(train_seed, data.config.d, train_hidden, train_tau);
      const auto trace = cmm::train(model, data, train_cfg);
      cmm::save_loss_trace(trace, train_out + ".loss.csv");
      std::printf("strategy=%s epochs=%zu final_loss=%.6f -> %s.json\n",
                  train_strategy.c_str(), train_cfg.epochs,
                  trace.back().l_total, train_out.c_str());
      return 0;
    }

    if (eval_cmd->parsed()) {
      cmm::CmmModel model = cmm::load_checkpoint(eval_ckpt);
      cmm::Dataset data = cmm::load_dataset(eval_data);
      const cmm::Strategy s = cmm::strategy_from_string(eval_strategy);
      cmm::SplitMetrics m = cmm::evaluate(model, data, s);
      std::printf("strategy=%s accuracy=%.4f ap=%.4f\n", eval_strategy.c_str(),
                  m.accuracy, m.ap);
      if (!eval_pr_out.empty()) {
        std::vector<int> labels;
        for (const auto& sm : data.samples) labels.push_back(sm.label);
        cmm::save_pr_points_csv(
            cmm::inference_score_column(model, data, s), labels, eval_pr_out);
      }
      return 0;
    }

    if (ablate->parsed()) {
      ab.n_seeds = ablate_runs;
      fs::create_directories(ablate_out);
      cmm::AblationTable table = cmm::run_ablation(ab);
      cmm::save_report_json(table, ablate_out + "/ablation.json");
      cmm::save_report_csv(table, ablate_out + "/ablation.csv");
      std::printf("%-10s %-10s %-10s %-10s   (mean AP over %zu seed%s)\n",
                  "strategy", "test_roto", "test_rxto", "test_rotx",
                  ab.n_seeds, ab.n_seeds == 1 ? "" : "s");
      for (cmm::Strategy s :
           {cmm::Strategy::kBaselineTe, cmm::Strategy::kTeTrain,
            cmm::Strategy::kTieTrain, cmm::Strategy::kStie}) {
        const auto means = table.means(s);
        std::printf("%-10s %-10.4f %-10.4f %-10.4f\n", to_string(s).c_str(),
                    means.at("test_roto").ap, means.at("test_rxto").ap,
                    means.at("test_rotx").ap);
      }
      return 0;
    }

    // verify
    return cmm::selfcheck::run_all() ? 0 : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
