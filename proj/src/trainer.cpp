#include "cmm/trainer.hpp"

#include <cmath>
#include <fstream>
#include <numeric>

#include "cmm/rng.hpp"

namespace cmm {

std::vector<EpochLoss> train(CmmModel& model, const Dataset& data,
                             const TrainConfig& cfg) {
  if (data.samples.empty()) throw std::invalid_argument("train: empty dataset");
  if (!(cfg.learning_rate >= 0.0))
    throw std::invalid_argument("train: learning_rate must be >= 0");
  if (cfg.batch_size < 1)
    throw std::invalid_argument("train: batch_size must be >= 1");
  for (const auto& sm : data.samples)
    if (sm.x_r.size() != model.d || sm.x_t.size() != model.d)
      throw std::invalid_argument("train: dataset dimension mismatch");

  const std::size_t n = data.samples.size();
  auto params = model.parameter_ptrs();
  std::vector<double> velocity(params.size(), 0.0);

  Rng shuffle_rng = Rng(cfg.seed).split(1);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  std::vector<EpochLoss> trace;
  Tape tape;
  std::size_t step = 0;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (cfg.shuffle) {
      // Fisher-Yates from the seeded stream.
      for (std::size_t i = n - 1; i > 0; --i) {
        const std::size_t j = shuffle_rng.below(i + 1);
        std::swap(order[i], order[j]);
      }
    }
    EpochLoss ep{epoch, 0.0, 0.0, 0.0, 0.0};
    for (std::size_t start = 0; start < n; start += cfg.batch_size, ++step) {
      const std::size_t bsz = std::min(cfg.batch_size, n - start);
      tape.clear();
      ModelVars mv = record_params(tape, model);
      Var sum_cmm{}, sum_rgb{}, sum_thermal{};
      for (std::size_t b = 0; b < bsz; ++b) {
        const Sample& sm = data.samples[order[start + b]];
        ForwardResult fr = forward(tape, model, mv, sm.x_r, sm.x_t);
        LossBreakdown lb = ablation_loss(tape, cfg.strategy, fr.triple,
                                         fr.effects, sm.label);
        sum_cmm = b == 0 ? lb.l_cmm : tape.add(sum_cmm, lb.l_cmm);
        sum_rgb = b == 0 ? lb.l_rgb : tape.add(sum_rgb, lb.l_rgb);
        sum_thermal = b == 0 ? lb.l_thermal : tape.add(sum_thermal, lb.l_thermal);
      }
      const double inv = 1.0 / static_cast<double>(bsz);
      Var mean_total = tape.affine(
          tape.add(tape.add(sum_cmm, sum_rgb), sum_thermal), inv, 0.0);
      const double loss = mean_total.scalar();
      if (!std::isfinite(loss)) {
        double norm2 = 0.0;
        for (const double* p : params) norm2 += *p * *p;
        throw TrainError("non-finite loss at step " + std::to_string(step) +
                         " (epoch " + std::to_string(epoch) +
                         "), parameter norm " + std::to_string(std::sqrt(norm2)));
      }
      ep.l_cmm += sum_cmm.scalar();
      ep.l_rgb += sum_rgb.scalar();
      ep.l_thermal += sum_thermal.scalar();

      tape.backward(mean_total);
      std::size_t pi = 0;
      for (Var leaf : mv.leaves) {
        for (const double g : tape.adjoint(leaf)) {
          velocity[pi] = cfg.momentum * velocity[pi] - cfg.learning_rate * g;
          *params[pi] += velocity[pi];
          ++pi;
        }
      }
    }
    ep.l_cmm /= static_cast<double>(n);
    ep.l_rgb /= static_cast<double>(n);
    ep.l_thermal /= static_cast<double>(n);
    ep.l_total = ep.l_cmm + ep.l_rgb + ep.l_thermal;
    trace.push_back(ep);

    if (!cfg.checkpoint_prefix.empty() && cfg.checkpoint_every > 0 &&
        (epoch + 1) % cfg.checkpoint_every == 0) {
      char buf[16];
      std::snprintf(buf, sizeof buf, ".ep%03zu", epoch + 1);
      save_checkpoint(model, cfg.checkpoint_prefix + buf + ".json");
    }
  }
  if (!cfg.checkpoint_prefix.empty())
    save_checkpoint(model, cfg.checkpoint_prefix + ".json");
  return trace;
}

void save_loss_trace(const std::vector<EpochLoss>& trace,
                     const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write loss trace: " + path);
  out << "epoch,l_cmm,l_rgb,l_thermal,l_total\n";
  out.precision(17);
  for (const auto& e : trace)
    out << e.epoch << ',' << e.l_cmm << ',' << e.l_rgb << ',' << e.l_thermal
        << ',' << e.l_total << '\n';
}

}  // namespace cmm
