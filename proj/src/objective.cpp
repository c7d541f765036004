#include "cmm/objective.hpp"

#include <stdexcept>

namespace cmm {

Strategy strategy_from_string(const std::string& name) {
  if (name == "baseline" || name == "BASELINE_TE") return Strategy::kBaselineTe;
  if (name == "te" || name == "TE_TRAIN") return Strategy::kTeTrain;
  if (name == "tie" || name == "TIE_TRAIN") return Strategy::kTieTrain;
  if (name == "stie" || name == "STIE") return Strategy::kStie;
  throw std::invalid_argument("unknown strategy: " + name);
}

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::kBaselineTe: return "baseline";
    case Strategy::kTeTrain: return "te";
    case Strategy::kTieTrain: return "tie";
    case Strategy::kStie: return "stie";
  }
  throw std::invalid_argument("unknown strategy value");
}

Var cross_entropy(Tape& t, Var scores, std::size_t label) {
  if (label >= scores.size())
    throw std::invalid_argument("cross_entropy: label out of range");
  return t.sub(t.logsumexp(scores), t.pick(scores, label));
}

Var cmm_loss(Tape& t, const CausalEffects& effects, std::size_t label) {
  return cross_entropy(t, effects.stie, label);
}

LossBreakdown classification_loss(Tape& t, const PredictionTriple& triple,
                                  const CausalEffects& effects,
                                  std::size_t label) {
  LossBreakdown b;
  b.l_cmm = cmm_loss(t, effects, label);
  b.l_rgb = cross_entropy(t, triple.y_r, label);
  b.l_thermal = cross_entropy(t, triple.y_t, label);
  b.l_cls = t.add(t.add(b.l_cmm, b.l_rgb), b.l_thermal);
  b.l_total = b.l_cls;  // L_bbox = L_model = 0 in this artifact
  return b;
}

LossBreakdown ablation_loss(Tape& t, Strategy strategy,
                            const PredictionTriple& triple,
                            const CausalEffects& effects, std::size_t label) {
  LossBreakdown b;
  switch (strategy) {
    case Strategy::kBaselineTe:
    case Strategy::kTeTrain:
      b.l_cmm = cross_entropy(t, effects.te, label);
      break;
    case Strategy::kTieTrain:
      b.l_cmm = cross_entropy(t, effects.tie, label);
      break;
    case Strategy::kStie:
      b.l_cmm = cmm_loss(t, effects, label);
      break;
    default:
      throw std::invalid_argument("ablation_loss: unknown strategy");
  }
  b.l_rgb = cross_entropy(t, triple.y_r, label);
  b.l_thermal = cross_entropy(t, triple.y_t, label);
  b.l_cls = t.add(t.add(b.l_cmm, b.l_rgb), b.l_thermal);
  b.l_total = b.l_cls;
  return b;
}

Var inference_scores(Strategy strategy, const CausalEffects& effects) {
  switch (strategy) {
    case Strategy::kBaselineTe: return effects.te;
    case Strategy::kTeTrain:
    case Strategy::kTieTrain: return effects.tie;
    case Strategy::kStie: return effects.stie;
  }
  throw std::invalid_argument("inference_scores: unknown strategy");
}

}  // namespace cmm
