#pragma once
// Loss functions: cross-entropy over causal scores, the Causal Mode
// Multiplexing loss, uni-modal auxiliary losses, the reduced total
// objective, and the ablation-strategy variants.

#include <string>

#include "cmm/causal.hpp"
#include "cmm/tape.hpp"

namespace cmm {

enum class Strategy {
  kBaselineTe,  // train TE,   infer TE
  kTeTrain,     // train TE,   infer TIE   ("TE+TIE")
  kTieTrain,    // train TIE,  infer TIE   ("TIE+TIE")
  kStie,        // train sTIE, infer sTIE
};

Strategy strategy_from_string(const std::string& name);
std::string to_string(Strategy s);

struct LossBreakdown {
  Var l_cmm;      // main term (te / tie / stie cross-entropy, per strategy)
  Var l_rgb;
  Var l_thermal;
  Var l_cls;      // l_cmm + l_rgb + l_thermal
  Var l_total;    // == l_cls here: bbox and model terms are fixed to zero
};

// -ln(softmax(scores)[label]) via the log-sum-exp form.
Var cross_entropy(Tape& t, Var scores, std::size_t label);

// Cross-entropy over the switchable total indirect effect.
Var cmm_loss(Tape& t, const CausalEffects& effects, std::size_t label);

// Main term + the two uni-modal auxiliary terms.
LossBreakdown classification_loss(Tape& t, const PredictionTriple& triple,
                                  const CausalEffects& effects,
                                  std::size_t label);

// Same breakdown with the main term chosen by strategy. The uni-modal
// auxiliary terms are included for every strategy (they feed mode
// determination).
LossBreakdown ablation_loss(Tape& t, Strategy strategy,
                            const PredictionTriple& triple,
                            const CausalEffects& effects, std::size_t label);

// Score vector used at inference for a strategy (te, tie or stie).
Var inference_scores(Strategy strategy, const CausalEffects& effects);

}  // namespace cmm
