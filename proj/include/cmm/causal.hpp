#pragma once
// Causal algebra over differentiable nodes: log-harmonic fusion,
// no-treatment conditions, total / natural-direct / total-indirect effects,
// mode determination and the switchable total indirect effect.
//
// All functions are pure given (tape, inputs) and record onto the inputs'
// tape, so every quantity participates in training.

#include "cmm/tape.hpp"

namespace cmm {

// Number of classes: index 0 = background, index 1 = pedestrian.
inline constexpr std::size_t kClasses = 2;
inline constexpr std::size_t kBackground = 0;
inline constexpr std::size_t kPedestrian = 1;

// Per-class logits from the three branches (fusion, RGB, thermal).
struct PredictionTriple {
  Var y_m;
  Var y_r;
  Var y_t;
};

// Learnable scalar logits, one per branch, shared across classes.
struct NoTreatment {
  Var c_m;
  Var c_r;
  Var c_t;
};

struct CausalEffects {
  Var te;      // per-class
  Var nde;     // per-class
  Var tie;     // per-class, identically te - nde
  Var k_mode;  // scalar in [-1, 1]
  Var stie;    // per-class
};

// ln(sigmoid(z)) computed as -softplus(-z); stable for z << 0.
Var log_sigmoid(Tape& t, Var z);

// Fused score: ln s(y_m[c]) + ln s(y_r[c]) + ln s(y_t[c]). Inputs may be
// any mix of per-class vectors and scalars (scalars broadcast).
Var log_harmonic(Tape& t, Var y_m, Var y_r, Var y_t);

// log_harmonic of the three constants; scalar, class-constant by construction.
Var no_treatment_score(Tape& t, const NoTreatment& nt);

Var total_effect(Tape& t, const PredictionTriple& triple, const NoTreatment& nt);

// Thermal direct effect: blocks X_R and M at their no-treatment values.
Var natural_direct_effect(Tape& t, Var y_t, const NoTreatment& nt);

Var total_indirect_effect(Tape& t, Var te, Var nde);

// Sharpened class distribution: softmax(ln(softmax(y)) / tau). Logits are
// mapped through a softmax first so the log argument is a probability.
Var mode_distribution(Tape& t, Var y, double tau);

// K = (pi_r[ped] - pi_r[bg]) * (pi_t[ped] - pi_t[bg]).
Var k_mode(Tape& t, Var pi_r, Var pi_t);

// sTIE = te - relu(-k) * nde. With hard one-hot gates this selects the
// te branch at k = 1 and the tie branch at k = -1 bit-exactly.
Var switchable_tie(Tape& t, Var te, Var nde, Var k);

// Chains the above: effects of one sample given branch logits, constants
// and temperature. `harden_gate` thresholds k to sign(k) (+1 at k = 0)
// before gating; training always uses the soft gate.
CausalEffects causal_effects(Tape& t, const PredictionTriple& triple,
                             const NoTreatment& nt, double tau,
                             bool harden_gate = false);

}  // namespace cmm
