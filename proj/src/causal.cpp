#include "cmm/causal.hpp"

#include <stdexcept>

namespace cmm {

Var log_sigmoid(Tape& t, Var z) { return t.neg(t.softplus(t.neg(z))); }

Var log_harmonic(Tape& t, Var y_m, Var y_r, Var y_t) {
  const std::size_t nm = y_m.size(), nr = y_r.size(), nt = y_t.size();
  const auto bad = [](std::size_t n) { return n != 1 && n != kClasses; };
  if (bad(nm) || bad(nr) || bad(nt))
    throw std::invalid_argument("log_harmonic: branch length must be 1 or C");
  return t.add(t.add(log_sigmoid(t, y_m), log_sigmoid(t, y_r)),
               log_sigmoid(t, y_t));
}

Var no_treatment_score(Tape& t, const NoTreatment& nt) {
  return log_harmonic(t, nt.c_m, nt.c_r, nt.c_t);
}

Var total_effect(Tape& t, const PredictionTriple& triple, const NoTreatment& nt) {
  return t.sub(log_harmonic(t, triple.y_m, triple.y_r, triple.y_t),
               no_treatment_score(t, nt));
}

Var natural_direct_effect(Tape& t, Var y_t, const NoTreatment& nt) {
  return t.sub(log_harmonic(t, nt.c_m, nt.c_r, y_t), no_treatment_score(t, nt));
}

Var total_indirect_effect(Tape& t, Var te, Var nde) {
  if (te.size() != nde.size())
    throw std::invalid_argument("total_indirect_effect: length mismatch");
  return t.sub(te, nde);
}

Var mode_distribution(Tape& t, Var y, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("mode_distribution: tau must be > 0");
  Var p = t.softmax(y);
  return t.softmax(t.affine(t.ln(p), 1.0 / tau, 0.0));
}

Var k_mode(Tape& t, Var pi_r, Var pi_t) {
  Var dr = t.sub(t.pick(pi_r, kPedestrian), t.pick(pi_r, kBackground));
  Var dt = t.sub(t.pick(pi_t, kPedestrian), t.pick(pi_t, kBackground));
  return t.mul(dr, dt);
}

Var switchable_tie(Tape& t, Var te, Var nde, Var k) {
  Var gate = t.relu(t.neg(k));
  return t.sub(te, t.mul(gate, nde));
}

CausalEffects causal_effects(Tape& t, const PredictionTriple& triple,
                             const NoTreatment& nt, double tau,
                             bool harden_gate) {
  CausalEffects e;
  e.te = total_effect(t, triple, nt);
  e.nde = natural_direct_effect(t, triple.y_t, nt);
  e.tie = total_indirect_effect(t, e.te, e.nde);
  Var pi_r = mode_distribution(t, triple.y_r, tau);
  Var pi_t = mode_distribution(t, triple.y_t, tau);
  e.k_mode = k_mode(t, pi_r, pi_t);
  Var k = e.k_mode;
  if (harden_gate) {
    // Sign thresholding; k = 0 stays in common mode (relu(-0) = 0).
    k = t.input(e.k_mode.scalar() < 0.0 ? -1.0 : 1.0);
  }
  e.stie = switchable_tie(t, e.te, e.nde, k);
  return e;
}

}  // namespace cmm
