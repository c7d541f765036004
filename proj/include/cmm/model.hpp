#pragma once
// The three trainable heads (fusion, RGB, thermal) plus the no-treatment
// constants, composed into one differentiable forward pass.

#include <cstdint>
#include <string>
#include <vector>

#include "cmm/causal.hpp"
#include "cmm/tape.hpp"

namespace cmm {

inline constexpr int kCheckpointVersion = 1;

// One dense layer, row-major weights [out x in].
struct Layer {
  std::size_t out = 0;
  std::size_t in = 0;
  std::vector<double> w;
  std::vector<double> b;
};

// MLP with relu between layers; final layer is linear with out = kClasses.
struct MlpParams {
  std::vector<Layer> layers;
};

struct CmmModel {
  std::size_t d = 0;                 // per-modality feature dimension
  std::vector<std::size_t> hidden;   // hidden widths shared by all heads
  double tau = 0.0;
  std::uint64_t seed = 0;

  MlpParams fusion_net;   // input 2d
  MlpParams rgb_net;      // input d
  MlpParams thermal_net;  // input d
  double c_m = 0.0, c_r = 0.0, c_t = 0.0;  // no-treatment constants

  std::size_t parameter_count() const;
  // Flattened view in a fixed order (fusion, rgb, thermal layers, then the
  // three constants); used by the trainer and gradient checks.
  std::vector<double*> parameter_ptrs();
  std::vector<const double*> parameter_ptrs() const;
};

// Nodes for one model instance on a tape, parameters as leaves.
struct ModelVars {
  std::vector<Var> fusion;   // w0, b0, w1, b1, ...
  std::vector<Var> rgb;
  std::vector<Var> thermal;
  NoTreatment nt;

  // Leaves in the same order as CmmModel::parameter_ptrs element groups.
  std::vector<Var> leaves;
};

struct ForwardResult {
  PredictionTriple triple;
  CausalEffects effects;
};

// Weights ~ uniform(-1/sqrt(fan_in), +1/sqrt(fan_in)) from the seeded PRNG,
// except each head's output layer which starts at zero so every branch
// emits zero logits initially and the mode gate starts closed (K = 0).
// Biases and no-treatment constants start at zero.
CmmModel init_model(std::uint64_t seed, std::size_t d,
                    const std::vector<std::size_t>& hidden, double tau);

// Records the model's parameters as leaves on the tape.
ModelVars record_params(Tape& t, const CmmModel& m);

// Runs one sample through the three heads and the causal head. x_r and x_t
// must have length model.d.
ForwardResult forward(Tape& t, const CmmModel& m, const ModelVars& mv,
                      std::span<const double> x_r, std::span<const double> x_t,
                      bool harden_gate = false);

// MLP forward given parameter vars laid out as {w0, b0, w1, b1, ...}.
Var mlp_forward(Tape& t, const MlpParams& shape, const std::vector<Var>& params,
                Var x);

// Checkpoint I/O: self-describing JSON with version, PRNG algorithm id,
// seed, tau, dimensions and all parameter arrays in row-major order.
void save_checkpoint(const CmmModel& m, const std::string& path);
CmmModel load_checkpoint(const std::string& path);

}  // namespace cmm
