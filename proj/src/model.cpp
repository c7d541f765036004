#include "cmm/model.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "cmm/rng.hpp"

namespace cmm {

using nlohmann::json;

namespace {

MlpParams init_mlp(Rng rng, std::size_t in_dim,
                   const std::vector<std::size_t>& hidden) {
  MlpParams net;
  std::vector<std::size_t> dims;
  dims.push_back(in_dim);
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(kClasses);
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    Layer layer;
    layer.in = dims[l];
    layer.out = dims[l + 1];
    layer.w.resize(layer.out * layer.in);
    layer.b.assign(layer.out, 0.0);
    const bool output_layer = (l + 2 == dims.size());
    const double bound = 1.0 / std::sqrt(static_cast<double>(layer.in));
    for (auto& w : layer.w) w = output_layer ? 0.0 : rng.uniform(-bound, bound);
    net.layers.push_back(std::move(layer));
  }
  return net;
}

void collect_ptrs(const MlpParams& net, std::vector<const double*>& out) {
  for (const auto& l : net.layers) {
    for (const auto& w : l.w) out.push_back(&w);
    for (const auto& b : l.b) out.push_back(&b);
  }
}

std::vector<Var> record_mlp(Tape& t, const MlpParams& net) {
  std::vector<Var> vars;
  for (const auto& l : net.layers) {
    vars.push_back(t.input(std::span<const double>(l.w.data(), l.w.size())));
    vars.push_back(t.input(std::span<const double>(l.b.data(), l.b.size())));
  }
  return vars;
}

json mlp_to_json(const MlpParams& net) {
  json layers = json::array();
  for (const auto& l : net.layers)
    layers.push_back({{"out", l.out}, {"in", l.in}, {"w", l.w}, {"b", l.b}});
  return layers;
}

MlpParams mlp_from_json(const json& j) {
  MlpParams net;
  for (const auto& lj : j) {
    Layer l;
    l.out = lj.at("out").get<std::size_t>();
    l.in = lj.at("in").get<std::size_t>();
    l.w = lj.at("w").get<std::vector<double>>();
    l.b = lj.at("b").get<std::vector<double>>();
    if (l.w.size() != l.out * l.in || l.b.size() != l.out)
      throw std::runtime_error("checkpoint: layer shape mismatch");
    net.layers.push_back(std::move(l));
  }
  return net;
}

}  // namespace

std::size_t CmmModel::parameter_count() const {
  std::size_t n = 3;  // no-treatment constants
  for (const auto* net : {&fusion_net, &rgb_net, &thermal_net})
    for (const auto& l : net->layers) n += l.w.size() + l.b.size();
  return n;
}

std::vector<const double*> CmmModel::parameter_ptrs() const {
  std::vector<const double*> out;
  out.reserve(parameter_count());
  collect_ptrs(fusion_net, out);
  collect_ptrs(rgb_net, out);
  collect_ptrs(thermal_net, out);
  out.push_back(&c_m);
  out.push_back(&c_r);
  out.push_back(&c_t);
  return out;
}

std::vector<double*> CmmModel::parameter_ptrs() {
  std::vector<double*> out;
  for (const double* p : std::as_const(*this).parameter_ptrs())
    out.push_back(const_cast<double*>(p));
  return out;
}

CmmModel init_model(std::uint64_t seed, std::size_t d,
                    const std::vector<std::size_t>& hidden, double tau) {
  if (d < 1) throw std::invalid_argument("init_model: d must be >= 1");
  if (!(tau > 0.0)) throw std::invalid_argument("init_model: tau must be > 0");
  CmmModel m;
  m.d = d;
  m.hidden = hidden;
  m.tau = tau;
  m.seed = seed;
  Rng root(seed);
  m.fusion_net = init_mlp(root.split(1), 2 * d, hidden);
  m.rgb_net = init_mlp(root.split(2), d, hidden);
  m.thermal_net = init_mlp(root.split(3), d, hidden);
  return m;
}

ModelVars record_params(Tape& t, const CmmModel& m) {
  ModelVars mv;
  mv.fusion = record_mlp(t, m.fusion_net);
  mv.rgb = record_mlp(t, m.rgb_net);
  mv.thermal = record_mlp(t, m.thermal_net);
  mv.nt.c_m = t.input(m.c_m);
  mv.nt.c_r = t.input(m.c_r);
  mv.nt.c_t = t.input(m.c_t);
  for (const auto* group : {&mv.fusion, &mv.rgb, &mv.thermal})
    mv.leaves.insert(mv.leaves.end(), group->begin(), group->end());
  mv.leaves.push_back(mv.nt.c_m);
  mv.leaves.push_back(mv.nt.c_r);
  mv.leaves.push_back(mv.nt.c_t);
  return mv;
}

Var mlp_forward(Tape& t, const MlpParams& shape, const std::vector<Var>& params,
                Var x) {
  Var h = x;
  for (std::size_t l = 0; l < shape.layers.size(); ++l) {
    const Layer& layer = shape.layers[l];
    if (h.size() != layer.in)
      throw std::invalid_argument("mlp_forward: dimension mismatch");
    Var z = t.add(t.matvec(params[2 * l], h, layer.out, layer.in),
                  params[2 * l + 1]);
    h = (l + 1 < shape.layers.size()) ? t.relu(z) : z;
  }
  return h;
}

ForwardResult forward(Tape& t, const CmmModel& m, const ModelVars& mv,
                      std::span<const double> x_r, std::span<const double> x_t,
                      bool harden_gate) {
  if (x_r.size() != m.d || x_t.size() != m.d)
    throw std::invalid_argument("forward: feature dimension mismatch");
  Var vr = t.input(x_r);
  Var vt = t.input(x_t);
  ForwardResult res;
  res.triple.y_m = mlp_forward(t, m.fusion_net, mv.fusion, t.concat(vr, vt));
  res.triple.y_r = mlp_forward(t, m.rgb_net, mv.rgb, vr);
  res.triple.y_t = mlp_forward(t, m.thermal_net, mv.thermal, vt);
  res.effects = causal_effects(t, res.triple, mv.nt, m.tau, harden_gate);
  return res;
}

void save_checkpoint(const CmmModel& m, const std::string& path) {
  json j;
  j["version"] = kCheckpointVersion;
  j["prng_algo"] = kPrngAlgo;
  j["seed"] = m.seed;
  j["tau"] = m.tau;
  j["d"] = m.d;
  j["hidden"] = m.hidden;
  j["fusion_net"] = mlp_to_json(m.fusion_net);
  j["rgb_net"] = mlp_to_json(m.rgb_net);
  j["thermal_net"] = mlp_to_json(m.thermal_net);
  j["no_treatment"] = {{"c_m", m.c_m}, {"c_r", m.c_r}, {"c_t", m.c_t}};
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  out << j.dump(2) << '\n';
}

CmmModel load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read checkpoint: " + path);
  json j = json::parse(in);
  const int version = j.at("version").get<int>();
  if (version != kCheckpointVersion)
    throw std::runtime_error("checkpoint version mismatch: file has " +
                             std::to_string(version) + ", expected " +
                             std::to_string(kCheckpointVersion));
  const auto algo = j.at("prng_algo").get<std::string>();
  if (algo != kPrngAlgo)
    throw std::runtime_error("checkpoint PRNG algorithm mismatch: " + algo);
  CmmModel m;
  m.seed = j.at("seed").get<std::uint64_t>();
  m.tau = j.at("tau").get<double>();
  m.d = j.at("d").get<std::size_t>();
  m.hidden = j.at("hidden").get<std::vector<std::size_t>>();
  m.fusion_net = mlp_from_json(j.at("fusion_net"));
  m.rgb_net = mlp_from_json(j.at("rgb_net"));
  m.thermal_net = mlp_from_json(j.at("thermal_net"));
  m.c_m = j.at("no_treatment").at("c_m").get<double>();
  m.c_r = j.at("no_treatment").at("c_r").get<double>();
  m.c_t = j.at("no_treatment").at("c_t").get<double>();
  return m;
}

}  // namespace cmm
