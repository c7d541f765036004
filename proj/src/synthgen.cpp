#include "cmm/synthgen.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "cmm/rng.hpp"

namespace cmm {

using nlohmann::json;

std::string to_string(Regime r) {
  switch (r) {
    case Regime::kRoto: return "ROTO";
    case Regime::kRxto: return "RXTO";
    case Regime::kRotx: return "ROTX";
  }
  throw std::invalid_argument("unknown regime value");
}

Regime regime_from_string(const std::string& name) {
  if (name == "ROTO") return Regime::kRoto;
  if (name == "RXTO") return Regime::kRxto;
  if (name == "ROTX") return Regime::kRotx;
  throw std::invalid_argument("unknown regime: " + name);
}

void signal_directions(std::uint64_t seed, std::size_t d,
                       std::vector<double>& u_r, std::vector<double>& u_t) {
  Rng rng = Rng(seed).split(0);
  u_r.resize(d);
  u_t.resize(d);
  for (auto& v : u_r) v = rng.gaussian();
  for (auto& v : u_t) v = rng.gaussian();
  // Gram-Schmidt.
  double nr = 0.0;
  for (double v : u_r) nr += v * v;
  nr = std::sqrt(nr);
  for (auto& v : u_r) v /= nr;
  double proj = 0.0;
  for (std::size_t i = 0; i < d; ++i) proj += u_t[i] * u_r[i];
  for (std::size_t i = 0; i < d; ++i) u_t[i] -= proj * u_r[i];
  double nt = 0.0;
  for (double v : u_t) nt += v * v;
  nt = std::sqrt(nt);
  for (auto& v : u_t) v /= nt;
}

static void validate(const GenConfig& cfg) {
  if (cfg.d < 1) throw std::invalid_argument("gen: d must be >= 1");
  if (!(cfg.signal_strength > 0.0))
    throw std::invalid_argument("gen: signal_strength must be > 0");
  if (!(cfg.thermal_boost > 0.0))
    throw std::invalid_argument("gen: thermal_boost must be > 0");
  if (!(cfg.noise_sigma >= 0.0))
    throw std::invalid_argument("gen: noise_sigma must be >= 0");
  if (cfg.rgb_night_atten < 0.0 || cfg.rgb_night_atten > 1.0)
    throw std::invalid_argument("gen: rgb_night_atten must be in [0, 1]");
  double sum = 0.0;
  for (double p : cfg.mix) {
    if (p < 0.0) throw std::invalid_argument("gen: mix probabilities must be >= 0");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("gen: mix must sum to 1");
}

Dataset generate(const GenConfig& cfg) {
  validate(cfg);
  std::vector<double> u_r, u_t;
  signal_directions(cfg.direction_seed.value_or(cfg.seed), cfg.d, u_r, u_t);
  Rng rng = Rng(cfg.seed).split(1);

  Dataset ds;
  ds.config = cfg;
  ds.samples.reserve(cfg.n);
  const double s_r = cfg.signal_strength;
  const double s_t = cfg.thermal_boost * cfg.signal_strength;
  for (std::size_t i = 0; i < cfg.n; ++i) {
    Sample sm;
    sm.label = rng.uniform01() < 0.5 ? 1 : 0;
    const double u = rng.uniform01();
    sm.regime = u < cfg.mix[0]               ? Regime::kRoto
                : u < cfg.mix[0] + cfg.mix[1] ? Regime::kRxto
                                              : Regime::kRotx;
    sm.x_r.resize(cfg.d);
    sm.x_t.resize(cfg.d);
    for (auto& v : sm.x_r) v = cfg.noise_sigma * rng.gaussian();
    for (auto& v : sm.x_t) v = cfg.noise_sigma * rng.gaussian();
    const double y = static_cast<double>(sm.label);
    double coef_r = 0.0, coef_t = 0.0;
    switch (sm.regime) {
      case Regime::kRoto: coef_r = 1.0; coef_t = 1.0; break;
      case Regime::kRxto: coef_r = cfg.rgb_night_atten; coef_t = 1.0; break;
      case Regime::kRotx: coef_r = 1.0; coef_t = 0.0; break;
    }
    for (std::size_t j = 0; j < cfg.d; ++j) {
      sm.x_r[j] += coef_r * y * s_r * u_r[j];
      sm.x_t[j] += coef_t * y * s_t * u_t[j];
    }
    ds.samples.push_back(std::move(sm));
  }
  return ds;
}

StandardSplits standard_splits(std::uint64_t seed, const GenConfig& base) {
  Rng root(seed);
  const auto sub_seed = [&](std::uint64_t stream) {
    return root.split(stream).next_u64();
  };
  StandardSplits sp;
  GenConfig cfg = base;

  cfg.direction_seed = sub_seed(0);

  cfg.n = 4000;
  cfg.mix = {0.5, 0.5, 0.0};
  cfg.seed = sub_seed(1);
  sp.train = generate(cfg);

  cfg.n = 1000;
  cfg.mix = {1.0, 0.0, 0.0};
  cfg.seed = sub_seed(2);
  sp.test_roto = generate(cfg);

  cfg.mix = {0.0, 1.0, 0.0};
  cfg.seed = sub_seed(3);
  sp.test_rxto = generate(cfg);

  cfg.mix = {0.0, 0.0, 1.0};
  cfg.seed = sub_seed(4);
  sp.test_rotx = generate(cfg);
  return sp;
}

static json config_to_json(const GenConfig& cfg) {
  return json{{"d", cfg.d},
              {"n", cfg.n},
              {"mix", cfg.mix},
              {"signal_strength", cfg.signal_strength},
              {"thermal_boost", cfg.thermal_boost},
              {"noise_sigma", cfg.noise_sigma},
              {"rgb_night_atten", cfg.rgb_night_atten},
              {"seed", cfg.seed},
              {"direction_seed", cfg.direction_seed ? json(*cfg.direction_seed) : json()},
              {"prng_algo", kPrngAlgo}};
}

static GenConfig config_from_json(const json& j) {
  GenConfig cfg;
  cfg.d = j.at("d").get<std::size_t>();
  cfg.n = j.at("n").get<std::size_t>();
  cfg.mix = j.at("mix").get<std::array<double, 3>>();
  cfg.signal_strength = j.at("signal_strength").get<double>();
  cfg.thermal_boost = j.value("thermal_boost", 1.0);
  cfg.noise_sigma = j.at("noise_sigma").get<double>();
  cfg.rgb_night_atten = j.value("rgb_night_atten", 0.0);
  cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("direction_seed") && !j.at("direction_seed").is_null())
    cfg.direction_seed = j.at("direction_seed").get<std::uint64_t>();
  return cfg;
}

void save_dataset(const Dataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write dataset: " + path);
  for (const auto& sm : ds.samples) {
    json j{{"x_r", sm.x_r},
           {"x_t", sm.x_t},
           {"label", sm.label},
           {"regime", to_string(sm.regime)}};
    out << j.dump() << '\n';
  }
  std::ofstream meta(path + ".meta.json");
  if (!meta) throw std::runtime_error("cannot write dataset metadata: " + path);
  meta << config_to_json(ds.config).dump(2) << '\n';
}

Dataset load_dataset(const std::string& path) {
  std::ifstream meta(path + ".meta.json");
  if (!meta) throw std::runtime_error("cannot read dataset metadata: " + path);
  Dataset ds;
  ds.config = config_from_json(json::parse(meta));

  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read dataset: " + path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    Sample sm;
    sm.x_r = j.at("x_r").get<std::vector<double>>();
    sm.x_t = j.at("x_t").get<std::vector<double>>();
    sm.label = j.at("label").get<int>();
    sm.regime = regime_from_string(j.at("regime").get<std::string>());
    if (sm.label != 0 && sm.label != 1)
      throw std::runtime_error("dataset: label must be 0 or 1");
    ds.samples.push_back(std::move(sm));
  }
  return ds;
}

}  // namespace cmm
