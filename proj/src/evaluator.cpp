#include "cmm/evaluator.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace cmm {

using nlohmann::json;

double average_precision(const std::vector<double>& scores,
                         const std::vector<int>& labels) {
  if (scores.size() != labels.size())
    throw std::invalid_argument("average_precision: size mismatch");
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  });
  std::size_t tp = 0, positives = 0;
  double sum_prec = 0.0;
  for (std::size_t rank = 0; rank < n; ++rank) {
    if (labels[order[rank]] == 1) {
      ++tp;
      ++positives;
      sum_prec += static_cast<double>(tp) / static_cast<double>(rank + 1);
    }
  }
  if (positives == 0)
    throw std::invalid_argument("average_precision: no positive labels");
  return sum_prec / static_cast<double>(positives);
}

std::vector<double> inference_score_column(const CmmModel& model,
                                           const Dataset& data, Strategy s) {
  std::vector<double> col;
  col.reserve(data.samples.size());
  Tape tape;
  for (const auto& sm : data.samples) {
    tape.clear();
    ModelVars mv = record_params(tape, model);
    ForwardResult fr = forward(tape, model, mv, sm.x_r, sm.x_t);
    Var p = tape.softmax(inference_scores(s, fr.effects));
    col.push_back(p.value()[kPedestrian]);
  }
  return col;
}

SplitMetrics evaluate(const CmmModel& model, const Dataset& data, Strategy s) {
  SplitMetrics m;
  std::vector<int> labels;
  labels.reserve(data.samples.size());
  for (const auto& sm : data.samples) labels.push_back(sm.label);
  const std::vector<double> col = inference_score_column(model, data, s);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < col.size(); ++i) {
    const int pred = col[i] > 0.5 ? 1 : 0;  // argmax over two classes
    if (pred == labels[i]) ++correct;
  }
  m.accuracy = static_cast<double>(correct) / static_cast<double>(col.size());
  m.ap = average_precision(col, labels);
  return m;
}

namespace {

constexpr Strategy kAllStrategies[] = {Strategy::kBaselineTe, Strategy::kTeTrain,
                                       Strategy::kTieTrain, Strategy::kStie};

std::string fnv1a_hex(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string config_digest(const AblationConfig& cfg) {
  std::ostringstream os;
  os.precision(17);
  os << cfg.root_seed << '|' << cfg.n_seeds << '|' << cfg.gen.d << '|'
     << cfg.gen.signal_strength << '|' << cfg.gen.thermal_boost << '|'
     << cfg.gen.noise_sigma << '|'
     << cfg.gen.rgb_night_atten << '|' << cfg.train.epochs << '|'
     << cfg.train.batch_size << '|' << cfg.train.learning_rate << '|'
     << cfg.train.momentum << '|' << cfg.train.shuffle << '|' << cfg.tau;
  for (std::size_t h : cfg.hidden) os << '|' << h;
  return fnv1a_hex(os.str());
}

}  // namespace

std::map<std::string, SplitMetrics> AblationTable::means(Strategy s) const {
  std::map<std::string, SplitMetrics> acc;
  std::map<std::string, std::size_t> counts;
  for (const auto& run : runs) {
    if (run.strategy != s) continue;
    for (const auto& [split, m] : run.splits) {
      acc[split].accuracy += m.accuracy;
      acc[split].ap += m.ap;
      counts[split] += 1;
    }
  }
  for (auto& [split, m] : acc) {
    m.accuracy /= static_cast<double>(counts[split]);
    m.ap /= static_cast<double>(counts[split]);
  }
  return acc;
}

AblationTable run_ablation(const AblationConfig& cfg) {
  if (cfg.n_seeds < 1) throw std::invalid_argument("run_ablation: n_seeds >= 1");
  AblationTable table;
  const std::string digest = config_digest(cfg);
  for (std::size_t i = 0; i < cfg.n_seeds; ++i) {
    const std::uint64_t seed = cfg.root_seed + i;
    const StandardSplits splits = standard_splits(seed, cfg.gen);
    const CmmModel init = init_model(seed, cfg.gen.d, cfg.hidden, cfg.tau);
    for (Strategy s : kAllStrategies) {
      CmmModel model = init;  // same initialization for all four strategies
      TrainConfig tc = cfg.train;
      tc.strategy = s;
      tc.seed = seed;
      tc.checkpoint_prefix.clear();
      train(model, splits.train, tc);
      RunReport report;
      report.strategy = s;
      report.seed = seed;
      report.config_digest = digest;
      report.splits["test_roto"] = evaluate(model, splits.test_roto, s);
      report.splits["test_rxto"] = evaluate(model, splits.test_rxto, s);
      report.splits["test_rotx"] = evaluate(model, splits.test_rotx, s);
      table.runs.push_back(std::move(report));
    }
  }
  return table;
}

void save_report_json(const AblationTable& table, const std::string& path) {
  json runs = json::array();
  for (const auto& r : table.runs) {
    json splits;
    for (const auto& [name, m] : r.splits)
      splits[name] = {{"accuracy", m.accuracy}, {"ap", m.ap}};
    runs.push_back({{"strategy", to_string(r.strategy)},
                    {"seed", r.seed},
                    {"config_digest", r.config_digest},
                    {"splits", splits}});
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write report: " + path);
  out << json{{"runs", runs}}.dump(2) << '\n';
}

AblationTable load_report_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read report: " + path);
  json j = json::parse(in);
  AblationTable table;
  for (const auto& rj : j.at("runs")) {
    RunReport r;
    r.strategy = strategy_from_string(rj.at("strategy").get<std::string>());
    r.seed = rj.at("seed").get<std::uint64_t>();
    r.config_digest = rj.at("config_digest").get<std::string>();
    for (const auto& [name, mj] : rj.at("splits").items()) {
      SplitMetrics m;
      m.accuracy = mj.at("accuracy").get<double>();
      m.ap = mj.at("ap").get<double>();
      r.splits[name] = m;
    }
    table.runs.push_back(std::move(r));
  }
  return table;
}

std::string report_csv(const AblationTable& table) {
  std::ostringstream os;
  os.precision(17);
  os << "seed,strategy,split,accuracy,ap\n";
  for (const auto& r : table.runs)
    for (const auto& [split, m] : r.splits)
      os << r.seed << ',' << to_string(r.strategy) << ',' << split << ','
         << m.accuracy << ',' << m.ap << '\n';
  return os.str();
}

void save_report_csv(const AblationTable& table, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write report: " + path);
  out << report_csv(table);
}

void save_pr_points_csv(const std::vector<double>& scores,
                        const std::vector<int>& labels,
                        const std::string& path) {
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  });
  std::size_t positives = 0;
  for (int l : labels) positives += l == 1;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write PR points: " + path);
  out << "threshold,precision,recall\n";
  out.precision(17);
  std::size_t tp = 0;
  for (std::size_t rank = 0; rank < n; ++rank) {
    tp += labels[order[rank]] == 1;
    const bool last_of_threshold =
        rank + 1 == n || scores[order[rank + 1]] != scores[order[rank]];
    if (last_of_threshold)
      out << scores[order[rank]] << ','
          << static_cast<double>(tp) / static_cast<double>(rank + 1) << ','
          << static_cast<double>(tp) / static_cast<double>(positives) << '\n';
  }
}

}  // namespace cmm
