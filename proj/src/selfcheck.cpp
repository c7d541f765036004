#include "cmm/selfcheck.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <vector>

#include "cmm/causal.hpp"
#include "cmm/evaluator.hpp"
#include "cmm/model.hpp"
#include "cmm/objective.hpp"
#include "cmm/rng.hpp"
#include "cmm/synthgen.hpp"
#include "cmm/tape.hpp"

namespace cmm::selfcheck {
namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

SuiteResult decomposition_identity() {
  SuiteResult res{"decomposition-identity", true, ""};
  Rng rng(101);
  double worst = 0.0;
  for (int it = 0; it < 1000 && res.passed; ++it) {
    Tape t;
    double ym[2], yr[2], yt[2];
    for (auto* v : {ym, yr, yt})
      for (int c = 0; c < 2; ++c) v[c] = rng.uniform(-5.0, 5.0);
    PredictionTriple triple{t.input({ym, 2}), t.input({yr, 2}), t.input({yt, 2})};
    NoTreatment nt{t.input(rng.uniform(-2.0, 2.0)), t.input(rng.uniform(-2.0, 2.0)),
                   t.input(rng.uniform(-2.0, 2.0))};
    CausalEffects e = causal_effects(t, triple, nt, 1.0);
    // Independent route per the algebra: tie == LH(y_m,y_r,y_t) - LH(c_m,c_r,y_t).
    Var alt = t.sub(log_harmonic(t, triple.y_m, triple.y_r, triple.y_t),
                    log_harmonic(t, nt.c_m, nt.c_r, triple.y_t));
    for (int c = 0; c < 2; ++c) {
      const double d1 = std::abs(e.tie.value()[c] -
                                 (e.te.value()[c] - e.nde.value()[c]));
      const double d2 = std::abs(e.tie.value()[c] - alt.value()[c]);
      worst = std::max({worst, d1, d2});
      if (d1 >= 1e-12 || d2 >= 1e-12) {
        res.passed = false;
        std::ostringstream os;
        os << "iteration " << it << " class " << c << ": |tie-(te-nde)|=" << d1
           << " |tie-dual|=" << d2;
        res.detail = os.str();
      }
    }
  }
  if (res.passed) res.detail = "max deviation " + fmt(worst) + " over 1000 pairs";
  return res;
}

SuiteResult k_mode_truth_table() {
  SuiteResult res{"k-mode-truth-table", true, ""};
  Rng rng(202);
  struct Case {
    double pi_r[2];
    double pi_t[2];
    double expect_k;
    bool expect_te;  // true: sTIE == TE branch, false: sTIE == TIE branch
    const char* name;
  };
  const Case cases[] = {
      {{0, 1}, {0, 1}, 1.0, true, "ROTO"},
      {{1, 0}, {0, 1}, -1.0, false, "RXTO"},
      {{0, 1}, {1, 0}, -1.0, false, "ROTX"},
  };
  for (const Case& c : cases) {
    Tape t;
    Var k = k_mode(t, t.input({c.pi_r, 2}), t.input({c.pi_t, 2}));
    if (k.scalar() != c.expect_k) {
      res.passed = false;
      res.detail = std::string(c.name) + ": K=" + fmt(k.scalar()) +
                   " expected " + fmt(c.expect_k);
      return res;
    }
    double te[2], nde[2];
    for (int i = 0; i < 2; ++i) {
      te[i] = rng.uniform(-4.0, 4.0);
      nde[i] = rng.uniform(-4.0, 4.0);
    }
    Var vte = t.input({te, 2});
    Var vnde = t.input({nde, 2});
    Var stie = switchable_tie(t, vte, vnde, k);
    Var want = c.expect_te ? vte : t.sub(vte, vnde);
    for (int i = 0; i < 2; ++i) {
      if (stie.value()[i] != want.value()[i]) {  // bit-exact branch selection
        res.passed = false;
        res.detail = std::string(c.name) + ": sTIE[" + std::to_string(i) +
                     "]=" + fmt(stie.value()[i]) + " expected " +
                     fmt(want.value()[i]);
        return res;
      }
    }
  }
  res.detail = "3 hard one-hot cases, branches bit-exact";
  return res;
}

SuiteResult gradient_check() {
  SuiteResult res{"gradient-check", true, ""};
  Rng rng(303);
  const double h = 1e-5;
  double worst = 0.0;
  for (int rep = 0; rep < 5 && res.passed; ++rep) {
    CmmModel model = init_model(rng.next_u64(), 4, {6}, 1.0);
    // Random parameters (init leaves output layers zero; perturb everything).
    for (double* p : model.parameter_ptrs()) *p = rng.uniform(-0.8, 0.8);
    std::vector<std::vector<double>> xs;
    for (int i = 0; i < 6; ++i) {
      std::vector<double> x(4);
      for (auto& v : x) v = rng.uniform(-2.0, 2.0);
      xs.push_back(std::move(x));
    }
    const auto batch_loss = [&](const CmmModel& m) -> double {
      Tape t;
      ModelVars mv = record_params(t, m);
      Var total{};
      for (int i = 0; i < 3; ++i) {
        ForwardResult fr =
            forward(t, m, mv, {xs[2 * i].data(), 4}, {xs[2 * i + 1].data(), 4});
        LossBreakdown lb = ablation_loss(t, Strategy::kStie, fr.triple,
                                         fr.effects, i % 2);
        total = i == 0 ? lb.l_total : t.add(total, lb.l_total);
      }
      return t.affine(total, 1.0 / 3.0, 0.0).scalar();
    };

    Tape t;
    ModelVars mv = record_params(t, model);
    Var total{};
    for (int i = 0; i < 3; ++i) {
      ForwardResult fr = forward(t, model, mv, {xs[2 * i].data(), 4},
                                 {xs[2 * i + 1].data(), 4});
      LossBreakdown lb =
          ablation_loss(t, Strategy::kStie, fr.triple, fr.effects, i % 2);
      total = i == 0 ? lb.l_total : t.add(total, lb.l_total);
    }
    Var mean = t.affine(total, 1.0 / 3.0, 0.0);
    t.backward(mean);
    std::vector<double> analytic;
    for (Var leaf : mv.leaves)
      for (double g : t.adjoint(leaf)) analytic.push_back(g);

    auto params = model.parameter_ptrs();
    for (std::size_t i = 0; i < params.size(); ++i) {
      const double saved = *params[i];
      *params[i] = saved + h;
      const double up = batch_loss(model);
      *params[i] = saved - h;
      const double dn = batch_loss(model);
      *params[i] = saved;
      const double fd = (up - dn) / (2.0 * h);
      const double rel = std::abs(analytic[i] - fd) /
                         std::max({std::abs(analytic[i]), std::abs(fd), 1e-6});
      worst = std::max(worst, rel);
      if (rel >= 1e-4) {
        res.passed = false;
        std::ostringstream os;
        os << "model " << rep << " param " << i << ": analytic=" << analytic[i]
           << " fd=" << fd << " rel=" << rel;
        res.detail = os.str();
        break;
      }
    }
  }
  if (res.passed) res.detail = "max rel err " + fmt(worst) + " over 5 models";
  return res;
}

SuiteResult temperature_identity() {
  SuiteResult res{"temperature-identity", true, ""};
  Rng rng(404);
  double worst = 0.0;
  for (int it = 0; it < 100 && res.passed; ++it) {
    Tape t;
    double y[2] = {rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0)};
    Var vy = t.input({y, 2});
    Var pi = mode_distribution(t, vy, 1.0);
    Var p = t.softmax(vy);
    for (int c = 0; c < 2; ++c) {
      const double d = std::abs(pi.value()[c] - p.value()[c]);
      worst = std::max(worst, d);
      if (d >= 1e-15) {
        res.passed = false;
        res.detail = "iteration " + std::to_string(it) + ": |pi-p|=" + fmt(d);
      }
    }
  }
  if (res.passed) res.detail = "max |pi - softmax| " + fmt(worst);
  return res;
}

SuiteResult ap_oracle() {
  SuiteResult res{"ap-oracle", true, ""};
  Rng rng(505);
  for (int it = 0; it < 200 && res.passed; ++it) {
    const std::size_t n = 2 + rng.below(19);  // 2..20
    std::vector<double> scores(n);
    std::vector<int> labels(n);
    std::size_t pos = 0;
    for (std::size_t i = 0; i < n; ++i) {
      // Coarse grid so score ties actually occur.
      scores[i] = std::floor(rng.uniform01() * 8.0) / 8.0;
      labels[i] = rng.uniform01() < 0.5 ? 1 : 0;
      pos += labels[i];
    }
    if (pos == 0) labels[rng.below(n)] = 1;

    // Brute force: for each positive, count rank and true positives by
    // direct pairwise comparison under the (score desc, index asc) order.
    // Terms are summed in rank order so the two routes agree bit-exactly.
    std::vector<std::pair<std::size_t, double>> prec_at;  // (rank, precision)
    for (std::size_t i = 0; i < n; ++i) {
      if (labels[i] != 1) continue;
      std::size_t rank = 0, tp = 0;
      for (std::size_t j = 0; j < n; ++j) {
        const bool before =
            scores[j] > scores[i] || (scores[j] == scores[i] && j <= i);
        if (before) {
          ++rank;
          tp += labels[j] == 1;
        }
      }
      prec_at.emplace_back(rank, static_cast<double>(tp) /
                                     static_cast<double>(rank));
    }
    std::sort(prec_at.begin(), prec_at.end());
    double sum_prec = 0.0;
    for (const auto& [rank, prec] : prec_at) sum_prec += prec;
    const double expect = sum_prec / static_cast<double>(prec_at.size());
    const double got = average_precision(scores, labels);
    if (got != expect) {  // exact agreement required
      res.passed = false;
      std::ostringstream os;
      os << "instance " << it << " (n=" << n << "): ap=" << got
         << " oracle=" << expect;
      res.detail = os.str();
    }
  }
  if (res.passed) res.detail = "200 instances, exact agreement";
  return res;
}

bool run_all() {
  bool all = true;
  for (const auto& suite :
       {decomposition_identity(), k_mode_truth_table(), gradient_check(),
        temperature_identity(), ap_oracle()}) {
    std::printf("%-22s %s  (%s)\n", suite.name.c_str(),
                suite.passed ? "PASS" : "FAIL", suite.detail.c_str());
    all = all && suite.passed;
  }
  return all;
}

}  // namespace cmm::selfcheck
