#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "coinsamp/harness/datasets.hpp"
#include "coinsamp/targets.hpp"

namespace coinsamp::harness {

struct ResolvedTarget {
  std::string spec;
  TargetModel model;
  /// U'(x) for one-dimensional targets (spectral kernel input).
  std::function<double(double)> potential_grad;
  std::optional<Matrix> w_true;
  std::shared_ptr<const LogRegDataset> logreg;
};

inline const std::vector<std::string>& builtin_targets() {
  static const std::vector<std::string> names = {"gaussian2d", "mog2",       "donut",    "banana",  "squiggle",
                                                 "funnel",     "gauss1d",    "mog3",     "gauss-exact",
                                                 "ksdd-gauss", "ksdd-mog",   "ksdd-mog-sym"};
  return names;
}

/// Parses a target spec: a builtin name, `ica:FILE`, or `logreg:FILE`.
/// Logistic regression samples from the training split.
inline ResolvedTarget resolve_target(const std::string& spec, std::size_t batch_size = 100) {
  ResolvedTarget r;
  r.spec = spec;
  const auto colon = spec.find(':');
  const std::string head = spec.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (head == "ica" || head == "logreg") {
    if (arg.empty()) throw InvalidArgument("target '" + head + "' needs a data file: " + head + ":FILE");
    if (head == "ica") {
      auto prob = std::make_shared<IcaProblem>(read_ica(arg));
      if (prob->w_true.size() > 0) r.w_true = prob->w_true;
      r.model = ica_target(std::shared_ptr<const IcaProblem>(prob));
    } else {
      auto ds = std::make_shared<const LogRegDataset>(read_logreg(arg));
      r.logreg = ds;
      r.model = logreg_target(logreg_problem(*ds, Split::Train, batch_size));
    }
    return r;
  }
  if (colon != std::string::npos) throw InvalidArgument("target '" + spec + "' takes no argument");
  static const std::vector<std::pair<std::string, ToyFamily>> toys = {
      {"gaussian2d", ToyFamily::Gaussian2d}, {"mog2", ToyFamily::Mog2},
      {"donut", ToyFamily::Donut},           {"banana", ToyFamily::Banana},
      {"squiggle", ToyFamily::Squiggle},     {"funnel", ToyFamily::Funnel},
      {"gauss1d", ToyFamily::Gauss1d},       {"mog3", ToyFamily::Mog3},
      {"ksdd-gauss", ToyFamily::KsddGaussian}, {"ksdd-mog", ToyFamily::KsddMixture},
      {"ksdd-mog-sym", ToyFamily::KsddSymmetricMixture}};
  if (head == "gauss-exact") {
    const Vector mean{{-1.0, 1.0}};
    const Matrix precision{{3.0, -0.5}, {-0.5, 1.0}};
    r.model = gaussian_exact(mean, precision);
    return r;
  }
  for (const auto& [name, family] : toys) {
    if (name != head) continue;
    r.model = toy_target(family);
    if (r.model.dim == 1) {
      auto score = r.model.score;
      r.potential_grad = [score](double x) { return -score(Vector::Constant(1, x))[0]; };
    }
    return r;
  }
  std::string known;
  for (const auto& n : builtin_targets()) known += (known.empty() ? "" : ", ") + n;
  throw InvalidArgument("unknown target '" + spec + "' (expected one of " + known + ", ica:FILE, logreg:FILE)");
}

}  // namespace coinsamp::harness
