// Copyright 2026 The Clarify Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "clarify/quality/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "clarify/core/error.hpp"
#include "clarify/quality/incomplete_beta.hpp"

namespace clarify::quality {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Neumaier-compensated sum.
class Accumulator {
 public:
  void add(double x) {
    if (std::isinf(x)) {
      inf_ += x;
      return;
    }
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return inf_ != 0.0 ? inf_ : sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
  double inf_ = 0.0;
};

double clamp_quality(double e) { return std::clamp(e, kQualityClamp, 1.0 - kQualityClamp); }

struct CellStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  double min_accepted = 1.0;
};

struct BackendStats {
  std::size_t accepted = 0;
  Accumulator log_e;
  Accumulator log_1me;
  std::vector<CellStats> cells;  // by threshold index
};

// Sufficient statistics with attempts grouped by threshold index
// min(k, n_thresholds) - 1.
std::vector<BackendStats> summarize(const QualityDataset& data, std::size_t n_thresholds) {
  std::vector<BackendStats> stats(data.backends.size());
  for (auto& s : stats) s.cells.resize(n_thresholds);
  for (const auto& o : data.observations) {
    auto& s = stats[o.backend];
    auto& cell = s.cells[std::min(o.attempt, n_thresholds) - 1];
    if (o.accepted) {
      double e = clamp_quality(*o.quality);
      ++s.accepted;
      s.log_e.add(std::log(e));
      s.log_1me.add(std::log1p(-e));
      ++cell.accepted;
      cell.min_accepted = std::min(cell.min_accepted, e);
    } else {
      ++cell.rejected;
    }
  }
  return stats;
}

double log_cdf(double tau, const BetaParams& p) {
  double v = reg_inc_beta(tau, p.alpha, p.beta);
  return v > 0.0 ? std::log(v) : kNegInf;
}

double log_survival(double tau, const BetaParams& p) {
  double v = reg_inc_beta(1.0 - tau, p.beta, p.alpha);
  return v > 0.0 ? std::log(v) : kNegInf;
}

double evaluate(const std::vector<BackendStats>& stats, const std::vector<BetaParams>& params,
                const ThresholdVector& tau, LikelihoodForm form,
                const std::vector<bool>* include = nullptr) {
  Accumulator total;
  for (std::size_t l = 0; l < stats.size(); ++l) {
    if (include && !(*include)[l]) continue;
    const auto& s = stats[l];
    const auto& p = params[l];
    if (s.accepted > 0) {
      total.add(-static_cast<double>(s.accepted) * log_beta_function(p.alpha, p.beta));
      total.add((p.alpha - 1.0) * s.log_e.value());
      total.add((p.beta - 1.0) * s.log_1me.value());
    }
    for (std::size_t j = 0; j < s.cells.size(); ++j) {
      const auto& c = s.cells[j];
      if (c.rejected > 0) total.add(static_cast<double>(c.rejected) * log_cdf(tau[j], p));
      if (c.accepted == 0) continue;
      if (form == LikelihoodForm::kPaperProduct) {
        total.add(static_cast<double>(c.accepted) * log_survival(tau[j], p));
      } else if (c.min_accepted < tau[j]) {
        return kNegInf;
      }
    }
  }
  return total.value();
}

std::size_t max_attempt(const QualityDataset& data) {
  std::size_t k = 1;
  for (const auto& o : data.observations) k = std::max(k, o.attempt);
  return k;
}

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }
double logit(double p) { return std::log(p / (1.0 - p)); }

}  // namespace

void check_dataset(const QualityDataset& data) {
  for (std::size_t i = 0; i < data.observations.size(); ++i) {
    const auto& o = data.observations[i];
    auto where = "observation " + std::to_string(i) + ": ";
    if (o.backend >= data.backends.size()) {
      throw Error(ErrorCode::kInvalidArgument, where + "backend index out of range");
    }
    if (o.attempt == 0) throw Error(ErrorCode::kInvalidArgument, where + "attempt must be >= 1");
    if (o.accepted != o.quality.has_value()) {
      throw Error(ErrorCode::kInvalidArgument, where + "quality must be present iff accepted");
    }
    if (o.quality && !(std::isfinite(*o.quality) && *o.quality >= 0.0 && *o.quality <= 1.0)) {
      throw Error(ErrorCode::kInvalidArgument, where + "quality outside [0, 1]");
    }
  }
}

double beta_mean(const BetaParams& p) { return p.alpha / (p.alpha + p.beta); }

LikelihoodForm parse_form(const std::string& s) {
  if (s == "paper") return LikelihoodForm::kPaperProduct;
  if (s == "censored") return LikelihoodForm::kStandardCensored;
  throw Error(ErrorCode::kParse, "unknown likelihood form: " + s);
}

const char* to_string(LikelihoodForm f) {
  return f == LikelihoodForm::kPaperProduct ? "paper" : "censored";
}

double log_likelihood(const QualityDataset& data, const std::vector<BetaParams>& params,
                      const ThresholdVector& thresholds, LikelihoodForm form) {
  check_dataset(data);
  if (params.size() != data.backends.size()) {
    throw Error(ErrorCode::kInvalidArgument, "one BetaParams per backend required");
  }
  for (const auto& p : params) {
    if (!(p.alpha > 0.0 && p.beta > 0.0)) {
      throw Error(ErrorCode::kInvalidArgument, "Beta parameters must be positive");
    }
  }
  if (data.observations.empty()) return 0.0;
  if (thresholds.empty()) throw Error(ErrorCode::kInvalidArgument, "empty threshold vector");
  for (double t : thresholds) {
    if (!(t > 0.0 && t < 1.0)) throw Error(ErrorCode::kInvalidArgument, "threshold outside (0, 1)");
  }
  return evaluate(summarize(data, thresholds.size()), params, thresholds, form);
}

std::size_t count_clamped(const QualityDataset& data) {
  std::size_t n = 0;
  for (const auto& o : data.observations) {
    if (o.accepted && o.quality && clamp_quality(*o.quality) != *o.quality) ++n;
  }
  return n;
}

FitResult fit_mle(const QualityDataset& data, const FitConfig& cfg, LikelihoodForm form) {
  check_dataset(data);
  if (!(cfg.learning_rate > 0.0 && cfg.tolerance > 0.0 && cfg.fd_step > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "fit configuration values must be positive");
  }
  const std::size_t n_backends = data.backends.size();
  const bool fit_tau = !cfg.fixed_thresholds.has_value();
  std::size_t n_tau = fit_tau ? max_attempt(data) : cfg.fixed_thresholds->size();
  if (n_tau == 0) throw Error(ErrorCode::kInvalidArgument, "empty threshold vector");
  if (!fit_tau) {
    for (double t : *cfg.fixed_thresholds) {
      if (!(t > 0.0 && t < 1.0)) throw Error(ErrorCode::kInvalidArgument, "threshold outside (0, 1)");
    }
  }
  const auto stats = summarize(data, n_tau);

  FitResult result;
  result.form = form;
  result.clamped = count_clamped(data);
  result.backends.resize(n_backends);
  std::vector<bool> include(n_backends, false);
  for (const auto& o : data.observations) ++result.backends[o.backend].observations;
  for (std::size_t l = 0; l < n_backends; ++l) {
    auto& b = result.backends[l];
    b.name = data.backends[l];
    b.accepted = stats[l].accepted;
    b.fitted = b.accepted > 0;
    include[l] = b.fitted;
  }

  // Upper bound for each censored threshold: the smallest accepted quality at
  // that attempt index. Thresholds above it have zero likelihood.
  std::vector<double> ceiling(n_tau, 1.0);
  for (std::size_t l = 0; l < n_backends; ++l) {
    if (!include[l]) continue;
    for (std::size_t j = 0; j < n_tau; ++j) {
      if (stats[l].cells[j].accepted > 0) {
        ceiling[j] = std::min(ceiling[j], stats[l].cells[j].min_accepted);
      }
    }
  }
  const bool scaled = form == LikelihoodForm::kStandardCensored;

  // theta = [log alpha, log beta] per fitted backend, then one entry per threshold.
  std::vector<std::size_t> fitted;
  for (std::size_t l = 0; l < n_backends; ++l) {
    if (include[l]) fitted.push_back(l);
  }
  std::vector<double> theta(2 * fitted.size(), 0.0);
  if (fit_tau) {
    for (std::size_t j = 0; j < n_tau; ++j) {
      double init = scaled ? std::min(0.5, ceiling[j] / 2.0) : 0.5;
      double m = scaled ? ceiling[j] : 1.0;
      theta.push_back(logit(init / m));
    }
  }

  std::vector<BetaParams> params(n_backends);
  ThresholdVector tau = fit_tau ? ThresholdVector(n_tau, 0.5) : *cfg.fixed_thresholds;
  auto unpack = [&](const std::vector<double>& th) {
    for (std::size_t i = 0; i < fitted.size(); ++i) {
      params[fitted[i]] = {std::exp(th[2 * i]), std::exp(th[2 * i + 1])};
    }
    if (fit_tau) {
      for (std::size_t j = 0; j < n_tau; ++j) {
        double t = logistic(th[2 * fitted.size() + j]) * (scaled ? ceiling[j] : 1.0);
        tau[j] = std::clamp(t, 1e-12, 1.0 - 1e-12);
      }
    }
  };
  auto objective = [&](const std::vector<double>& th) {
    unpack(th);
    return evaluate(stats, params, tau, form, &include);
  };

  std::size_t n_obs = 0;
  for (std::size_t l : fitted) n_obs += result.backends[l].observations;
  const double scale = n_obs > 0 ? 1.0 / static_cast<double>(n_obs) : 1.0;

  double ll = objective(theta);
  result.trace.push_back(ll);
  double step = cfg.learning_rate;
  std::vector<double> grad(theta.size());
  for (std::size_t iter = 0; iter < cfg.max_iters && !theta.empty(); ++iter) {
    for (std::size_t i = 0; i < theta.size(); ++i) {
      auto plus = theta;
      auto minus = theta;
      plus[i] += cfg.fd_step;
      minus[i] -= cfg.fd_step;
      double fp = objective(plus);
      double fm = objective(minus);
      if (std::isfinite(fp) && std::isfinite(fm)) {
        grad[i] = (fp - fm) / (2.0 * cfg.fd_step) * scale;
      } else if (std::isfinite(fp)) {
        grad[i] = (fp - ll) / cfg.fd_step * scale;
      } else if (std::isfinite(fm)) {
        grad[i] = (ll - fm) / cfg.fd_step * scale;
      } else {
        grad[i] = 0.0;
      }
    }
    bool moved = false;
    double next_ll = ll;
    std::vector<double> next(theta.size());
    for (int halvings = 0; halvings < 60; ++halvings) {
      for (std::size_t i = 0; i < theta.size(); ++i) next[i] = theta[i] + step * grad[i];
      next_ll = objective(next);
      if (std::isfinite(next_ll) && next_ll >= ll) {
        moved = true;
        break;
      }
      step *= 0.5;
    }
    result.iterations = iter + 1;
    if (!moved) {
      result.converged = true;
      break;
    }
    double delta = next_ll - ll;
    theta = next;
    ll = next_ll;
    result.trace.push_back(ll);
    step *= 1.25;
    if (delta < cfg.tolerance) {
      result.converged = true;
      break;
    }
  }

  unpack(theta);
  result.log_likelihood = ll;
  result.thresholds = tau;
  for (std::size_t l = 0; l < n_backends; ++l) {
    auto& b = result.backends[l];
    b.params = b.fitted ? params[l] : BetaParams{};
    b.mean = beta_mean(b.params);
  }
  return result;
}

nlohmann::json to_json(const FitResult& r) {
  nlohmann::json backends = nlohmann::json::array();
  for (const auto& b : r.backends) {
    backends.push_back({{"name", b.name},
                        {"alpha", b.params.alpha},
                        {"beta", b.params.beta},
                        {"mean", b.mean},
                        {"fitted", b.fitted},
                        {"observations", b.observations},
                        {"accepted", b.accepted}});
  }
  return {{"form", to_string(r.form)},
          {"backends", backends},
          {"thresholds", r.thresholds},
          {"log_likelihood", r.log_likelihood},
          {"iterations", r.iterations},
          {"converged", r.converged},
          {"clamped", r.clamped},
          {"trace", r.trace}};
}

}  // namespace clarify::quality
