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

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace clarify::quality {

// One clarification attempt. backend is a 0-based index into
// QualityDataset::backends.
struct QualityObservation {
  std::size_t attempt = 1;  // k >= 1
  std::size_t backend = 0;
  bool accepted = false;
  std::optional<double> quality;  // present iff accepted
};

struct QualityDataset {
  std::vector<std::string> backends;
  std::vector<QualityObservation> observations;
};

// Throws Error(kInvalidArgument) on an out-of-range backend, k = 0, or a
// quality/acceptance mismatch.
void check_dataset(const QualityDataset& data);

struct BetaParams {
  double alpha = 1.0;
  double beta = 1.0;
};

// alpha / (alpha + beta)
double beta_mean(const BetaParams& p);

// tau[k-1] is the threshold for attempt k; attempts past the end share the
// last entry.
using ThresholdVector = std::vector<double>;

enum class LikelihoodForm {
  // Accepted attempts contribute log f(e) + log(1 - I_tau(a, b)), as printed
  // in the original model description.
  kPaperProduct,
  // Accepted attempts contribute log f(e) and require e >= tau_k; rejected
  // ones contribute log I_tau(a, b). This is the censoring likelihood of the
  // threshold process itself.
  kStandardCensored,
};

LikelihoodForm parse_form(const std::string& s);
const char* to_string(LikelihoodForm f);

// Accepted qualities are clamped into [kQualityClamp, 1 - kQualityClamp].
inline constexpr double kQualityClamp = 1e-6;

double log_likelihood(const QualityDataset& data, const std::vector<BetaParams>& params,
                      const ThresholdVector& thresholds, LikelihoodForm form);

// Number of accepted observations whose quality the likelihood clamps.
std::size_t count_clamped(const QualityDataset& data);

struct FitConfig {
  std::size_t max_iters = 2000;
  double learning_rate = 0.01;
  double tolerance = 1e-8;  // on |Δ log-likelihood|
  double fd_step = 1e-5;
  double accuracy = 1e-8;
  std::uint64_t seed = 0;
  // When set, thresholds are held at these values instead of being fitted.
  std::optional<ThresholdVector> fixed_thresholds;
};

struct BackendFit {
  std::string name;
  BetaParams params;
  double mean = 0.0;
  bool fitted = false;  // false when the backend has no accepted attempt
  std::size_t observations = 0;
  std::size_t accepted = 0;
};

struct FitResult {
  std::vector<BackendFit> backends;
  ThresholdVector thresholds;
  double log_likelihood = 0.0;
  std::vector<double> trace;  // initial log-likelihood, then one entry per accepted step
  std::size_t iterations = 0;
  bool converged = false;
  std::size_t clamped = 0;
  LikelihoodForm form = LikelihoodForm::kPaperProduct;
};

// Gradient ascent on alpha = exp(u), beta = exp(v), tau = logistic(w) with
// central finite-difference gradients and step halving, so the trace never
// decreases.
FitResult fit_mle(const QualityDataset& data, const FitConfig& cfg, LikelihoodForm form);

nlohmann::json to_json(const FitResult& r);

}  // namespace clarify::quality
