// Copyright 2026 The NexusSum Authors
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
//
// Quantitative instruments: length adherence, compression ratio, ROUGE,
// n-gram contamination, document-utilization histograms with KL divergence,
// and the token-cost model. All pure functions.

#ifndef NEXUSSUM_METRICS_HPP_
#define NEXUSSUM_METRICS_HPP_

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace nexussum {

// Lowercased, punctuation-stripped word tokens (standard ROUGE preprocessing).
std::vector<std::string> metric_tokenize(std::string_view text);

struct LarReport {
  std::int64_t generated_len = 0;
  std::int64_t target_len = 0;
  double lar = 0.0;
};

// 1 - |generated - target| / target. May be negative, never above 1.
double lar(std::int64_t generated_len, std::int64_t target_len);
LarReport lar_report(std::int64_t generated_len, std::int64_t target_len);

// 1 - after/before. Inputs are word counts (possibly fractional averages).
double compression_ratio(double before_words, double after_words);

struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

RougeScore rouge_n(const std::vector<std::string>& candidate,
                   const std::vector<std::string>& reference, int n);
RougeScore rouge_l(const std::vector<std::string>& candidate,
                   const std::vector<std::string>& reference);
std::int64_t lcs_length(const std::vector<std::string>& a,
                        const std::vector<std::string>& b);

// Geometric mean of the three F1 values; 0 if any component is 0.
double rouge_geometric_mean(double r1_f1, double r2_f1, double rl_f1);

// Percentage of generated n-gram instances (with multiplicity) whose token
// tuple occurs anywhere in the reference; 0 when generated has < n tokens.
double ngram_overlap(std::string_view generated, std::string_view reference, int n);

struct ContaminationReport {
  std::map<int, double> per_n;  // n -> overlap percentage
};

ContaminationReport contamination_report(std::string_view generated,
                                         std::string_view reference,
                                         int n_min = 4, int n_max = 8);

struct UtilizationAssignment {
  std::int64_t sentence_index = 0;
  int bin = 0;
  double score = 0.0;   // best ROUGE-L F1 against the winning segment
  bool zero_score = false;

  bool operator==(const UtilizationAssignment&) const = default;
};

struct UtilizationHistogram {
  std::vector<double> bins;  // normalized assignment counts, sums to 1
  std::vector<UtilizationAssignment> assignments;
};

// Splits the source into `bins` contiguous word-count-balanced segments and
// assigns each summary sentence to the segment maximizing ROUGE-L F1 (ties
// break toward the earliest segment).
UtilizationHistogram document_utilization(
    const std::vector<std::string>& summary_sentences, std::string_view source,
    int bins = 10);

// sum p_i * ln((p_i + eps) / (q_i + eps)), direction KL(prediction || truth).
double kl_divergence(std::span<const double> p, std::span<const double> q,
                     double epsilon = 1e-9);

struct CostEstimate {
  struct StageCost {
    double encoded_tokens = 0.0;
    double decoded_tokens = 0.0;
  };
  std::array<StageCost, 3> stages;  // preprocessor, summarizer, compressor
  double total = 0.0;
  double n = 0.0;
  std::array<double, 3> chunk_sizes{};        // c1..c3
  std::array<double, 3> compression_ratios{}; // a1..a3
};

// total = n * [c1(1+a1) + a1*c2(1+a2) + a1*a2*c3(1+a3)]
CostEstimate estimate_cost(double n, double c1, double c2, double c3,
                           double a1, double a2, double a3);

// Report emission: JSON plus aligned plain-text tables.
std::string format_table(const std::vector<std::string>& header,
                         const std::vector<std::vector<std::string>>& rows);

nlohmann::json to_json(const LarReport& report);
nlohmann::json to_json(const ContaminationReport& report);
nlohmann::json to_json(const UtilizationHistogram& histogram);
nlohmann::json to_json(const CostEstimate& estimate);

std::string to_table(const LarReport& report);
std::string to_table(const ContaminationReport& report);
std::string to_table(const UtilizationHistogram& histogram);
std::string to_table(const CostEstimate& estimate);

// Histogram bins as a single CSV line ("bin,probability" rows).
std::string to_csv(const UtilizationHistogram& histogram);

}  // namespace nexussum

#endif  // NEXUSSUM_METRICS_HPP_
