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

#include "nexussum/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "nexussum/corpus.hpp"
#include "nexussum/errors.hpp"

namespace nexussum {
namespace {

inline bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

std::string format_fixed(double value, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", precision, value);
  return buf;
}

// n-grams as joined token strings; '\x1f' never occurs inside a token.
std::vector<std::string> ngrams(const std::vector<std::string>& tokens, int n) {
  std::vector<std::string> grams;
  if (n < 1 || tokens.size() < static_cast<std::size_t>(n)) return grams;
  grams.reserve(tokens.size() - static_cast<std::size_t>(n) + 1);
  for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= tokens.size(); ++i) {
    std::string gram = tokens[i];
    for (std::size_t k = 1; k < static_cast<std::size_t>(n); ++k) {
      gram += '\x1f';
      gram += tokens[i + k];
    }
    grams.push_back(std::move(gram));
  }
  return grams;
}

double harmonic_f1(double precision, double recall) {
  if (precision + recall <= 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

}  // namespace

std::vector<std::string> metric_tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&]() {
    if (!current.empty()) {
      tokens.push_back(current);
      current.clear();
    }
  };
  for (char c : text) {
    if (is_space(c)) {
      flush();
      continue;
    }
    unsigned char u = static_cast<unsigned char>(c);
    if (c >= 'A' && c <= 'Z') {
      current += static_cast<char>(c - 'A' + 'a');
    } else if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || u >= 0x80) {
      current += c;
    }
    // ASCII punctuation is dropped
  }
  flush();
  return tokens;
}

double lar(std::int64_t generated_len, std::int64_t target_len) {
  if (target_len < 1) throw ZeroTarget();
  const std::int64_t deviation = std::llabs(generated_len - target_len);
  return 1.0 - static_cast<double>(deviation) / static_cast<double>(target_len);
}

LarReport lar_report(std::int64_t generated_len, std::int64_t target_len) {
  return {generated_len, target_len, lar(generated_len, target_len)};
}

double compression_ratio(double before_words, double after_words) {
  if (before_words < 1.0) throw ZeroBefore();
  return 1.0 - after_words / before_words;
}

RougeScore rouge_n(const std::vector<std::string>& candidate,
                   const std::vector<std::string>& reference, int n) {
  if (n < 1) throw std::invalid_argument("rouge_n: n must be >= 1");
  const std::vector<std::string> cand = ngrams(candidate, n);
  const std::vector<std::string> ref = ngrams(reference, n);
  if (cand.empty() || ref.empty()) return {};

  std::unordered_map<std::string, std::int64_t> ref_counts;
  for (const std::string& gram : ref) ++ref_counts[gram];

  std::int64_t matched = 0;  // clipped counts
  for (const std::string& gram : cand) {
    auto it = ref_counts.find(gram);
    if (it != ref_counts.end() && it->second > 0) {
      --it->second;
      ++matched;
    }
  }
  RougeScore score;
  score.precision = static_cast<double>(matched) / static_cast<double>(cand.size());
  score.recall = static_cast<double>(matched) / static_cast<double>(ref.size());
  score.f1 = harmonic_f1(score.precision, score.recall);
  return score;
}

std::int64_t lcs_length(const std::vector<std::string>& a,
                        const std::vector<std::string>& b) {
  if (a.empty() || b.empty()) return 0;
  std::vector<std::int64_t> prev(b.size() + 1, 0);
  std::vector<std::int64_t> curr(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      if (a[i - 1] == b[j - 1]) {
        curr[j] = prev[j - 1] + 1;
      } else {
        curr[j] = std::max(prev[j], curr[j - 1]);
      }
    }
    std::swap(prev, curr);
  }
  return prev[b.size()];
}

RougeScore rouge_l(const std::vector<std::string>& candidate,
                   const std::vector<std::string>& reference) {
  if (candidate.empty() || reference.empty()) return {};
  const std::int64_t lcs = lcs_length(candidate, reference);
  RougeScore score;
  score.precision = static_cast<double>(lcs) / static_cast<double>(candidate.size());
  score.recall = static_cast<double>(lcs) / static_cast<double>(reference.size());
  score.f1 = harmonic_f1(score.precision, score.recall);
  return score;
}

double rouge_geometric_mean(double r1_f1, double r2_f1, double rl_f1) {
  if (r1_f1 <= 0.0 || r2_f1 <= 0.0 || rl_f1 <= 0.0) return 0.0;
  return std::cbrt(r1_f1 * r2_f1 * rl_f1);
}

double ngram_overlap(std::string_view generated, std::string_view reference,
                     int n) {
  if (n < 1) throw std::invalid_argument("ngram_overlap: n must be >= 1");
  const std::vector<std::string> gen = ngrams(metric_tokenize(generated), n);
  if (gen.empty()) return 0.0;

  const std::vector<std::string> ref = ngrams(metric_tokenize(reference), n);
  std::unordered_set<std::string> ref_set(ref.begin(), ref.end());

  std::int64_t hits = 0;
  for (const std::string& gram : gen) {
    if (ref_set.count(gram) != 0) ++hits;
  }
  return 100.0 * static_cast<double>(hits) / static_cast<double>(gen.size());
}

ContaminationReport contamination_report(std::string_view generated,
                                         std::string_view reference, int n_min,
                                         int n_max) {
  if (n_min < 1 || n_max < n_min) {
    throw std::invalid_argument("contamination_report: bad n range");
  }
  ContaminationReport report;
  for (int n = n_min; n <= n_max; ++n) {
    report.per_n[n] = ngram_overlap(generated, reference, n);
  }
  return report;
}

UtilizationHistogram document_utilization(
    const std::vector<std::string>& summary_sentences, std::string_view source,
    int bins) {
  if (bins < 1) throw std::invalid_argument("document_utilization: bins must be >= 1");
  if (is_blank(source)) throw EmptyInput("source is blank");
  if (summary_sentences.empty()) throw EmptySummary();

  const std::vector<std::string> source_tokens = metric_tokenize(source);
  // Contiguous word-count-balanced segments: boundaries at floor(i * W / bins).
  std::vector<std::vector<std::string>> segments(static_cast<std::size_t>(bins));
  const std::size_t total = source_tokens.size();
  for (int b = 0; b < bins; ++b) {
    const std::size_t begin = total * static_cast<std::size_t>(b) /
                              static_cast<std::size_t>(bins);
    const std::size_t end = total * static_cast<std::size_t>(b + 1) /
                            static_cast<std::size_t>(bins);
    segments[static_cast<std::size_t>(b)].assign(
        source_tokens.begin() + static_cast<std::ptrdiff_t>(begin),
        source_tokens.begin() + static_cast<std::ptrdiff_t>(end));
  }

  UtilizationHistogram histogram;
  histogram.bins.assign(static_cast<std::size_t>(bins), 0.0);
  std::vector<std::int64_t> counts(static_cast<std::size_t>(bins), 0);

  for (std::size_t s = 0; s < summary_sentences.size(); ++s) {
    const std::vector<std::string> sentence_tokens =
        metric_tokenize(summary_sentences[s]);
    UtilizationAssignment assignment;
    assignment.sentence_index = static_cast<std::int64_t>(s);
    assignment.bin = 0;
    assignment.score = 0.0;
    for (int b = 0; b < bins; ++b) {
      const double f1 =
          rouge_l(sentence_tokens, segments[static_cast<std::size_t>(b)]).f1;
      if (f1 > assignment.score) {  // ties break to the lowest segment index
        assignment.score = f1;
        assignment.bin = b;
      }
    }
    assignment.zero_score = (assignment.score == 0.0);
    ++counts[static_cast<std::size_t>(assignment.bin)];
    histogram.assignments.push_back(assignment);
  }

  const double n = static_cast<double>(summary_sentences.size());
  for (int b = 0; b < bins; ++b) {
    histogram.bins[static_cast<std::size_t>(b)] =
        static_cast<double>(counts[static_cast<std::size_t>(b)]) / n;
  }
  return histogram;
}

double kl_divergence(std::span<const double> p, std::span<const double> q,
                     double epsilon) {
  if (p.size() != q.size() || p.empty()) {
    throw NotADistribution("distributions must have equal, nonzero length");
  }
  auto check = [&](std::span<const double> dist, const char* name) {
    double sum = 0.0;
    for (double v : dist) {
      if (v < 0.0) throw NotADistribution(std::string(name) + " has a negative mass");
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-6) {
      throw NotADistribution(std::string(name) + " does not sum to 1 (got " +
                             std::to_string(sum) + ")");
    }
  };
  check(p, "p");
  check(q, "q");

  double divergence = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    divergence += p[i] * std::log((p[i] + epsilon) / (q[i] + epsilon));
  }
  return divergence;
}

CostEstimate estimate_cost(double n, double c1, double c2, double c3,
                           double a1, double a2, double a3) {
  auto check_ratio = [](double a, const char* name) {
    if (!(a > 0.0 && a <= 1.0)) {
      throw InvalidRatio(std::string(name) + " must be in (0, 1]");
    }
  };
  if (!(n > 0.0) || !(c1 > 0.0) || !(c2 > 0.0) || !(c3 > 0.0)) {
    throw InvalidRatio("n and chunk sizes must be positive");
  }
  check_ratio(a1, "a1");
  check_ratio(a2, "a2");
  check_ratio(a3, "a3");

  CostEstimate estimate;
  estimate.n = n;
  estimate.chunk_sizes = {c1, c2, c3};
  estimate.compression_ratios = {a1, a2, a3};
  estimate.stages[0] = {n * c1, n * a1 * c1};
  estimate.stages[1] = {a1 * n * c2, a1 * a2 * n * c2};
  estimate.stages[2] = {a1 * a2 * n * c3, a1 * a2 * a3 * n * c3};
  estimate.total =
      n * (c1 * (1.0 + a1) + a1 * c2 * (1.0 + a2) + a1 * a2 * c3 * (1.0 + a3));
  return estimate;
}

std::string format_table(const std::vector<std::string>& header,
                         const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> widths(header.size(), 0);
  for (std::size_t c = 0; c < header.size(); ++c) widths[c] = header[c].size();
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size() && c < widths.size(); ++c) {
      widths[c] = std::max(widths[c], row[c].size());
    }
  }
  std::ostringstream out;
  auto emit_row = [&](const std::vector<std::string>& row) {
    for (std::size_t c = 0; c < widths.size(); ++c) {
      const std::string& cell = c < row.size() ? row[c] : std::string();
      out << cell << std::string(widths[c] - cell.size(), ' ');
      if (c + 1 < widths.size()) out << "  ";
    }
    out << '\n';
  };
  emit_row(header);
  std::vector<std::string> rule;
  for (std::size_t w : widths) rule.push_back(std::string(w, '-'));
  emit_row(rule);
  for (const auto& row : rows) emit_row(row);
  return out.str();
}

nlohmann::json to_json(const LarReport& report) {
  return {{"generated_len", report.generated_len},
          {"target_len", report.target_len},
          {"lar", report.lar}};
}

nlohmann::json to_json(const ContaminationReport& report) {
  nlohmann::json per_n = nlohmann::json::object();
  for (const auto& [n, pct] : report.per_n) per_n[std::to_string(n)] = pct;
  return {{"per_n", per_n}};
}

nlohmann::json to_json(const UtilizationHistogram& histogram) {
  nlohmann::json assignments = nlohmann::json::array();
  for (const UtilizationAssignment& a : histogram.assignments) {
    assignments.push_back({{"sentence_index", a.sentence_index},
                           {"bin", a.bin},
                           {"score", a.score},
                           {"zero_score", a.zero_score}});
  }
  return {{"bins", histogram.bins}, {"assignments", assignments}};
}

nlohmann::json to_json(const CostEstimate& estimate) {
  nlohmann::json stages = nlohmann::json::array();
  for (const CostEstimate::StageCost& stage : estimate.stages) {
    stages.push_back({{"encoded_tokens", stage.encoded_tokens},
                      {"decoded_tokens", stage.decoded_tokens}});
  }
  return {{"n", estimate.n},
          {"chunk_sizes", estimate.chunk_sizes},
          {"compression_ratios", estimate.compression_ratios},
          {"stages", stages},
          {"total", estimate.total}};
}

std::string to_table(const LarReport& report) {
  return format_table({"generated_len", "target_len", "lar"},
                      {{std::to_string(report.generated_len),
                        std::to_string(report.target_len),
                        format_fixed(report.lar, 4)}});
}

std::string to_table(const ContaminationReport& report) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& [n, pct] : report.per_n) {
    rows.push_back({std::to_string(n), format_fixed(pct, 2) + "%"});
  }
  return format_table({"n", "overlap"}, rows);
}

std::string to_table(const UtilizationHistogram& histogram) {
  std::vector<std::vector<std::string>> rows;
  for (std::size_t b = 0; b < histogram.bins.size(); ++b) {
    rows.push_back({std::to_string(b), format_fixed(histogram.bins[b], 4)});
  }
  return format_table({"bin", "probability"}, rows);
}

std::string to_table(const CostEstimate& estimate) {
  static const char* names[3] = {"preprocessor", "summarizer", "compressor"};
  std::vector<std::vector<std::string>> rows;
  for (std::size_t s = 0; s < estimate.stages.size(); ++s) {
    rows.push_back({names[s],
                    format_fixed(estimate.stages[s].encoded_tokens, 2),
                    format_fixed(estimate.stages[s].decoded_tokens, 2)});
  }
  rows.push_back({"total", format_fixed(estimate.total, 2), ""});
  return format_table({"stage", "encoded_tokens", "decoded_tokens"}, rows);
}

std::string to_csv(const UtilizationHistogram& histogram) {
  std::ostringstream out;
  out << "bin,probability\n";
  for (std::size_t b = 0; b < histogram.bins.size(); ++b) {
    out << b << ',' << format_fixed(histogram.bins[b], 6) << '\n';
  }
  return out.str();
}

}  // namespace nexussum
