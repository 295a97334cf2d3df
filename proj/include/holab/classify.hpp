#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace holab {

enum class Verdict { Finite, Divergent, Inconclusive };
std::string to_string(Verdict v);

/// Least-squares fit of partials against one growth model in u = log(1/eps).
struct ModelFit {
  std::string model;  // "constant", "log", "linear", "exp"
  double intercept = 0.0;
  double slope = 0.0;
  double r_squared = 0.0;
};

/// Per-level data for extrapolating the partial sums past the last cutoff:
/// the largest integrand argument reached at each level and log psi of it.
struct TailProbe {
  std::vector<double> sizes;
  std::function<double(double)> log_psi;
};

struct TailEstimate {
  bool available = false;
  bool divergent = false;
  std::string size_model;  // "constant", "limit", "exp-decay", "linear", "log", "exp-growth"
  double measure_rate = 0.0;  // d log(level measure) / du
  double remainder = 0.0;     // extrapolated sum of the levels beyond the schedule
};

struct Classification {
  Verdict verdict = Verdict::Inconclusive;
  std::string rule;  // which rule decided
  std::vector<ModelFit> fits;
  ModelFit best;     // best nonconstant model
  double last_gap = 0.0;
  double increment_ratio = 0.0;
  TailEstimate tail;
};

/// Extrapolates increments c_k = m_k psi(s_k): log m_k is fitted linearly in u
/// and s_k by the best of the size models, then summed far past the schedule.
TailEstimate extrapolate_tail(std::span<const double> u, std::span<const double> partials,
                              const TailProbe& probe);

/// Finite/Divergent/Inconclusive verdict for nondecreasing partials.
///
/// Non-finite partials and divergent tails are Divergent. Otherwise Finite when
/// the last two partials differ by < 0.5% and the extrapolated remainder is
/// < 0.5% as well; Divergent when a growing model (log u, u, exp u) fits the
/// second half with R^2 > 0.99 and the increments do not contract.
Classification classify(std::span<const double> u, std::span<const double> partials,
                        const TailProbe* probe = nullptr);

}  // namespace holab
