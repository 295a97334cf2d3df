#include "holab/classify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "holab/numerics.hpp"

namespace holab {

namespace {

constexpr double kGapTolerance = 0.005;
constexpr double kRSquared = 0.99;
constexpr double kContracting = 0.9;
constexpr double kFarU = 1e12;
constexpr double kMidU = 1e6;

bool geometric_decay(std::span<const double> d, double limit) {
  int ratios = 0;
  for (std::size_t j = 1; j < d.size(); ++j) {
    double a = std::abs(d[j - 1]), b = std::abs(d[j]);
    if (a == 0.0 && b == 0.0) continue;
    if (a == 0.0 || b / a > limit) return false;
    ++ratios;
  }
  return ratios >= 2;
}

// log of the integral of exp(g(u)) du / h over [a, b], trapezoid on a
// geometric grid in (u - a0).
double log_tail_integral(const std::function<double(double)>& g, double a, double b, double h) {
  const int points = 4000;
  const double lo = std::log(h), hi = std::log(b - a + h);
  double acc = -kInf;
  double prev_u = a, prev_g = g(a);
  for (int i = 1; i <= points; ++i) {
    double u = a - h + std::exp(lo + (hi - lo) * i / points);
    double gu = g(u);
    double width = u - prev_u;
    if (width > 0.0) {
      double m = std::max(prev_g, gu);
      if (std::isfinite(m)) {
        double term = m + std::log(0.5 * (std::exp(prev_g - m) + std::exp(gu - m)) * width / h);
        acc = log_add_exp(acc, term);
      } else if (m > 0.0) {
        return kInf;
      }
    }
    prev_u = u;
    prev_g = gu;
  }
  return acc;
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Finite:
      return "finite";
    case Verdict::Divergent:
      return "divergent";
    case Verdict::Inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

TailEstimate extrapolate_tail(std::span<const double> u, std::span<const double> partials,
                              const TailProbe& probe) {
  TailEstimate out;
  const std::size_t k = partials.size();
  if (k < 5 || probe.sizes.size() != k || !probe.log_psi) return out;
  const std::size_t window = std::min<std::size_t>(8, k - 1);
  const std::size_t first = k - window;
  const double total = partials.back();

  std::vector<double> lu, lm, su, s;
  double largest = 0.0;
  for (std::size_t i = first; i < k; ++i) {
    double c = partials[i] - partials[i - 1];
    largest = std::max(largest, c);
    s.push_back(probe.sizes[i]);
    su.push_back(u[i]);
    double lp = probe.log_psi(probe.sizes[i]);
    if (c > 0.0 && std::isfinite(lp)) {
      lu.push_back(u[i]);
      lm.push_back(std::log(c) - lp);
    }
  }
  if (largest <= 1e-15 * std::abs(total)) {
    out.available = true;
    out.size_model = "constant";
    out.measure_rate = -kInf;
    return out;
  }
  if (lu.size() < 3) return out;
  LinearFit mfit = fit_line(lu, lm);
  out.measure_rate = mfit.slope;

  // size model
  std::vector<double> ds;
  for (std::size_t j = 1; j < s.size(); ++j) ds.push_back(s[j] - s[j - 1]);
  double smax = 0.0, dmax = 0.0;
  for (double v : s) smax = std::max(smax, std::abs(v));
  for (double v : ds) dmax = std::max(dmax, std::abs(v));
  const double u_last = u[k - 1];
  const double s_last = s.back();
  std::function<double(double)> size_at;
  bool positive = std::all_of(s.begin(), s.end(), [](double v) { return v > 0.0; });
  LinearFit logfit{};
  if (positive) {
    std::vector<double> ls;
    for (double v : s) ls.push_back(std::log(v));
    logfit = fit_line(su, ls);
  }
  if (dmax <= 1e-12 * std::max(1.0, smax)) {
    out.size_model = "constant";
    size_at = [s_last](double) { return s_last; };
  } else if (positive && logfit.slope <= -0.05 && logfit.r_squared > kRSquared) {
    out.size_model = "exp-decay";
    size_at = [logfit](double x) { return std::exp(logfit.intercept + logfit.slope * x); };
  } else if (geometric_decay(ds, kContracting)) {
    double q = std::abs(ds.back() / ds[ds.size() - 2]);
    double limit = s_last + ds.back() * q / (1.0 - q);
    out.size_model = "limit";
    size_at = [limit](double) { return limit; };
  } else {
    std::vector<double> logu;
    for (double x : su) logu.push_back(std::log(x));
    LinearFit lin = fit_line(su, s);
    LinearFit lg = fit_line(logu, s);
    double best = lin.r_squared;
    out.size_model = "linear";
    size_at = [lin](double x) { return std::max(0.0, lin.intercept + lin.slope * x); };
    if (lg.r_squared > best) {
      best = lg.r_squared;
      out.size_model = "log";
      size_at = [lg](double x) { return std::max(0.0, lg.intercept + lg.slope * std::log(x)); };
    }
    if (positive && logfit.slope > 0.05 && logfit.r_squared > best) {
      out.size_model = "exp-growth";
      size_at = [logfit](double x) { return std::exp(std::min(700.0, logfit.intercept + logfit.slope * x)); };
    }
  }

  const double h = k >= 2 ? u[k - 1] - u[k - 2] : std::log(2.0);
  auto g = [&](double x) { return mfit.intercept + mfit.slope * x + probe.log_psi(size_at(x)); };
  double mid = log_tail_integral(g, u_last + h, kMidU, h);
  double far = log_tail_integral(g, u_last + h, kFarU, h);
  out.available = true;
  if (!std::isfinite(far) || far > 700.0 || (std::isfinite(mid) && far - mid > std::log(1.5))) {
    out.divergent = true;
    out.remainder = kInf;
  } else {
    out.remainder = std::exp(far);
  }
  return out;
}

Classification classify(std::span<const double> u, std::span<const double> partials, const TailProbe* probe) {
  Classification out;
  const std::size_t k = partials.size();
  if (k == 0) {
    out.rule = "empty";
    return out;
  }
  for (double p : partials) {
    if (!std::isfinite(p)) {
      out.verdict = Verdict::Divergent;
      out.rule = "overflow";
      out.last_gap = kInf;
      return out;
    }
  }
  const double last = partials[k - 1];
  const double prev = k >= 2 ? partials[k - 2] : last;
  out.last_gap = last != 0.0 ? std::abs(last - prev) / std::abs(last) : std::abs(last - prev);

  // model fits over the second half of the schedule
  const std::size_t start = k / 2;
  std::vector<double> x, logx, y, logy;
  bool positive = true;
  for (std::size_t i = start; i < k; ++i) {
    x.push_back(u[i]);
    logx.push_back(std::log(std::max(u[i], 1e-300)));
    y.push_back(partials[i]);
    positive = positive && partials[i] > 0.0;
    logy.push_back(partials[i] > 0.0 ? std::log(partials[i]) : 0.0);
  }
  if (x.size() >= 3) {
    double mean = 0.0;
    for (double v : y) mean += v / static_cast<double>(y.size());
    out.fits.push_back({"constant", mean, 0.0, 0.0});
    auto push = [&](const std::string& name, std::span<const double> xs, std::span<const double> ys) {
      LinearFit f = fit_line(xs, ys);
      out.fits.push_back({name, f.intercept, f.slope, f.r_squared});
    };
    push("log", logx, y);
    push("linear", x, y);
    if (positive) push("exp", x, logy);
    out.best = out.fits[1];
    for (std::size_t i = 2; i < out.fits.size(); ++i) {
      if (out.fits[i].r_squared > out.best.r_squared) out.best = out.fits[i];
    }
  }

  std::vector<double> inc;
  for (std::size_t i = std::max<std::size_t>(1, k >= 6 ? k - 5 : 1); i < k; ++i) {
    inc.push_back(partials[i] - partials[i - 1]);
  }
  bool flat = std::all_of(inc.begin(), inc.end(), [&](double d) { return std::abs(d) <= 1e-15 * std::abs(last); });
  bool contracting = flat || geometric_decay(inc, kContracting);
  if (inc.size() >= 2 && inc[inc.size() - 2] != 0.0) out.increment_ratio = inc.back() / inc[inc.size() - 2];

  if (probe) out.tail = extrapolate_tail(u, partials, *probe);
  if (out.tail.divergent) {
    out.verdict = Verdict::Divergent;
    out.rule = "tail-probe";
    return out;
  }
  const double rel_remainder = out.tail.available && last != 0.0 ? out.tail.remainder / std::abs(last) : 0.0;
  if (out.last_gap < kGapTolerance && rel_remainder < kGapTolerance && (contracting || out.last_gap < 1e-9)) {
    out.verdict = Verdict::Finite;
    out.rule = "last-gap";
    return out;
  }
  if (!contracting && out.best.r_squared > kRSquared && out.best.slope > 0.0) {
    out.verdict = Verdict::Divergent;
    out.rule = "growth-fit:" + out.best.model;
    return out;
  }
  out.verdict = Verdict::Inconclusive;
  out.rule = "undecided";
  return out;
}

}  // namespace holab
