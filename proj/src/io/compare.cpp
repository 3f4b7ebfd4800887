#include "bhq/io/compare.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bhq::io {

namespace {

void check_series(const TimeSeries& s, const char* name) {
  if (s.t.empty()) throw std::invalid_argument(std::string(name) + " series is empty");
  if (s.t.size() != s.y.size())
    throw std::invalid_argument(std::string(name) + " series has mismatched t/y lengths");
  for (std::size_t i = 1; i < s.t.size(); ++i)
    if (!(s.t[i] > s.t[i - 1]))
      throw std::invalid_argument(std::string(name) + " series time grid must increase");
}

double interpolate(const TimeSeries& s, double t) {
  auto upper = std::upper_bound(s.t.begin(), s.t.end(), t);
  if (upper == s.t.begin()) return s.y.front();
  if (upper == s.t.end()) return s.y.back();
  const std::size_t hi = static_cast<std::size_t>(upper - s.t.begin());
  const std::size_t lo = hi - 1;
  const double w = (t - s.t[lo]) / (s.t[hi] - s.t[lo]);
  return s.y[lo] + w * (s.y[hi] - s.y[lo]);
}

}  // namespace

AlignedSeries align_series(const TimeSeries& a, const TimeSeries& b) {
  check_series(a, "first");
  check_series(b, "second");

  AlignedSeries out;
  const double span = std::max({1.0, std::abs(a.t.front()), std::abs(a.t.back()),
                                std::abs(b.t.front()), std::abs(b.t.back())});
  const double tol = 1e-9 * span;

  if (a.t.size() == b.t.size()) {
    bool same = true;
    for (std::size_t i = 0; i < a.t.size(); ++i)
      if (std::abs(a.t[i] - b.t[i]) > tol) {
        same = false;
        break;
      }
    if (same) {
      out.t = a.t;
      out.a = a.y;
      out.b = b.y;
      return out;
    }
  }

  const double lo = std::max(a.t.front(), b.t.front());
  const double hi = std::min(a.t.back(), b.t.back());
  if (lo > hi + tol) throw std::runtime_error("series time ranges are disjoint");

  out.resampled = true;
  for (std::size_t i = 0; i < a.t.size(); ++i) {
    if (a.t[i] < lo - tol || a.t[i] > hi + tol) continue;
    out.t.push_back(a.t[i]);
    out.a.push_back(a.y[i]);
    out.b.push_back(interpolate(b, a.t[i]));
  }
  if (out.t.empty()) throw std::runtime_error("series overlap contains no samples");
  return out;
}

SeriesMetrics series_metrics(const AlignedSeries& aligned, double rel_floor) {
  if (rel_floor <= 0) throw std::invalid_argument("relative-difference floor must be positive");
  SeriesMetrics m;
  m.resampled = aligned.resampled;
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < aligned.t.size(); ++i) {
    const double diff = std::abs(aligned.a[i] - aligned.b[i]);
    m.max_abs = std::max(m.max_abs, diff);
    const double denom = std::max({std::abs(aligned.a[i]), std::abs(aligned.b[i]), rel_floor});
    m.max_rel = std::max(m.max_rel, diff / denom);
    sum_sq += diff * diff;
  }
  m.rms = std::sqrt(sum_sq / static_cast<double>(aligned.t.size()));
  return m;
}

}  // namespace bhq::io
