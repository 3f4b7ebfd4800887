#pragma once

#include <vector>

namespace bhq::io {

struct TimeSeries {
  std::vector<double> t;
  std::vector<double> y;
};

// Two series brought onto a shared time grid. When the grids already agree
// the values pass through untouched; otherwise b is linearly interpolated
// onto the part of a's grid inside the overlap and `resampled` is set.
struct AlignedSeries {
  std::vector<double> t;
  std::vector<double> a;
  std::vector<double> b;
  bool resampled = false;
};

struct SeriesMetrics {
  double max_abs = 0.0;
  double max_rel = 0.0;  // |a-b| / max(|a|, |b|, floor)
  double rms = 0.0;
  bool resampled = false;
};

// Throws std::runtime_error when the time ranges are disjoint and
// std::invalid_argument on empty or non-increasing grids.
AlignedSeries align_series(const TimeSeries& a, const TimeSeries& b);

SeriesMetrics series_metrics(const AlignedSeries& aligned, double rel_floor = 1e-4);

inline SeriesMetrics compare_series(const TimeSeries& a, const TimeSeries& b,
                                    double rel_floor = 1e-4) {
  return series_metrics(align_series(a, b), rel_floor);
}

}  // namespace bhq::io
