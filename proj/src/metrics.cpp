#include "pnp/metrics.hpp"

#include "pnp/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pnp {

double dist_to_fix(const MeasurementModel& model, const Denoiser& denoiser, double gamma, double sigma,
                   const RealVec& x) {
  return (x - operator_P(model, denoiser, gamma, sigma, x)).squaredNorm();
}

double snr_db(const RealVec& reference, const RealVec& estimate) {
  if (reference.size() != estimate.size()) throw ConfigError("snr_db: size mismatch");
  const double signal = reference.norm();
  if (signal == 0.0) throw ConfigError("snr_db: reference is identically zero");
  const double error = (estimate - reference).norm();
  if (error == 0.0) return kSnrCapDb;
  return std::min(kSnrCapDb, 20.0 * std::log10(signal / error));
}

TraceSummary summarize(const std::vector<double>& dists) {
  if (dists.empty()) throw ConfigError("summarize: trace is empty");
  TraceSummary s;
  s.min_dist = std::numeric_limits<double>::infinity();
  double sum = 0.0;
  std::size_t count = 0;
  s.running_avg_dist.reserve(dists.size());
  for (double d : dists) {
    if (!std::isnan(d)) {
      sum += d;
      ++count;
      s.min_dist = std::min(s.min_dist, d);
    }
    s.running_avg_dist.push_back(count ? sum / static_cast<double>(count)
                                       : std::numeric_limits<double>::quiet_NaN());
  }
  s.iterations = static_cast<int>(dists.size());
  s.final_snr_db = std::numeric_limits<double>::quiet_NaN();
  return s;
}

TraceSummary summarize(const IterateTrace& trace) {
  TraceSummary s = summarize(trace.dists());
  const auto& last = trace.records.back();
  s.iterations = last.k;
  s.final_snr_db = last.snr_db;
  if (s.iterations > 0) s.per_iteration_seconds = last.elapsed_seconds / s.iterations;
  return s;
}

double average_snr_db(const std::vector<double>& per_image_db) {
  if (per_image_db.empty()) throw ConfigError("average_snr_db: no values");
  double s = 0.0;
  for (double v : per_image_db) s += v;
  return s / static_cast<double>(per_image_db.size());
}

}  // namespace pnp
