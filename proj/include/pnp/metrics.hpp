#pragma once

#include "pnp/denoisers.hpp"
#include "pnp/forward_models.hpp"

#include <vector>

namespace pnp {

struct IterateTrace;

/// Exact-match SNRs are reported as this cap instead of +inf.
inline constexpr double kSnrCapDb = 300.0;

/// ||x - P(x)||^2.
double dist_to_fix(const MeasurementModel& model, const Denoiser& denoiser, double gamma, double sigma,
                   const RealVec& x);

/// 20 log10(||reference|| / ||estimate - reference||), capped at kSnrCapDb.
double snr_db(const RealVec& reference, const RealVec& estimate);

struct TraceSummary {
  double min_dist = 0.0;
  std::vector<double> running_avg_dist;  // entry j: mean of dist_0..dist_j
  double final_snr_db = 0.0;
  int iterations = 0;
  double per_iteration_seconds = 0.0;
};

/// Summary of a dist sequence; NaN entries (strided, not computed) are skipped.
TraceSummary summarize(const std::vector<double>& dists);
TraceSummary summarize(const IterateTrace& trace);

/// Arithmetic mean of per-image dB values.
double average_snr_db(const std::vector<double>& per_image_db);

}  // namespace pnp
