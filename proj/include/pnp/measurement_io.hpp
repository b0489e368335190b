#pragma once

#include "pnp/forward_models.hpp"

#include <filesystem>
#include <string>

namespace pnp {

/*
 * PNPM1 binary measurement container (little-endian):
 *
 *   "PNPM1"                         5 bytes magic
 *   u8  kind                        1 = diffraction tomography, 2 = dense
 *   u64 n, u64 M, u64 I
 *   u32 width, u32 height
 *   geometry: f64 domain_side, u32 grid, f64 wavelength, f64 eps_background,
 *             u32 transmitters, u32 receivers, f64 ring_radius, u8 illumination
 *   u64 seed, f64 input_snr_db, f64 achieved_snr_db, f64 lipschitz
 *   u8  has_truth
 *   kind 1: S (M x n, row-major complex64), then u_in^i (n complex64) per i
 *   kind 2: H_i (M x n, row-major complex64) per i
 *   y_i (M complex64) per i
 *   truth (n f64) when has_truth
 *
 * All operator and measurement values are held at complex64 precision in
 * memory, so a loaded model is bit-identical to the one that was saved.
 */
std::string serialize_measurements(const MeasurementModel& model);
MeasurementModel deserialize_measurements(const std::string& bytes);

void save_measurements(const std::filesystem::path& path, const MeasurementModel& model);
MeasurementModel load_measurements(const std::filesystem::path& path);

}  // namespace pnp
