#pragma once

// CSV emitters and the run manifest. Column names and order are part of the
// public file format:
//   fields_zNNNN.csv       z,t,omega_a_re,omega_a_im,omega_b_re,omega_b_im,omega_c_re,omega_c_im,omega_d_re,omega_d_im
//   areas.csv              z,theta_a,theta_b,theta_c,theta_d,theta_1,theta_2,theta_total
//   magnitude_areas.csv    z,abs_area_a,abs_area_b,abs_area_c,abs_area_d
//   peaks.csv              z,t_peak_a,t_peak_b,t_peak_c,t_peak_d,amp_a,amp_b,amp_c,amp_d
//   fits.csv               z,channel,amplitude,width,center,area,rms_residual

#include <array>
#include <cstdint>
#include <filesystem>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "mbx4/areas.hpp"
#include "mbx4/core.hpp"
#include "mbx4/result.hpp"

namespace mbx4 {

inline constexpr const char* kEngineVersion = "0.1.0";

extern const char* const kFieldsHeader;
extern const char* const kAreasHeader;
extern const char* const kMagnitudeAreasHeader;
extern const char* const kPeaksHeader;
extern const char* const kFitsHeader;

/// Shortest round-trippable decimal form ("%.17g"); non-finite values print as nan/inf.
std::string format_number(double x);

void write_fields_csv(std::ostream& out, const FieldSnapshot& snapshot, const RetardedGrid& grid);
void write_areas_csv(std::ostream& out, std::span<const AreaRecord> records);
void write_magnitude_areas_csv(std::ostream& out, std::span<const AreaRecord> records,
                               std::span<const std::array<double, 4>> magnitudes);
void write_peaks_csv(std::ostream& out, const PeakTrack& track);
/// One row per channel whose envelope admits a sech fit; other channels are skipped.
void write_fits_csv(std::ostream& out, std::span<const FieldSnapshot> snapshots, const RetardedGrid& grid);

/// Writes `content` through `writer` to dir/name and returns the path.
template <typename Writer>
std::filesystem::path write_file(const std::filesystem::path& dir, const std::string& name, Writer&& writer);

/// "fields_z0003.csv"
std::string fields_file_name(int index);

/// 64-bit FNV-1a of the canonical (sorted-key, compact) JSON dump.
std::uint64_t config_hash(const nlohmann::json& doc);

struct RunManifest {
  std::string command;
  std::uint64_t config_hash = 0;
  std::string engine_version = kEngineVersion;
  std::string started_at;
  std::string finished_at;
  std::vector<std::string> outputs;
  int n_t = 0;
  int n_z = 0;
  int n_detuning = 0;
  std::string status = "ok";
  std::optional<double> last_good_z;
  std::string message;
};

nlohmann::json to_json(const RunManifest& manifest);

/// ISO-8601 UTC timestamp of the current time.
std::string utc_timestamp();

}  // namespace mbx4

#include <fstream>

#include "mbx4/errors.hpp"

template <typename Writer>
std::filesystem::path mbx4::write_file(const std::filesystem::path& dir, const std::string& name, Writer&& writer) {
  const std::filesystem::path path = dir / name;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  writer(out);
  if (!out) throw std::runtime_error("failed while writing " + path.string());
  return path;
}
