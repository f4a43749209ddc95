#include "mbx4/io.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>

#include "mbx4/diagnostics.hpp"

namespace mbx4 {

const char* const kFieldsHeader =
    "z,t,omega_a_re,omega_a_im,omega_b_re,omega_b_im,omega_c_re,omega_c_im,omega_d_re,omega_d_im";
const char* const kAreasHeader = "z,theta_a,theta_b,theta_c,theta_d,theta_1,theta_2,theta_total";
const char* const kMagnitudeAreasHeader = "z,abs_area_a,abs_area_b,abs_area_c,abs_area_d";
const char* const kPeaksHeader = "z,t_peak_a,t_peak_b,t_peak_c,t_peak_d,amp_a,amp_b,amp_c,amp_d";
const char* const kFitsHeader = "z,channel,amplitude,width,center,area,rms_residual";

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_fields_csv(std::ostream& out, const FieldSnapshot& snapshot, const RetardedGrid& grid) {
  out << kFieldsHeader << '\n';
  const std::string z = format_number(snapshot.z);
  for (int i = 0; i < snapshot.size(); ++i) {
    out << z << ',' << format_number(grid.time(i));
    for (int ch = 0; ch < 4; ++ch) {
      out << ',' << format_number(snapshot.omega(i, ch).real()) << ',' << format_number(snapshot.omega(i, ch).imag());
    }
    out << '\n';
  }
}

void write_areas_csv(std::ostream& out, std::span<const AreaRecord> records) {
  out << kAreasHeader << '\n';
  for (const AreaRecord& r : records) {
    out << format_number(r.z);
    for (double th : r.theta) out << ',' << format_number(th);
    out << ',' << format_number(r.theta_1) << ',' << format_number(r.theta_2) << ',' << format_number(r.theta_total)
        << '\n';
  }
}

void write_magnitude_areas_csv(std::ostream& out, std::span<const AreaRecord> records,
                               std::span<const std::array<double, 4>> magnitudes) {
  out << kMagnitudeAreasHeader << '\n';
  for (std::size_t k = 0; k < records.size() && k < magnitudes.size(); ++k) {
    out << format_number(records[k].z);
    for (double m : magnitudes[k]) out << ',' << format_number(m);
    out << '\n';
  }
}

void write_peaks_csv(std::ostream& out, const PeakTrack& track) {
  out << kPeaksHeader << '\n';
  for (std::size_t k = 0; k < track.z.size(); ++k) {
    out << format_number(track.z[k]);
    for (const auto& t : track.time) out << ',' << format_number(t[k]);
    for (const auto& a : track.amplitude) out << ',' << format_number(a[k]);
    out << '\n';
  }
}

void write_fits_csv(std::ostream& out, std::span<const FieldSnapshot> snapshots, const RetardedGrid& grid) {
  out << kFitsHeader << '\n';
  for (const FieldSnapshot& s : snapshots) {
    for (Channel ch : kChannels) {
      SechFit fit;
      try {
        fit = fit_sech(s.channel(ch), grid);
      } catch (const DiagnosticError&) {
        continue;
      }
      out << format_number(s.z) << ',' << channel_name(ch) << ',' << format_number(fit.amplitude) << ','
          << format_number(fit.width) << ',' << format_number(fit.center) << ',' << format_number(fit.area()) << ','
          << format_number(fit.rms_residual) << '\n';
    }
  }
}

std::string fields_file_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "fields_z%04d.csv", index);
  return buf;
}

std::uint64_t config_hash(const nlohmann::json& doc) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : doc.dump()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

nlohmann::json to_json(const RunManifest& m) {
  char hash[20];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(m.config_hash));
  nlohmann::json doc = {{"command", m.command},
                        {"config_hash", hash},
                        {"engine_version", m.engine_version},
                        {"started_at", m.started_at},
                        {"finished_at", m.finished_at},
                        {"outputs", m.outputs},
                        {"convergence", {{"n_t", m.n_t}, {"n_z", m.n_z}, {"n_detuning", m.n_detuning}}},
                        {"status", m.status}};
  if (m.last_good_z) doc["last_good_z"] = *m.last_good_z;
  if (!m.message.empty()) doc["message"] = m.message;
  return doc;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace mbx4
