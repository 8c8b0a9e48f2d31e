#include "abcauth/harness/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "abcauth/common/error.hpp"

namespace abcauth::harness {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {
constexpr const char* kReportFormat = "abcauth-report/1";

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIoFailure, "cannot write " + path.string());
  out << text;
  if (!out) fail(ErrorCode::kIoFailure, "write failed for " + path.string());
}
}  // namespace

const ThresholdRow& EvalReport::row_at(double threshold) const {
  for (const ThresholdRow& r : rows) {
    if (r.threshold == threshold) return r;
  }
  fail(ErrorCode::kConfigInvalid, "threshold " + std::to_string(threshold) + " is not on the sweep");
}

double calibrate_threshold(const EvalReport& baseline, double target_far) {
  for (const ThresholdRow& r : baseline.rows) {
    if (r.fdrd_far <= target_far) return r.threshold;
  }
  fail(ErrorCode::kNoThresholdSatisfies,
       "no sweep threshold brings the baseline FD+RD FAR down to " + std::to_string(target_far));
}

OperatingPoint operating_point(const EvalReport& report, double threshold) {
  const ThresholdRow& r = report.row_at(threshold);
  OperatingPoint p;
  p.threshold = threshold;
  p.false_accepts = r.fdrd_accepted;
  p.false_rejects = r.genuine_rejected;
  p.far = r.fdrd_far;
  p.frr = r.frr;
  const std::size_t total = report.genuine_sessions + report.attack_sessions;
  p.accuracy = total == 0 ? 0.0 : static_cast<double>(total - p.false_accepts - p.false_rejects) / total;
  return p;
}

std::string report_csv(const EvalReport& report) {
  std::ostringstream out;
  out << "threshold,fd_far,rd_far,fdrd_far,frr\n";
  char buf[160];
  for (const ThresholdRow& r : report.rows) {
    std::snprintf(buf, sizeof buf, "%.10g,%.6f,%.6f,%.6f,%.6f\n", r.threshold, r.fd_far, r.rd_far, r.fdrd_far, r.frr);
    out << buf;
  }
  return out.str();
}

ordered_json report_json(const EvalReport& report) {
  ordered_json j;
  j["format"] = kReportFormat;
  j["scheme"] = report.scheme;
  j["attack"] = report.attack;
  j["registration_images"] = report.registration_images;
  j["genuine_sessions"] = report.genuine_sessions;
  j["attack_sessions"] = report.attack_sessions;
  j["seed"] = report.seed;
  j["config_hash"] = report.config_hash;
  j["calibrated_threshold"] = report.calibrated_threshold ? ordered_json(*report.calibrated_threshold) : ordered_json();
  if (report.operating) {
    const OperatingPoint& p = *report.operating;
    j["operating_point"] = {{"threshold", p.threshold}, {"false_accepts", p.false_accepts},
                            {"false_rejects", p.false_rejects}, {"far", p.far},
                            {"frr", p.frr}, {"accuracy", p.accuracy}};
  } else {
    j["operating_point"] = nullptr;
  }
  if (report.motion) {
    const MotionSummary& m = *report.motion;
    j["motion"] = {{"classes", m.classes},
                   {"cnn_val_accuracy", m.cnn_val_accuracy},
                   {"convlstm_val_accuracy", m.convlstm_val_accuracy},
                   {"ensemble_val_accuracy", m.ensemble_val_accuracy},
                   {"cnn_epochs", m.cnn_epochs},
                   {"convlstm_epochs", m.convlstm_epochs}};
  } else {
    j["motion"] = nullptr;
  }
  if (report.wall_time_s) j["wall_time_s"] = *report.wall_time_s;
  ordered_json rows = ordered_json::array();
  for (const ThresholdRow& r : report.rows) {
    rows.push_back({{"threshold", r.threshold},
                    {"fd_accepted", r.fd_accepted},
                    {"rd_accepted", r.rd_accepted},
                    {"fdrd_accepted", r.fdrd_accepted},
                    {"genuine_rejected", r.genuine_rejected},
                    {"fd_far", r.fd_far},
                    {"rd_far", r.rd_far},
                    {"fdrd_far", r.fdrd_far},
                    {"frr", r.frr}});
  }
  j["rows"] = rows;
  j["config"] = report.config;
  return j;
}

EvalReport report_from_json(const ordered_json& j) {
  try {
    if (j.at("format").get<std::string>() != kReportFormat) {
      fail(ErrorCode::kFormatVersionMismatch, "unsupported report format '" + j.at("format").get<std::string>() + "'");
    }
    EvalReport r;
    r.scheme = j.at("scheme").get<std::string>();
    r.attack = j.at("attack").get<std::string>();
    r.registration_images = j.at("registration_images").get<int>();
    r.genuine_sessions = j.at("genuine_sessions").get<std::size_t>();
    r.attack_sessions = j.at("attack_sessions").get<std::size_t>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.config_hash = j.at("config_hash").get<std::string>();
    if (!j.at("calibrated_threshold").is_null()) r.calibrated_threshold = j.at("calibrated_threshold").get<double>();
    if (!j.at("operating_point").is_null()) {
      const json& p = j.at("operating_point");
      r.operating = OperatingPoint{p.at("threshold").get<double>(),  p.at("false_accepts").get<std::size_t>(),
                                   p.at("false_rejects").get<std::size_t>(), p.at("far").get<double>(),
                                   p.at("frr").get<double>(),        p.at("accuracy").get<double>()};
    }
    if (!j.at("motion").is_null()) {
      const json& m = j.at("motion");
      r.motion = MotionSummary{m.at("classes").get<int>(),
                               m.at("cnn_val_accuracy").get<double>(),
                               m.at("convlstm_val_accuracy").get<double>(),
                               m.at("ensemble_val_accuracy").get<double>(),
                               m.at("cnn_epochs").get<int>(),
                               m.at("convlstm_epochs").get<int>()};
    }
    if (j.contains("wall_time_s")) r.wall_time_s = j.at("wall_time_s").get<double>();
    for (const json& row : j.at("rows")) {
      ThresholdRow t;
      t.threshold = row.at("threshold").get<double>();
      t.fd_accepted = row.at("fd_accepted").get<std::size_t>();
      t.rd_accepted = row.at("rd_accepted").get<std::size_t>();
      t.fdrd_accepted = row.at("fdrd_accepted").get<std::size_t>();
      t.genuine_rejected = row.at("genuine_rejected").get<std::size_t>();
      t.fd_far = row.at("fd_far").get<double>();
      t.rd_far = row.at("rd_far").get<double>();
      t.fdrd_far = row.at("fdrd_far").get<double>();
      t.frr = row.at("frr").get<double>();
      r.rows.push_back(t);
    }
    r.config = j.at("config");
    return r;
  } catch (const json::exception& e) {
    fail(ErrorCode::kFormatVersionMismatch, std::string("malformed report: ") + e.what());
  }
}

void save_report(const EvalReport& report, const std::filesystem::path& stem) {
  std::filesystem::path csv = stem, js = stem;
  csv += ".csv";
  js += ".json";
  write_file(csv, report_csv(report));
  write_file(js, report_json(report).dump(2) + "\n");
}

EvalReport load_report(const std::filesystem::path& json_path) {
  std::ifstream in(json_path);
  if (!in) fail(ErrorCode::kIoFailure, "cannot open " + json_path.string());
  ordered_json j;
  try {
    j = ordered_json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorCode::kIoFailure, "report " + json_path.string() + " is not valid JSON: " + e.what());
  }
  return report_from_json(j);
}

}  // namespace abcauth::harness
