#include "abcauth/protocol/session_log.hpp"

#include <istream>
#include <ostream>

#include "json.hpp"

#include "abcauth/common/error.hpp"

namespace abcauth::protocol {

namespace {

const Check kAllChecks[] = {Check::kQrIntegrity, Check::kFingerprintMatch, Check::kForgeryDetection,
                            Check::kRemovalDetection, Check::kMotionMatch};

Check check_from_string(const std::string& s) {
  for (Check c : kAllChecks) {
    if (to_string(c) == s) return c;
  }
  fail(ErrorCode::kIoFailure, "unknown check '" + s + "' in session log");
}

CheckOutcome outcome_from_string(const std::string& s) {
  for (CheckOutcome o : {CheckOutcome::kPass, CheckOutcome::kFail, CheckOutcome::kSkipped}) {
    if (to_string(o) == s) return o;
  }
  fail(ErrorCode::kIoFailure, "unknown outcome '" + s + "' in session log");
}

}  // namespace

std::string to_json_line(const SessionRecord& record) {
  nlohmann::ordered_json j;
  j["session_id"] = record.session_id;
  j["device_id"] = record.device_id;
  j["accepted"] = record.verdict.accepted;
  nlohmann::ordered_json checks = nlohmann::ordered_json::object();
  for (const auto& [check, outcome] : record.verdict.checks) checks[std::string(to_string(check))] = to_string(outcome);
  j["checks"] = checks;
  nlohmann::ordered_json pce = nlohmann::ordered_json::object();
  for (const auto& [name, value] : record.verdict.pce) pce[name] = value;
  j["pce"] = pce;
  j["issued_ms"] = record.issued_ms;
  j["verified_ms"] = record.verified_ms;
  return j.dump();
}

SessionRecord parse_json_line(const std::string& line) {
  try {
    const auto j = nlohmann::json::parse(line);
    SessionRecord r;
    r.session_id = j.at("session_id").get<std::string>();
    r.device_id = j.at("device_id").get<std::string>();
    r.verdict.accepted = j.at("accepted").get<bool>();
    for (const auto& [k, v] : j.at("checks").items()) {
      r.verdict.checks[check_from_string(k)] = outcome_from_string(v.get<std::string>());
    }
    for (const auto& [k, v] : j.at("pce").items()) r.verdict.pce[k] = v.get<double>();
    r.issued_ms = j.at("issued_ms").get<std::int64_t>();
    r.verified_ms = j.at("verified_ms").get<std::int64_t>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kIoFailure, std::string("bad session log line: ") + e.what());
  }
}

void SessionLog::append(const SessionRecord& record) {
  const std::string line = to_json_line(record);
  std::lock_guard lock(mutex_);
  out_ << line << '\n';
  out_.flush();
}

std::vector<SessionRecord> read_session_log(std::istream& in) {
  std::vector<SessionRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out.push_back(parse_json_line(line));
  }
  return out;
}

}  // namespace abcauth::protocol
