#pragma once

#include <cstdint>
#include <iosfwd>
#include <mutex>
#include <string>
#include <vector>

#include "abcauth/protocol/verifier.hpp"

namespace abcauth::protocol {

// One JSON object per line:
//   {"session_id":..,"device_id":..,"accepted":..,"checks":{"qr_integrity":"pass",..},
//    "pce":{"fingerprint":..,..},"issued_ms":..,"verified_ms":..}
struct SessionRecord {
  std::string session_id;
  std::string device_id;
  VerificationVerdict verdict;
  std::int64_t issued_ms = 0;
  std::int64_t verified_ms = 0;
};

std::string to_json_line(const SessionRecord& record);
SessionRecord parse_json_line(const std::string& line);

class SessionLog {
 public:
  explicit SessionLog(std::ostream& out) : out_(out) {}
  void append(const SessionRecord& record);

 private:
  std::mutex mutex_;
  std::ostream& out_;
};

std::vector<SessionRecord> read_session_log(std::istream& in);

}  // namespace abcauth::protocol
