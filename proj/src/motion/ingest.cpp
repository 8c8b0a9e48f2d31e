#include "abcauth/motion/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "abcauth/common/error.hpp"

namespace abcauth::motion {

namespace {

struct Reading {
  double t;
  double v;
};

struct UserData {
  std::array<std::vector<Reading>, kChannelCount> channels;
  std::vector<double> taps;
};

double parse_number(std::string_view text, int line) {
  double out = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    fail(ErrorCode::kMalformedRow, "line " + std::to_string(line) + ": not a number: '" + std::string(text) + "'");
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

std::vector<RawMotionRecording> ingest_csv(std::istream& in) {
  std::map<std::string, UserData> users;
  std::vector<std::pair<std::string, double>> taps_in_order;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    if (line_no == 1 && view.starts_with("user")) continue;

    std::array<std::string_view, 5> fields;
    int count = 0;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = view.find(',', start);
      if (count == 5) {
        count = 6;
        break;
      }
      fields[count++] = trim(view.substr(start, comma == std::string_view::npos ? view.npos : comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (count != 5) {
      fail(ErrorCode::kMalformedRow, "line " + std::to_string(line_no) + ": expected 5 fields");
    }
    const std::string user(fields[0]);
    if (user.empty()) fail(ErrorCode::kMalformedRow, "line " + std::to_string(line_no) + ": empty user id");
    const double t = parse_number(fields[3], line_no);
    if (fields[1] == "tap") {
      users[user].taps.push_back(t);
      taps_in_order.emplace_back(user, t);
      continue;
    }
    const int ch = channel_index(fields[1], fields[2]);
    if (ch < 0) {
      fail(ErrorCode::kMalformedRow, "line " + std::to_string(line_no) + ": unknown sensor/axis '" +
                                         std::string(fields[1]) + "," + std::string(fields[2]) + "'");
    }
    users[user].channels[ch].push_back({t, parse_number(fields[4], line_no)});
  }

  for (auto& [_, data] : users) {
    for (auto& ch : data.channels) {
      std::stable_sort(ch.begin(), ch.end(), [](const Reading& a, const Reading& b) { return a.t < b.t; });
    }
  }

  std::vector<RawMotionRecording> out;
  out.reserve(taps_in_order.size());
  for (const auto& [user, tap] : taps_in_order) {
    const UserData& data = users.at(user);
    RawMotionRecording rec;
    rec.source_id = user;
    rec.tap_ms = static_cast<std::int64_t>(std::llround(tap));
    const double lo = tap - static_cast<double>(kWindowBeforeMs);
    const double hi = tap + static_cast<double>(kWindowAfterMs);
    for (int c = 0; c < kChannelCount; ++c) {
      for (const Reading& r : data.channels[c]) {
        if (r.t < lo || r.t > hi) continue;
        // Duplicate timestamps keep the first reading.
        if (!rec.channels[c].timestamps_ms.empty() && r.t <= rec.channels[c].timestamps_ms.back()) continue;
        rec.channels[c].timestamps_ms.push_back(r.t);
        rec.channels[c].values.push_back(r.v);
      }
      if (rec.channels[c].size() == 0) {
        fail(ErrorCode::kEmptyWindow, "user '" + user + "' tap at " + std::to_string(tap) + " ms: no " +
                                          std::string(channel_name(c)) + " readings in window");
      }
    }
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<RawMotionRecording> ingest_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIoFailure, "cannot open " + path.string());
  return ingest_csv(in);
}

}  // namespace abcauth::motion
