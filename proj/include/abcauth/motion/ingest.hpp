#pragma once

#include <filesystem>
#include <istream>
#include <vector>

#include "abcauth/motion/recording.hpp"

namespace abcauth::motion {

// One reading per line:
//
//   user,sensor,axis,timestamp_ms,value
//
// sensor is acc, gyr or tap; axis is x, y or z (ignored for tap rows, whose
// value column is ignored too). An optional header line starting with "user"
// and lines starting with '#' are skipped. Every tap row yields one recording
// of that user's readings from 500 ms before to 1000 ms after the tap.
//
// Throws MalformedRow (with the 1-based line number) and EmptyWindow.
std::vector<RawMotionRecording> ingest_csv(std::istream& in);
std::vector<RawMotionRecording> ingest_csv(const std::filesystem::path& path);

}  // namespace abcauth::motion
