#pragma once

// Detection record streams. One JSON object per line:
//
//   {"frame_id":0,"timestamp":1700000000,"class":"EF","bbox":[x,y,w,h],
//    "confidence":0.91,"pain_level":1}
//
// pain_level is optional and defaults to the class's default pain. Blank
// lines are ignored.

#include <cstddef>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "sheeppain/scoring.hpp"
#include "sheeppain/types.hpp"

namespace sheeppain {

inline constexpr double kDefaultConfidenceThreshold = 0.45;

struct ParseOptions {
  /// Skip malformed lines and count them instead of failing.
  bool permissive = false;
  PainTable pains;
};

struct ParseResult {
  std::vector<Detection> detections;
  std::size_t skipped = 0;
  std::vector<std::string> skipped_reasons;  // "line N: ..."
};

/// Throws Error(validation) with the 1-based line number unless permissive.
ParseResult parse_detections(std::istream& in, const ParseOptions& options = {});
ParseResult parse_detections(const std::string& text, const ParseOptions& options = {});

std::string serialize_detection(const Detection& detection);
void write_detections(std::ostream& out, std::span<const Detection> detections);

/// Keeps confidence >= threshold. Throws Error(validation) unless the
/// threshold lies in [0,1].
std::vector<Detection> filter_confidence(std::span<const Detection> detections,
                                         double threshold = kDefaultConfidenceThreshold);

struct Point {
  double x = 0;
  double y = 0;
};

inline Point center_of(const BBox& b) { return {b.x + b.w / 2, b.y + b.h / 2}; }

/// Rotates the four corners by theta degrees about center (rotation matrix
/// [cos -sin; sin cos]) and returns their axis-aligned hull. |theta| beyond
/// 45 degrees is accepted but logs a warning. Throws Error(validation) on a
/// degenerate box.
BBox rotate_bbox(const BBox& bbox, double theta_degrees, Point center);
inline BBox rotate_bbox(const BBox& bbox, double theta_degrees) {
  return rotate_bbox(bbox, theta_degrees, center_of(bbox));
}

/// Groups records by frame_id, frames in order of first appearance; each
/// frame takes its first record's timestamp.
std::vector<Frame> group_frames(std::span<const Detection> detections);

}  // namespace sheeppain
