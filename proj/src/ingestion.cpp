#include "sheeppain/ingestion.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <iostream>
#include <iterator>
#include <map>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

#include "sheeppain/error.hpp"

namespace sheeppain {

namespace {

using nlohmann::json;

[[noreturn]] void line_error(std::size_t line, const std::string& field,
                             const std::string& message) {
  throw Error(ErrorKind::validation,
              "line " + std::to_string(line) + ": field '" + field + "': " + message, line,
              field);
}

const json& require(const json& obj, const char* field, std::size_t line) {
  auto it = obj.find(field);
  if (it == obj.end()) line_error(line, field, "missing");
  return *it;
}

double number(const json& v, const char* field, std::size_t line) {
  if (!v.is_number()) line_error(line, field, "expected a number");
  return v.get<double>();
}

Detection parse_line(const std::string& text, std::size_t line, const PainTable& pains) {
  json obj;
  try {
    obj = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::validation,
                "line " + std::to_string(line) + ": malformed record: " + e.what(), line);
  }
  if (!obj.is_object()) {
    throw Error(ErrorKind::validation, "line " + std::to_string(line) + ": expected an object",
                line);
  }
  Detection d;
  const json& frame = require(obj, "frame_id", line);
  if (!frame.is_number_unsigned()) line_error(line, "frame_id", "expected a non-negative integer");
  d.frame_id = frame.get<std::uint64_t>();

  const json& ts = require(obj, "timestamp", line);
  if (!ts.is_number_integer()) line_error(line, "timestamp", "expected integer seconds");
  d.timestamp = ts.get<std::int64_t>();

  const json& cls = require(obj, "class", line);
  if (!cls.is_string()) line_error(line, "class", "expected a label string");
  const auto label = parse_label(cls.get<std::string>());
  if (!label) line_error(line, "class", "unknown class label '" + cls.get<std::string>() + "'");
  d.label = *label;

  const json& box = require(obj, "bbox", line);
  if (!box.is_array() || box.size() != 4) line_error(line, "bbox", "expected [x, y, w, h]");
  d.bbox = {number(box[0], "bbox", line), number(box[1], "bbox", line),
            number(box[2], "bbox", line), number(box[3], "bbox", line)};

  d.confidence = number(require(obj, "confidence", line), "confidence", line);

  if (auto it = obj.find("pain_level"); it != obj.end() && !it->is_null()) {
    if (!it->is_number_integer()) line_error(line, "pain_level", "expected 0, 1 or 2");
    d.pain_level = it->get<int>();
  } else {
    d.pain_level = pains.default_pain(d.label);
  }

  try {
    validate(d);
  } catch (const Error& e) {
    line_error(line, e.field(), e.what());
  }
  return d;
}

}  // namespace

ParseResult parse_detections(std::istream& in, const ParseOptions& options) {
  ParseResult result;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isspace(c); })) {
      continue;
    }
    try {
      result.detections.push_back(parse_line(text, line, options.pains));
    } catch (const Error& e) {
      if (!options.permissive) throw;
      ++result.skipped;
      result.skipped_reasons.emplace_back(e.what());
    }
  }
  return result;
}

ParseResult parse_detections(const std::string& text, const ParseOptions& options) {
  std::istringstream in(text);
  return parse_detections(in, options);
}

std::string serialize_detection(const Detection& d) {
  nlohmann::ordered_json j;
  j["frame_id"] = d.frame_id;
  j["timestamp"] = d.timestamp;
  j["class"] = std::string(label_name(d.label));
  j["bbox"] = {d.bbox.x, d.bbox.y, d.bbox.w, d.bbox.h};
  j["confidence"] = d.confidence;
  j["pain_level"] = d.pain_level;
  return j.dump();
}

void write_detections(std::ostream& out, std::span<const Detection> detections) {
  for (const auto& d : detections) out << serialize_detection(d) << '\n';
}

std::vector<Detection> filter_confidence(std::span<const Detection> detections,
                                         double threshold) {
  if (!(threshold >= 0 && threshold <= 1)) {
    fail(ErrorKind::validation, "confidence threshold must lie in [0,1]");
  }
  std::vector<Detection> kept;
  std::copy_if(detections.begin(), detections.end(), std::back_inserter(kept),
               [threshold](const Detection& d) { return d.confidence >= threshold; });
  return kept;
}

BBox rotate_bbox(const BBox& bbox, double theta_degrees, Point center) {
  if (!(bbox.w > 0) || !(bbox.h > 0)) {
    fail(ErrorKind::validation, "degenerate bounding box (width and height must be > 0)");
  }
  if (std::fabs(theta_degrees) > 45.0) {
    std::clog << "warning: rotation of " << theta_degrees
              << " degrees exceeds the nominal +-45 degree head rotation range\n";
  }
  const double theta = theta_degrees * std::numbers::pi / 180.0;
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const std::array<Point, 4> corners = {Point{bbox.x, bbox.y}, Point{bbox.x + bbox.w, bbox.y},
                                        Point{bbox.x, bbox.y + bbox.h},
                                        Point{bbox.x + bbox.w, bbox.y + bbox.h}};
  double min_x = INFINITY, min_y = INFINITY, max_x = -INFINITY, max_y = -INFINITY;
  for (const auto& p : corners) {
    const double dx = p.x - center.x;
    const double dy = p.y - center.y;
    const double rx = center.x + c * dx - s * dy;
    const double ry = center.y + s * dx + c * dy;
    min_x = std::min(min_x, rx);
    max_x = std::max(max_x, rx);
    min_y = std::min(min_y, ry);
    max_y = std::max(max_y, ry);
  }
  return {min_x, min_y, max_x - min_x, max_y - min_y};
}

std::vector<Frame> group_frames(std::span<const Detection> detections) {
  std::vector<Frame> frames;
  std::map<std::uint64_t, std::size_t> index;
  for (const auto& d : detections) {
    auto [it, inserted] = index.try_emplace(d.frame_id, frames.size());
    if (inserted) frames.push_back({d.timestamp, {}});
    frames[it->second].detections.push_back(d);
  }
  return frames;
}

}  // namespace sheeppain
