#include "sheeppain/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>

#include <nlohmann/json.hpp>

#include "sheeppain/error.hpp"
#include "sheeppain/ingestion.hpp"
#include "sheeppain/random.hpp"

namespace sheeppain {

namespace {

constexpr std::int64_t kDatasetEpoch = 1'700'000'000;
constexpr std::int64_t kSecondsPerDay = 86'400;
constexpr std::size_t kMaxAttempts = 10'000;

Point anchor_of(FacialPart part) {
  switch (part) {
    case FacialPart::ears: return {120, 60};
    case FacialPart::eyes: return {220, 160};
    case FacialPart::nose: return {300, 320};
    case FacialPart::cheeks: return {200, 300};
    case FacialPart::lips_jaw: return {300, 420};
  }
  return {};
}

BBox part_box(PartLabel label, Rng* rng, double jitter) {
  const Point a = anchor_of(part_of(label));
  const double offset = 8.0 * static_cast<double>(slot_of(label) % 3);
  double dx = 0, dy = 0, dw = 0, dh = 0;
  if (rng && jitter > 0) {
    dx = rng->uniform(-jitter, jitter);
    dy = rng->uniform(-jitter, jitter);
    dw = rng->uniform(0, jitter);
    dh = rng->uniform(0, jitter);
  }
  return {a.x + offset + dx, a.y + offset + dy, 48.0 + dw, 36.0 + dh};
}

std::vector<EdgeLabel> edge_labels_for(const std::vector<int>& clusters) {
  std::vector<EdgeLabel> out;
  const int n = static_cast<int>(clusters.size());
  for (int i = 1; i <= n; ++i) {
    for (int j = i + 1; j <= n; ++j) {
      out.push_back({i, j, clusters[i - 1] == clusters[j - 1]});
    }
  }
  return out;
}

// Chooses distinct classes so that the pain-level groups contain exactly
// `singletons` groups of size one.
std::vector<PartLabel> draw_classes(Rng& rng, const PainTable& pains, std::size_t singletons) {
  std::vector<PartLabel> pool(kAllLabels.begin(), kAllLabels.end());
  for (std::size_t attempt = 0; attempt < kMaxAttempts; ++attempt) {
    const auto n = static_cast<std::size_t>(rng.integer(3, static_cast<int>(kNumLabels)));
    rng.shuffle(pool);
    std::vector<PartLabel> chosen(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(n));
    std::array<std::size_t, kMaxPain + 1> group{};
    for (auto l : chosen) ++group[static_cast<std::size_t>(pains.default_pain(l))];
    const auto ones = static_cast<std::size_t>(std::count(group.begin(), group.end(), 1u));
    if (ones == singletons) return chosen;
  }
  fail(ErrorKind::validation, "could not draw a class set with the requested cluster shape");
}

}  // namespace

std::vector<LabeledSample> generate_dataset(std::uint64_t seed, std::size_t n_samples,
                                            double separation) {
  if (n_samples < 1) fail(ErrorKind::validation, "n_samples must be >= 1");
  if (!(separation >= 0 && separation <= 1)) {
    fail(ErrorKind::validation, "separation must lie in [0,1]");
  }
  Rng rng(seed);
  const PainTable pains;
  std::vector<LabeledSample> samples;
  samples.reserve(n_samples);
  for (std::size_t s = 0; s < n_samples; ++s) {
    const bool cohesive = rng.uniform() < separation;
    const auto classes = draw_classes(rng, pains, cohesive ? 0 : 1);
    LabeledSample sample;
    for (auto label : classes) {
      Detection d;
      d.frame_id = s;
      d.timestamp = kDatasetEpoch + static_cast<std::int64_t>(s);
      d.label = label;
      d.bbox = part_box(label, &rng, 6.0);
      d.confidence = rng.uniform(0.5, 1.0);
      d.pain_level = pains.default_pain(label);
      sample.detections.push_back(d);
      sample.cluster_labels.push_back(d.pain_level + 1);
    }
    sample.edge_labels = edge_labels_for(sample.cluster_labels);
    samples.push_back(std::move(sample));
  }
  return samples;
}

Trend parse_trend(const std::string& text) {
  if (text == "rising") return Trend::rising;
  if (text == "falling") return Trend::falling;
  if (text == "flat") return Trend::flat;
  throw Error(ErrorKind::validation, "unknown trend '" + text + "'", std::nullopt, "trend");
}

std::vector<Frame> generate_monitoring_scenario(std::uint64_t seed,
                                                const ScenarioOptions& options) {
  if (options.days < 1) fail(ErrorKind::validation, "days must be >= 1");
  if (options.frames_per_day < 1) fail(ErrorKind::validation, "frames_per_day must be >= 1");
  if (!(options.noise >= 0)) fail(ErrorKind::validation, "noise must be >= 0");
  Rng rng(seed);
  const PainTable pains;
  const std::size_t total = options.days * options.frames_per_day;
  const std::int64_t spacing =
      std::max<std::int64_t>(1, kSecondsPerDay / static_cast<std::int64_t>(options.frames_per_day));
  const std::array<FacialPart, 3> parts = {FacialPart::ears, FacialPart::eyes, FacialPart::nose};

  std::vector<Frame> frames;
  frames.reserve(total);
  for (std::size_t f = 0; f < total; ++f) {
    const double t = total > 1 ? static_cast<double>(f) / static_cast<double>(total - 1) : 0.0;
    double latent = 1.0;
    if (options.trend == Trend::rising) latent = 2.0 * t;
    if (options.trend == Trend::falling) latent = 2.0 * (1.0 - t);

    const std::size_t day = f / options.frames_per_day;
    const std::size_t slot = f % options.frames_per_day;
    Frame frame;
    frame.timestamp = options.start_timestamp +
                      static_cast<std::int64_t>(day) * kSecondsPerDay +
                      static_cast<std::int64_t>(slot) * spacing;
    for (auto part : parts) {
      double value = latent;
      if (options.noise > 0) value += options.noise * rng.normal();
      const int level = static_cast<int>(std::clamp<long>(std::lround(value), 0, kMaxPain));
      PartLabel best = PartLabel::EF;
      int best_gap = kMaxPain + 1;
      for (auto l : kAllLabels) {
        if (part_of(l) != part) continue;
        const int gap = std::abs(pains.default_pain(l) - level);
        if (gap < best_gap) {
          best = l;
          best_gap = gap;
        }
      }
      Detection d;
      d.frame_id = f;
      d.timestamp = frame.timestamp;
      d.label = best;
      d.bbox = part_box(best, &rng, 4.0 * options.noise);
      d.confidence = 0.9;
      d.pain_level = level;
      frame.detections.push_back(d);
    }
    frames.push_back(std::move(frame));
  }
  return frames;
}

void write_dataset_detections(std::ostream& out, std::span<const LabeledSample> samples) {
  for (const auto& s : samples) write_detections(out, s.detections);
}

void write_dataset_labels(std::ostream& out, std::span<const LabeledSample> samples) {
  for (const auto& s : samples) {
    nlohmann::ordered_json j;
    j["frame_id"] = s.detections.empty() ? 0 : s.detections.front().frame_id;
    j["clusters"] = s.cluster_labels;
    auto edges = nlohmann::ordered_json::array();
    for (const auto& e : s.edge_labels) edges.push_back({e.i, e.j, e.keep ? 1 : 0});
    j["edges"] = std::move(edges);
    out << j.dump() << '\n';
  }
}

std::vector<LabeledSample> read_dataset(std::istream& detections, std::istream& labels) {
  const auto frames_in = parse_detections(detections).detections;
  std::map<std::uint64_t, std::vector<Detection>> by_frame;
  std::vector<std::uint64_t> order;
  for (const auto& d : frames_in) {
    auto& bucket = by_frame[d.frame_id];
    if (bucket.empty()) order.push_back(d.frame_id);
    bucket.push_back(d);
  }

  std::map<std::uint64_t, LabeledSample> samples;
  std::string text;
  std::size_t line = 0;
  while (std::getline(labels, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto where = [line](const std::string& what) {
      return Error(ErrorKind::validation, "labels line " + std::to_string(line) + ": " + what,
                   line, "labels");
    };
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw where(std::string("malformed record: ") + e.what());
    }
    try {
      const auto frame = j.at("frame_id").get<std::uint64_t>();
      auto it = by_frame.find(frame);
      if (it == by_frame.end()) throw where("no detections for frame " + std::to_string(frame));
      LabeledSample s;
      s.detections = it->second;
      s.cluster_labels = j.at("clusters").get<std::vector<int>>();
      if (s.cluster_labels.size() != s.detections.size()) {
        throw where("cluster label count does not match detections");
      }
      const int n = static_cast<int>(s.detections.size());
      for (const auto& e : j.at("edges")) {
        EdgeLabel label{e.at(0).get<int>(), e.at(1).get<int>(), e.at(2).get<int>() != 0};
        if (label.i < 1 || label.j > n || label.i >= label.j) throw where("edge out of range");
        s.edge_labels.push_back(label);
      }
      samples[frame] = std::move(s);
    } catch (const nlohmann::json::exception& e) {
      throw where(e.what());
    }
  }

  std::vector<LabeledSample> out;
  out.reserve(order.size());
  for (auto frame : order) {
    auto it = samples.find(frame);
    if (it == samples.end()) {
      fail(ErrorKind::validation, "frame " + std::to_string(frame) + " has no labels");
    }
    out.push_back(std::move(it->second));
  }
  return out;
}

}  // namespace sheeppain
