#pragma once

// Detection vocabulary and detection records shared by every stage of the
// pipeline.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace sheeppain {

/// The ten detector classes. The enumerator order is also the slot order of
/// the one-hot class segment in node features.
enum class PartLabel : std::uint8_t {
  EF,    // flat ears
  EFP,   // ear flipped
  ER,    // ear rotation
  EyE,   // eyes fully opened
  EyN,   // eyes not classified
  EyPC,  // eyes partially classified
  NExV,  // nose extended V shape
  NSU,   // nose shallow U shape
  NNC,   // nose not classified
  NSV,   // nose shallow V shape
};

inline constexpr std::size_t kNumLabels = 10;

inline constexpr std::array<PartLabel, kNumLabels> kAllLabels = {
    PartLabel::EF,  PartLabel::EFP,  PartLabel::ER,   PartLabel::EyE,
    PartLabel::EyN, PartLabel::EyPC, PartLabel::NExV, PartLabel::NSU,
    PartLabel::NNC, PartLabel::NSV};

enum class FacialPart : std::uint8_t { ears, eyes, nose, cheeks, lips_jaw };

inline constexpr std::size_t kNumParts = 5;

/// Pain levels are 0 (not present), 1 (slightly present), 2 (substantial).
inline constexpr int kMaxPain = 2;

std::string_view label_name(PartLabel label);
std::optional<PartLabel> parse_label(std::string_view text);
std::string_view part_name(FacialPart part);
FacialPart part_of(PartLabel label);

inline constexpr std::size_t slot_of(PartLabel label) {
  return static_cast<std::size_t>(label);
}

/// Class -> default pain level. Overridable from the engine config.
class PainTable {
 public:
  /// Shipped mapping: 0 for {EyE, EF, NNC, EyN}, 1 for {EyPC, ER, NSU, NSV},
  /// 2 for {EFP, NExV}.
  PainTable();

  int default_pain(PartLabel label) const { return pain_[slot_of(label)]; }
  void set(PartLabel label, int pain);

 private:
  std::array<int, kNumLabels> pain_{};
};

struct PartClass {
  PartLabel label;
  FacialPart part;
  int default_pain;

  friend bool operator==(const PartClass&, const PartClass&) = default;
};

/// Throws Error(validation) naming the text when the label is unknown.
PartClass class_lookup(std::string_view label, const PainTable& table = {});
PartClass class_of(PartLabel label, const PainTable& table = {});

/// Axis-aligned box in pixels, top-left origin.
struct BBox {
  double x = 0;
  double y = 0;
  double w = 0;
  double h = 0;

  friend bool operator==(const BBox&, const BBox&) = default;
};

struct Detection {
  std::uint64_t frame_id = 0;
  std::int64_t timestamp = 0;  // integer seconds since epoch
  PartLabel label = PartLabel::EF;
  BBox bbox;
  double confidence = 0;
  int pain_level = 0;

  friend bool operator==(const Detection&, const Detection&) = default;
};

/// Throws Error(validation) naming the offending field.
void validate(const Detection& detection);

/// Node feature vector: pain scalar followed by the one-hot class segment.
using Feature = std::vector<double>;

inline constexpr std::size_t kFeatureDim = 1 + kNumLabels;

/// Pairwise relation between two detected part expressions.
struct EdgeFeature {
  double proximity = 0;  // anatomical prior in [0,1]
  double pain_diff = 0;  // |p_i - p_j|

  friend bool operator==(const EdgeFeature&, const EdgeFeature&) = default;
};

}  // namespace sheeppain
