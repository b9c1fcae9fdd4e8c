#include "sheeppain/types.hpp"

#include <cmath>
#include <string>

#include "sheeppain/error.hpp"

namespace sheeppain {

std::string_view kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::validation: return "validation";
    case ErrorKind::numerical: return "numerical";
    case ErrorKind::oracle: return "oracle";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

namespace {

constexpr std::array<std::string_view, kNumLabels> kLabelNames = {
    "EF", "EFP", "ER", "EyE", "EyN", "EyPC", "NExV", "NSU", "NNC", "NSV"};

constexpr std::array<FacialPart, kNumLabels> kLabelParts = {
    FacialPart::ears, FacialPart::ears, FacialPart::ears,
    FacialPart::eyes, FacialPart::eyes, FacialPart::eyes,
    FacialPart::nose, FacialPart::nose, FacialPart::nose, FacialPart::nose};

}  // namespace

std::string_view label_name(PartLabel label) { return kLabelNames[slot_of(label)]; }

std::optional<PartLabel> parse_label(std::string_view text) {
  for (std::size_t i = 0; i < kNumLabels; ++i) {
    if (kLabelNames[i] == text) return kAllLabels[i];
  }
  return std::nullopt;
}

std::string_view part_name(FacialPart part) {
  switch (part) {
    case FacialPart::ears: return "ears";
    case FacialPart::eyes: return "eyes";
    case FacialPart::nose: return "nose";
    case FacialPart::cheeks: return "cheeks";
    case FacialPart::lips_jaw: return "lips_jaw";
  }
  return "unknown";
}

FacialPart part_of(PartLabel label) { return kLabelParts[slot_of(label)]; }

PainTable::PainTable() {
  using L = PartLabel;
  for (L l : {L::EyE, L::EF, L::NNC, L::EyN}) pain_[slot_of(l)] = 0;
  for (L l : {L::EyPC, L::ER, L::NSU, L::NSV}) pain_[slot_of(l)] = 1;
  for (L l : {L::EFP, L::NExV}) pain_[slot_of(l)] = 2;
}

void PainTable::set(PartLabel label, int pain) {
  if (pain < 0 || pain > kMaxPain) {
    throw Error(ErrorKind::validation,
                "pain level for " + std::string(label_name(label)) +
                    " must be 0, 1 or 2, got " + std::to_string(pain),
                std::nullopt, "pain_level");
  }
  pain_[slot_of(label)] = pain;
}

PartClass class_of(PartLabel label, const PainTable& table) {
  return {label, part_of(label), table.default_pain(label)};
}

PartClass class_lookup(std::string_view label, const PainTable& table) {
  auto parsed = parse_label(label);
  if (!parsed) {
    throw Error(ErrorKind::validation,
                "unknown class label '" + std::string(label) + "'", std::nullopt,
                "class");
  }
  return class_of(*parsed, table);
}

void validate(const Detection& d) {
  auto bad = [](const char* field, const std::string& what) {
    throw Error(ErrorKind::validation, std::string(field) + ": " + what,
                std::nullopt, field);
  };
  const BBox& b = d.bbox;
  if (!std::isfinite(b.x) || !std::isfinite(b.y) || !std::isfinite(b.w) ||
      !std::isfinite(b.h)) {
    bad("bbox", "coordinates must be finite");
  }
  if (b.w <= 0 || b.h <= 0) bad("bbox", "width and height must be positive");
  if (!(d.confidence >= 0 && d.confidence <= 1)) {
    bad("confidence", "value " + std::to_string(d.confidence) + " outside [0,1]");
  }
  if (d.pain_level < 0 || d.pain_level > kMaxPain) {
    bad("pain_level", "value " + std::to_string(d.pain_level) + " not in {0,1,2}");
  }
}

}  // namespace sheeppain
