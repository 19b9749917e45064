#include "igkit/labels.hpp"

#include "igkit/error.hpp"

namespace igkit {

namespace {
constexpr std::array<std::string_view, kLabelCount> kNames = {
    "A", "B", "D", "I", "C", "O", "NONE"};
}

std::string_view to_string(ComponentLabel label) {
  return kNames[label_index(label)];
}

ComponentLabel parse_label(std::string_view text) {
  for (std::size_t i = 0; i < kLabelCount; ++i) {
    if (kNames[i] == text) return kAllLabels[i];
  }
  throw Error("unknown label \"" + std::string(text) +
              "\"; valid labels are {A, B, D, I, C, O, NONE}");
}

}  // namespace igkit
