#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>

namespace igkit {

/// Institutional-grammar component of a single token.
///
/// The declaration order is also the tie-break order used by the classifier:
/// A < B < D < I < C < O < NONE.
enum class ComponentLabel : unsigned char {
  A,     // Attribute (the regulated agent)
  B,     // oBject
  D,     // Deontic
  I,     // aIm
  C,     // Context
  O,     // Or else
  None,  // outside any component
};

inline constexpr std::size_t kLabelCount = 7;

inline constexpr std::array<ComponentLabel, kLabelCount> kAllLabels = {
    ComponentLabel::A, ComponentLabel::B, ComponentLabel::D,
    ComponentLabel::I, ComponentLabel::C, ComponentLabel::O,
    ComponentLabel::None};

constexpr std::size_t label_index(ComponentLabel label) {
  return static_cast<std::size_t>(label);
}

std::string_view to_string(ComponentLabel label);

/// Parses "A", "B", "D", "I", "C", "O" or "NONE". Throws igkit::Error
/// listing the valid set otherwise.
ComponentLabel parse_label(std::string_view text);

}  // namespace igkit
