#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "sway/svg_model.hpp"

namespace sway {

/// ceil(bytes / 4).
std::size_t estimate_tokens(std::string_view text);

struct CondenseReport {
  struct Entry {
    std::string group;  // class set joined with '.', or the tag when unclassed
    std::size_t kept = 0;
    std::size_t total = 0;
  };

  bool passthrough = true;
  std::size_t estimated_tokens = 0;
  std::vector<Entry> entries;  // only groups that lost elements

  /// One line per entry, e.g. "dot: kept 12 of 1000".
  std::string summary() const;
};

struct CondensedSvg {
  std::string svg;
  CondenseReport report;
};

/// Shrinks an SVG to fit `token_budget`: strips attributes that do not affect
/// appearance, then randomly samples repeated (tag, class-set) elements while
/// keeping at least one of each. Deterministic for a given seed.
CondensedSvg condense_for_prompt(const VectorDocument& doc, std::size_t token_budget,
                                 std::uint64_t seed = 0);

}  // namespace sway
