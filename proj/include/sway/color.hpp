#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace sway {

/// sRGB, 8 bits per channel.
struct Color {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Color&, const Color&) = default;
};

/// Accepts #rgb, #rrggbb, rgb(r, g, b) and the CSS basic named colors.
std::optional<Color> parse_color(std::string_view text);

/// Lowercase "#rrggbb".
std::string to_hex(const Color& c);

}  // namespace sway
