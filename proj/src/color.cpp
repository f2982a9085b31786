#include "sway/color.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <utility>

namespace sway {

namespace {

constexpr std::array<std::pair<std::string_view, std::uint32_t>, 18> kNamed{{
    {"black", 0x000000},  {"silver", 0xc0c0c0}, {"gray", 0x808080},
    {"grey", 0x808080},   {"white", 0xffffff},  {"maroon", 0x800000},
    {"red", 0xff0000},    {"purple", 0x800080}, {"fuchsia", 0xff00ff},
    {"green", 0x008000},  {"lime", 0x00ff00},   {"olive", 0x808000},
    {"yellow", 0xffff00}, {"navy", 0x000080},   {"blue", 0x0000ff},
    {"teal", 0x008080},   {"aqua", 0x00ffff},   {"orange", 0xffa500},
}};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

int hex_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  return -1;
}

Color from_rgb(std::uint32_t v) {
  return {static_cast<std::uint8_t>(v >> 16), static_cast<std::uint8_t>((v >> 8) & 0xff),
          static_cast<std::uint8_t>(v & 0xff)};
}

}  // namespace

std::optional<Color> parse_color(std::string_view text) {
  text = trim(text);
  if (text.empty()) return std::nullopt;
  if (text.front() == '#') {
    auto hex = text.substr(1);
    if (hex.size() != 3 && hex.size() != 6) return std::nullopt;
    std::uint32_t v = 0;
    for (char c : hex) {
      int d = hex_digit(c);
      if (d < 0) return std::nullopt;
      v = v * 16 + static_cast<std::uint32_t>(d);
      if (hex.size() == 3) v = v * 16 + static_cast<std::uint32_t>(d);
    }
    return from_rgb(v);
  }
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower.rfind("rgb(", 0) == 0 && lower.back() == ')') {
    std::string_view body(lower);
    body = body.substr(4, body.size() - 5);
    std::array<double, 3> ch{};
    for (int i = 0; i < 3; ++i) {
      body = trim(body);
      auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), ch[i]);
      if (ec != std::errc{}) return std::nullopt;
      body.remove_prefix(static_cast<std::size_t>(ptr - body.data()));
      body = trim(body);
      if (!body.empty() && body.front() == '%') {
        ch[i] *= 2.55;
        body.remove_prefix(1);
        body = trim(body);
      }
      if (i < 2) {
        if (body.empty() || body.front() != ',') return std::nullopt;
        body.remove_prefix(1);
      }
    }
    if (!trim(body).empty()) return std::nullopt;
    auto to8 = [](double v) {
      return static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
    };
    return Color{to8(ch[0]), to8(ch[1]), to8(ch[2])};
  }
  for (const auto& [name, v] : kNamed)
    if (name == lower) return from_rgb(v);
  return std::nullopt;
}

std::string to_hex(const Color& c) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out = "#";
  for (std::uint8_t ch : {c.r, c.g, c.b}) {
    out.push_back(kDigits[ch >> 4]);
    out.push_back(kDigits[ch & 0xf]);
  }
  return out;
}

}  // namespace sway
