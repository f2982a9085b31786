#include "sway/encoding.hpp"

#include <algorithm>

#include "sway/json_util.hpp"

namespace sway {

namespace {

constexpr std::array<std::string_view, 7> kChannelNames{"fill-color", "stroke-color", "size", "x-position",
                                                        "y-position", "opacity",      "shape"};

std::string_view channel_noun(Channel c) {
  switch (c) {
    case Channel::FillColor: return "Color";
    case Channel::StrokeColor: return "Stroke color";
    case Channel::Size: return "Size";
    case Channel::XPosition: return "Horizontal position";
    case Channel::YPosition: return "Vertical position";
    case Channel::Opacity: return "Opacity";
    case Channel::Shape: return "Shape";
  }
  return "Channel";
}

std::string_view bare(std::string_view selector) {
  if (!selector.empty() && selector.front() == '.') selector.remove_prefix(1);
  return selector;
}

std::string rationale(const EncodingEntry& entry, const ClipSpec& clip, const std::vector<Property>& props) {
  std::string list;
  for (std::size_t i = 0; i < props.size(); ++i) {
    if (i) list += i + 1 == props.size() ? " and " : ", ";
    list += property_name(props[i]);
  }
  const std::string meaning = entry.meaning.empty() ? "data" : entry.meaning;
  return std::string(channel_noun(entry.channel)) + " has already encoded " + meaning + " on " + entry.selector +
         ". Animating " + list + " of " + clip.selector + " changes the " + std::string(channel_name(entry.channel)) +
         " channel, so viewers may read the motion as a change in the data.";
}

template <class Intersects>
std::vector<Warning> check(const EncodingManifest& manifest, const std::vector<ClipSpec>& clips,
                           Intersects&& intersects) {
  std::vector<Warning> out;
  for (const auto& clip : clips) {
    for (const auto& entry : manifest.entries) {
      std::vector<Property> hits;
      for (const auto& track : clip.tracks)
        if (conflicts(track.property, entry.channel)) hits.push_back(track.property);
      if (hits.empty() || !intersects(clip.selector, entry.selector)) continue;
      out.push_back({entry.channel, clip.selector, rationale(entry, clip, hits)});
    }
  }
  return out;
}

}  // namespace

std::string_view channel_name(Channel c) { return kChannelNames[static_cast<std::size_t>(c)]; }

std::optional<Channel> parse_channel(std::string_view name) {
  for (auto c : kAllChannels)
    if (channel_name(c) == name) return c;
  return std::nullopt;
}

nlohmann::json manifest_to_json(const EncodingManifest& m) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : m.entries)
    entries.push_back({{"selector", e.selector}, {"channel", channel_name(e.channel)}, {"meaning", e.meaning}});
  return {{"entries", std::move(entries)}};
}

EncodingManifest manifest_from_json(const nlohmann::json& j, const std::string& path) {
  using namespace json_util;
  EncodingManifest m;
  const auto ep = child(path, "entries");
  const auto& entries = array(field(j, "entries", path), ep);
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto p = child(ep, i);
    EncodingEntry e;
    e.selector = string_field(entries[i], "selector", p);
    if (bare(e.selector).empty()) violation(child(p, "selector"), "selector is empty");
    const auto ch = string_field(entries[i], "channel", p);
    auto c = parse_channel(ch);
    if (!c) violation(child(p, "channel"), "unknown channel '" + ch + "'");
    e.channel = *c;
    if (entries[i].contains("meaning")) e.meaning = string_field(entries[i], "meaning", p);
    m.entries.push_back(std::move(e));
  }
  return m;
}

nlohmann::json warning_to_json(const Warning& w) {
  return {{"channel", channel_name(w.channel)},
          {"selector", w.selector},
          {"rationale", w.rationale},
          {"severity", "advisory"}};
}

Warning warning_from_json(const nlohmann::json& j, const std::string& path) {
  using namespace json_util;
  const auto ch = string_field(j, "channel", path);
  auto c = parse_channel(ch);
  if (!c) violation(child(path, "channel"), "unknown channel '" + ch + "'");
  return {*c, string_field(j, "selector", path), string_field(j, "rationale", path)};
}

std::vector<Warning> check_encoding_conflict(const EncodingManifest& manifest, const std::vector<ClipSpec>& clips) {
  return check(manifest, clips, [](std::string_view a, std::string_view b) { return bare(a) == bare(b); });
}

std::vector<Warning> check_encoding_conflict(const EncodingManifest& manifest, const std::vector<ClipSpec>& clips,
                                             const VectorDocument& doc) {
  return check(manifest, clips, [&](std::string_view a, std::string_view b) {
    if (bare(a) == bare(b)) return true;
    const auto x = select_group(doc, a), y = select_group(doc, b);
    std::vector<ElementIndex> common;
    std::set_intersection(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(common));
    return !common.empty();
  });
}

}  // namespace sway
