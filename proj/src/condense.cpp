#include "sway/condense.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <set>
#include <tuple>
#include <unordered_set>

#include "sway/error.hpp"
#include "sway/random.hpp"

namespace sway {

std::size_t estimate_tokens(std::string_view text) { return (text.size() + 3) / 4; }

std::string CondenseReport::summary() const {
  std::string out;
  for (const auto& e : entries) {
    out += e.group + ": kept " + std::to_string(e.kept) + " of " + std::to_string(e.total);
    out += '\n';
  }
  return out;
}

namespace {

const std::unordered_set<std::string_view>& kept_attributes() {
  static const std::unordered_set<std::string_view> keep{
      "id", "class", "transform", "fill", "stroke", "opacity",
      // geometry
      "x", "y", "width", "height", "cx", "cy", "r", "rx", "ry", "x1", "y1", "x2", "y2",
      "points", "d", "viewBox", "href", "xlink:href"};
  return keep;
}

bool keep_attribute(const std::string& name) {
  return kept_attributes().count(name) > 0 || name.rfind("data-", 0) == 0 ||
         name.rfind("xmlns", 0) == 0;
}

bool is_blank(const std::string& text) {
  return std::all_of(text.begin(), text.end(),
                     [](unsigned char c) { return std::isspace(c) != 0; });
}

xml::Node stripped_copy(const xml::Node& n) {
  xml::Node out;
  out.kind = n.kind;
  out.name = n.name;
  out.text = n.text;
  for (const auto& a : n.attributes)
    if (keep_attribute(a.name)) out.attributes.push_back(a);
  for (const auto& c : n.children) {
    if (c.kind == xml::Node::Kind::Comment || c.kind == xml::Node::Kind::Instruction) continue;
    if (c.kind == xml::Node::Kind::Text && is_blank(c.text)) continue;
    out.children.push_back(stripped_copy(c));
  }
  return out;
}

struct Unit {
  const xml::Node* node = nullptr;
  int parent = -1;  // index into units, -1 for children of the root
  std::size_t depth = 0;
  std::string key;
  bool sampleable = false;
};

std::string group_key(const xml::Node& n) {
  std::set<std::string> classes;
  if (const auto* cls = n.attribute("class")) {
    std::size_t pos = 0;
    while (pos < cls->size()) {
      while (pos < cls->size() && std::isspace(static_cast<unsigned char>((*cls)[pos]))) ++pos;
      std::size_t end = pos;
      while (end < cls->size() && !std::isspace(static_cast<unsigned char>((*cls)[end]))) ++end;
      if (end > pos) classes.insert(cls->substr(pos, end - pos));
      pos = end;
    }
  }
  if (classes.empty()) return n.name;
  std::string key;
  for (const auto& c : classes) {
    if (!key.empty()) key += '.';
    key += c;
  }
  // Same class set on different tags is a different combination.
  return key + "|" + n.name;
}

std::string display_name(const std::string& key) {
  auto bar = key.rfind('|');
  if (bar == std::string::npos) return key;
  return key.substr(0, bar);
}

void collect_units(const xml::Node& n, int parent, std::size_t depth, bool sampleable,
                   std::vector<Unit>& units) {
  static const std::unordered_set<std::string_view> opaque{
      "defs", "clipPath", "mask", "symbol", "marker", "pattern", "linearGradient",
      "radialGradient", "filter", "style", "script", "title", "desc", "metadata"};
  for (const auto& c : n.children) {
    if (!c.is_element()) continue;
    Unit u;
    u.node = &c;
    u.parent = parent;
    u.depth = depth;
    u.key = group_key(c);
    u.sampleable = sampleable && opaque.count(c.name) == 0;
    const int self = static_cast<int>(units.size());
    units.push_back(u);
    collect_units(c, self, depth + 1, units[self].sampleable, units);
  }
}

class Sampler {
 public:
  Sampler(const xml::Node& root, std::uint64_t seed) : root_(root) {
    collect_units(root_, -1, 1, true, units_);
    std::map<std::string, std::vector<int>> by_key;
    for (int i = 0; i < static_cast<int>(units_.size()); ++i)
      if (units_[i].sampleable) by_key[units_[i].key].push_back(i);
    for (auto& [key, members] : by_key) {
      Group g;
      g.key = key;
      g.members = members;
      g.min_depth = units_[members.front()].depth;
      for (int m : members) g.min_depth = std::min(g.min_depth, units_[m].depth);
      g.order = members;
      SplitMix64 rng(seed ^ fnv1a64(key.data(), key.size()));
      for (std::size_t i = g.order.size(); i > 1; --i)
        std::swap(g.order[i - 1], g.order[rng.below(i)]);
      groups_.push_back(std::move(g));
    }
    std::sort(groups_.begin(), groups_.end(), [](const Group& a, const Group& b) {
      return std::tie(a.min_depth, a.members.front()) < std::tie(b.min_depth, b.members.front());
    });
  }

  // Keeps a fraction `ratio` of each group's reachable members (at least one).
  std::vector<bool> choose(double ratio) const {
    std::vector<bool> kept(units_.size(), true);
    for (const auto& g : groups_) {
      std::vector<int> candidates;
      for (int m : g.order)
        if (ancestors_kept(m, kept)) candidates.push_back(m);
      if (candidates.empty()) continue;
      const auto k = std::max<std::size_t>(
          1, static_cast<std::size_t>(std::ceil(ratio * static_cast<double>(candidates.size()))));
      for (std::size_t i = k; i < candidates.size(); ++i) kept[candidates[i]] = false;
    }
    for (const auto& g : groups_) {
      bool visible = std::any_of(g.members.begin(), g.members.end(),
                                 [&](int m) { return kept[m] && ancestors_kept(m, kept); });
      if (visible) continue;
      for (int m = g.order.front(); m >= 0; m = units_[m].parent) kept[m] = true;
    }
    return kept;
  }

  std::string render(const std::vector<bool>& kept) const {
    std::map<const xml::Node*, bool> keep_map;
    for (std::size_t i = 0; i < units_.size(); ++i) keep_map[units_[i].node] = kept[i];
    std::string out;
    write_filtered(root_, keep_map, out);
    return out;
  }

  CondenseReport report(const std::vector<bool>& kept) const {
    std::map<std::string, CondenseReport::Entry> entries;
    for (const auto& g : groups_) {
      auto& e = entries[display_name(g.key)];
      e.group = display_name(g.key);
      e.total += g.members.size();
      for (int m : g.members)
        if (kept[m] && ancestors_kept(m, kept)) ++e.kept;
    }
    CondenseReport r;
    r.passthrough = false;
    for (auto& [name, e] : entries)
      if (e.kept < e.total) r.entries.push_back(e);
    return r;
  }

 private:
  struct Group {
    std::string key;
    std::vector<int> members;  // document order
    std::vector<int> order;    // seeded permutation
    std::size_t min_depth = 0;
  };

  bool ancestors_kept(int unit, const std::vector<bool>& kept) const {
    for (int p = units_[unit].parent; p >= 0; p = units_[p].parent)
      if (!kept[p]) return false;
    return true;
  }

  static void write_filtered(const xml::Node& n, const std::map<const xml::Node*, bool>& keep,
                             std::string& out) {
    if (!n.is_element()) {
      out += n.text;
      return;
    }
    out += '<' + n.name;
    for (const auto& a : n.attributes) out += ' ' + a.name + "=\"" + xml::escape_attribute(a.value) + '"';
    std::string inner;
    for (const auto& c : n.children) {
      if (c.is_element()) {
        auto it = keep.find(&c);
        if (it != keep.end() && !it->second) continue;
      }
      write_filtered(c, keep, inner);
    }
    if (inner.empty()) {
      out += "/>";
    } else {
      out += '>' + inner + "</" + n.name + '>';
    }
  }

  const xml::Node& root_;
  std::vector<Unit> units_;
  std::vector<Group> groups_;
};

}  // namespace

CondensedSvg condense_for_prompt(const VectorDocument& doc, std::size_t token_budget,
                                 std::uint64_t seed) {
  if (token_budget == 0) throw Error(ErrorCode::BudgetTooSmall, "token budget must be positive");
  CondensedSvg result;
  if (estimate_tokens(doc.source) <= token_budget) {
    result.svg = doc.source;
    result.report.estimated_tokens = estimate_tokens(doc.source);
    return result;
  }

  const xml::Node stripped = stripped_copy(doc.tree->root);
  Sampler sampler(stripped, seed);
  const std::size_t budget_bytes = token_budget * 4;

  auto fits = [&](const std::string& s) { return estimate_tokens(s) <= token_budget; };
  auto kept = sampler.choose(1.0);
  std::string svg = sampler.render(kept);
  if (!fits(svg)) {
    kept = sampler.choose(0.0);
    svg = sampler.render(kept);
    if (!fits(svg))
      throw Error(ErrorCode::BudgetTooSmall,
                  "one exemplar per element type needs ~" + std::to_string(estimate_tokens(svg)) +
                      " tokens, budget is " + std::to_string(token_budget),
                  std::to_string(estimate_tokens(svg)));
    double lo = 0.0, hi = 1.0;
    for (int iter = 0; iter < 30 && svg.size() < budget_bytes; ++iter) {
      const double mid = 0.5 * (lo + hi);
      auto k = sampler.choose(mid);
      auto s = sampler.render(k);
      if (fits(s)) {
        lo = mid;
        kept = std::move(k);
        svg = std::move(s);
      } else {
        hi = mid;
      }
    }
  }
  result.report = sampler.report(kept);
  result.report.estimated_tokens = estimate_tokens(svg);
  result.svg = std::move(svg);
  return result;
}

}  // namespace sway
