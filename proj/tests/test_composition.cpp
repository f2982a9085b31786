#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "sway/composition.hpp"
#include "test_support.hpp"

using namespace sway;
using sway::test::error_code_of;
using sway::test::read_fixture;

namespace {

PropertyTrack scalar_track(Property p, std::vector<std::pair<double, double>> keys) {
  PropertyTrack t{p, {}};
  for (auto [o, v] : keys) t.keyframes.push_back({o, v, Easing::Linear});
  return t;
}

GroupClip grow_up() {
  GroupClip g;
  g.clip = {".flower", {scalar_track(Property::TranslateY, {{0, 40}, {1, 0}})}, "Grow up", "", false};
  g.delay_ms = 0;
  g.offset_ms = 0;
  g.duration_ms = 1000;
  return g;
}

GroupClip petal_fade(double delay = 0, double offset = 500) {
  GroupClip g;
  g.clip = {".petal", {scalar_track(Property::Opacity, {{0, 0}, {1, 0.9}})}, "Fade in", "", false};
  g.delay_ms = delay;
  g.offset_ms = offset;
  return g;
}

const VectorDocument& flowers() {
  static const VectorDocument doc = parse_document(read_fixture("oecd_flowers.svg"));
  return doc;
}

// Clip whose every track holds the element's static value, built per element.
Timeline identity_timeline(const VectorDocument& doc, const std::string& selector, Property p) {
  auto first = select_group(doc, selector).front();
  PropertyValue v = *base_value(doc, first, p);
  GroupClip g;
  g.clip = {selector, {PropertyTrack{p, {{0, v, Easing::Linear}, {0.5, v, Easing::EaseInQuad}, {1, v, Easing::Linear}}}},
            "Hold", "", false};
  return {{g}, std::nullopt};
}

}  // namespace

TEST_CASE("arrange") {
  Timeline tl{{grow_up(), petal_fade()}, 3};
  auto moved = arrange(tl, 0, 300, 1000);
  CHECK(moved.tracks[0].delay_ms == 300);
  CHECK(moved.tracks[1] == tl.tracks[1]);
  CHECK(moved.tracks[0].clip == tl.tracks[0].clip);
  CHECK(tl.tracks[0].delay_ms == 0);

  auto faster = arrange(tl, 0, 0, 500);
  auto w = assign_timeline(flowers(), faster);
  auto s = sample(flowers(), faster, w, 250);
  auto f = select_group(flowers(), ".flower").front();
  CHECK(std::get<double>(s.values.at(f).at(Property::TranslateY)) == 20.0);

  CHECK(error_code_of([&] { arrange(tl, 7, 0, 100); }) == ErrorCode::UnknownTrack);
  CHECK(error_code_of([&] { arrange(tl, 0, 0, 0); }) == ErrorCode::InvalidDuration);
  CHECK(error_code_of([&] { arrange(tl, 0, -1, 100); }) == ErrorCode::InvalidDuration);
}

TEST_CASE("total duration") {
  const auto& doc = flowers();
  Timeline one{{petal_fade(200, 100)}, std::nullopt};
  CHECK(total_duration(one, assign_timeline(doc, one)) == 1300);

  Timeline two{{petal_fade(200, 100), grow_up()}, std::nullopt};
  two.tracks[1].duration_ms = 900;
  CHECK(total_duration(two, assign_timeline(doc, two)) == 1300);

  CHECK(total_duration(Timeline{}, {}) == 0);
  CHECK(error_code_of([&] { total_duration(two, {}); }) == ErrorCode::MissingAssignment);
  auto stale = assign_timeline(doc, two);
  two.tracks[0].coordination = RandomOrder{1};
  CHECK(error_code_of([&] { sample(doc, two, stale, 0); }) == ErrorCode::MissingAssignment);
}

TEST_CASE("walkthrough grow-up sample") {
  const auto& doc = flowers();
  Timeline tl{{grow_up()}, std::nullopt};
  auto w = assign_timeline(doc, tl);
  auto snap = sample(doc, tl, w, 500);
  const auto group = select_group(doc, ".flower");
  REQUIRE(group.size() == 6);
  CHECK(snap.values.size() == 6);
  for (auto e : group) {
    // Substitution: start = 0 + w*0, u = 0.5, lerp(40, 0, 0.5).
    const double start = 0 + *w[0].weight_of(e) * 0;
    const double u = (500 - start) / 1000;
    CHECK(std::get<double>(snap.values.at(e).at(Property::TranslateY)) == 40 + (0 - 40) * u);
    CHECK(std::get<double>(snap.values.at(e).at(Property::TranslateY)) == 20.0);
  }
}

TEST_CASE("start time boundary of a weight 0.1 element") {
  std::string svg = "<svg viewBox=\"0 0 110 10\">";
  for (int i = 0; i < 11; ++i) svg += "<rect class=\"bar\" x=\"" + std::to_string(i * 10) + "\" y=\"0\" width=\"5\" height=\"5\"/>";
  auto doc = parse_document(svg + "</svg>");
  GroupClip g;
  g.clip = {".bar", {scalar_track(Property::Opacity, {{0, 0.25}, {1, 1}})}, "Fade", "", false};
  g.delay_ms = 200;
  g.offset_ms = 100;
  Timeline tl{{g}, std::nullopt};
  auto w = assign_timeline(doc, tl);
  const auto e = w[0].elements[1];
  REQUIRE(*w[0].weight_of(e) == 0.1);
  CHECK(element_start_time(200, 100, 0.1) == 210.0);
  CHECK(std::get<double>(sample(doc, tl, w, 209).values.at(e).at(Property::Opacity)) == 0.25);
  CHECK(std::get<double>(sample(doc, tl, w, 210).values.at(e).at(Property::Opacity)) == 0.25);
  CHECK(std::get<double>(sample(doc, tl, w, 211).values.at(e).at(Property::Opacity)) > 0.25);
}

TEST_CASE("identity clips reproduce the static document") {
  const auto& doc = flowers();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> t(0, 5000);
  for (auto [selector, p] : {std::pair{".petal", Property::Opacity}, std::pair{".stem", Property::StrokeWidth},
                             std::pair{".flower", Property::Rotate}, std::pair{".pistil", Property::FillColor}}) {
    CAPTURE(selector);
    auto tl = identity_timeline(doc, selector, p);
    auto w = assign_timeline(doc, tl);
    for (int probe = 0; probe < 50; ++probe) {
      auto snap = sample(doc, tl, w, probe == 0 ? 0.0 : t(rng));
      for (const auto& [e, values] : snap.values) CHECK(values.at(p) == *base_value(doc, e, p));
      CHECK(render_static(doc, snap).source == doc.source);
    }
  }
}

TEST_CASE("terminal state and monotonicity") {
  const auto& doc = flowers();
  Timeline tl{{grow_up(), petal_fade(100, 400)}, std::nullopt};
  tl.tracks[1].coordination = DataCentric{};
  auto w = assign_timeline(doc, tl);
  const double end = total_duration(tl, w);
  CHECK(end == 1500);
  const auto final_state = sample(doc, tl, w, end).values;
  for (double t : {end + 1, end + 250.5, end * 10}) CHECK(sample(doc, tl, w, t).values == final_state);

  std::map<ElementIndex, double> last;
  for (double t = 0; t <= end; t += 7.5) {
    for (const auto& [e, values] : sample(doc, tl, w, t).values) {
      auto it = values.find(Property::Opacity);
      if (it == values.end()) continue;
      const double v = std::get<double>(it->second);
      if (last.contains(e)) CHECK(v >= last[e]);
      last[e] = v;
    }
  }
  CHECK(sample(doc, tl, w, 321) == sample(doc, tl, w, 321));
}

TEST_CASE("later track wins") {
  const auto& doc = flowers();
  auto a = petal_fade();
  auto b = petal_fade();
  b.clip.tracks[0] = scalar_track(Property::Opacity, {{0, 0.3}, {1, 0.3}});
  Timeline tl{{a, b}, std::nullopt};
  auto snap = sample(doc, tl, assign_timeline(doc, tl), 2000);
  for (const auto& [e, values] : snap.values) CHECK(std::get<double>(values.at(Property::Opacity)) == 0.3);
}

TEST_CASE("render_static") {
  const auto& doc = flowers();
  SUBCASE("opacity on petals") {
    FrameSnapshot snap;
    for (auto e : select_group(doc, ".petal")) snap.values[e][Property::Opacity] = 0.5;
    auto out = render_static(doc, snap);
    for (auto e : select_group(out, ".petal")) CHECK(*presentation_value(out, e, "opacity") == "0.5");
    CHECK(render_static(doc, snap).source == out.source);
  }
  SUBCASE("untouched bytes are preserved") {
    const auto petal = select_group(doc, ".petal")[3];
    FrameSnapshot snap;
    snap.values[petal][Property::FillColor] = Color{255, 0, 0};
    auto out = render_static(doc, snap);
    const auto& e = doc.element(petal);
    CHECK(out.source.substr(0, e.source_begin) == doc.source.substr(0, e.source_begin));
    const auto tail = doc.source.substr(e.source_start_tag_end);
    CHECK(out.source.substr(out.source.size() - tail.size()) == tail);
    CHECK(*presentation_value(out, petal, "fill") == "#ff0000");
  }
  SUBCASE("inline style gives way") {
    auto styled = parse_document(R"(<svg viewBox="0 0 10 10"><rect class="a" width="5" height="5" style="fill: blue; stroke: red"/></svg>)");
    FrameSnapshot snap;
    snap.values[1][Property::FillColor] = Color{0, 128, 0};
    auto out = render_static(styled, snap);
    CHECK(out.source.find("style=\"stroke: red\"") != std::string::npos);
    CHECK(*presentation_value(out, 1, "fill") == "#008000");
  }
  SUBCASE("rotation about the bounding box centre") {
    auto nested = parse_document(
        R"svg(<svg viewBox="0 0 200 200"><g transform="translate(40,10) scale(2)"><circle class="c" cx="20" cy="30" r="10"/></g></svg>)svg");
    const ElementIndex c = select_group(nested, ".c").front();
    FrameSnapshot snap;
    snap.values[c][Property::Rotate] = 30.0;
    snap.values[c][Property::TranslateX] = 5.0;
    auto out = render_static(nested, snap);
    const Point local(30, 30);  // rightmost point of the circle
    const Point before = nested.element(c).root_transform * local;
    const Point centre(40 + 2 * 20, 10 + 2 * 30);
    const double a = 30 * std::numbers::pi / 180;
    const Point d = before - centre;
    const Point expected = centre + Point(std::cos(a) * d.x() - std::sin(a) * d.y(),
                                          std::sin(a) * d.x() + std::cos(a) * d.y()) + Point(5, 0);
    const Point after = out.element(c).root_transform * local;
    CHECK((after - expected).norm() < 1e-6);
  }
  SUBCASE("scale and blur") {
    auto one = parse_document(R"(<svg viewBox="0 0 100 100"><rect class="r" x="10" y="10" width="20" height="20"/></svg>)");
    FrameSnapshot snap;
    snap.values[1][Property::Scale] = 2.0;
    snap.values[1][Property::FilterBlur] = 1.5;
    auto out = render_static(one, snap);
    auto box = bounding_box(out, 1);
    CHECK(box.min_x == doctest::Approx(0));
    CHECK(box.max_x == doctest::Approx(40));
    CHECK(out.source.find("<feGaussianBlur stdDeviation=\"1.5\"/>") != std::string::npos);
    CHECK(select_group(out, ".r").front() == 1);
    CHECK(*presentation_value(out, 1, "filter") == "url(#sway-blur-1)");
    CHECK_FALSE(out.elements.back().rendered);
  }
}

TEST_CASE("snapshot JSON") {
  FrameSnapshot snap;
  snap.time_ms = 12.5;
  snap.values[4][Property::Opacity] = 0.25;
  snap.values[4][Property::FillColor] = Color{1, 2, 255};
  auto j = snapshot_to_json(snap);
  CHECK(j.dump() == R"({"time":12.5,"values":{"4":{"fill-color":"#0102ff","opacity":0.25}}})");
}
