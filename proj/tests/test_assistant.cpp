#include <doctest.h>

#include <random>
#include <set>

#include "sway/assistant.hpp"
#include "test_support.hpp"

using namespace sway;
using sway::test::error_code_of;
using sway::test::read_fixture;

namespace {

Session walkthrough_session() {
  auto manifest = manifest_from_json(nlohmann::json::parse(read_fixture("oecd_manifest.json")));
  return make_session("s1", read_fixture("oecd_flowers.svg"), "", manifest);
}

std::string fixed_clock() { return "2026-01-01T00:00:00Z"; }

GenerateOptions offline() {
  GenerateOptions o;
  o.clock = fixed_clock;
  return o;
}

ClipSpec one_track_clip(const std::string& selector, Property p) {
  PropertyValue a = value_kind(p) == ValueKind::Color ? PropertyValue(Color{0, 0, 0}) : PropertyValue(0.0);
  PropertyValue b = value_kind(p) == ValueKind::Color ? PropertyValue(Color{255, 255, 255}) : PropertyValue(1.0);
  return {selector, {PropertyTrack{p, {{0, a, Easing::Linear}, {1, b, Easing::Linear}}}}, "t", "", false};
}

}  // namespace

TEST_CASE("rule table, exhaustively") {
  const std::set<std::pair<std::string, std::string>> expected{
      {"fill-color", "fill-color"},   {"fill-color", "stroke-color"}, {"stroke-color", "fill-color"},
      {"stroke-color", "stroke-color"}, {"scale", "size"},            {"translateX", "x-position"},
      {"translateY", "y-position"},   {"opacity", "opacity"}};
  int cells = 0;
  for (auto p : kAllProperties) {
    for (auto c : kAllChannels) {
      ++cells;
      const bool want = expected.contains({std::string(property_name(p)), std::string(channel_name(c))});
      CAPTURE(property_name(p));
      CAPTURE(channel_name(c));
      CHECK(conflicts(p, c) == want);
      EncodingManifest m{{{".g", c, "data"}}};
      CHECK(check_encoding_conflict(m, {one_track_clip(".g", p)}).size() == (want ? 1u : 0u));
      CHECK(check_encoding_conflict(m, {one_track_clip(".other", p)}).empty());
    }
  }
  CHECK(cells == 63);
}

TEST_CASE("encoding conflict examples") {
  const auto s = walkthrough_session();
  const auto& m = *s.manifest;
  auto color = one_track_clip(".petal", Property::FillColor);
  auto warnings = check_encoding_conflict(m, {color}, s.document);
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].channel == Channel::FillColor);
  CHECK(warnings[0].selector == ".petal");
  CHECK(warnings[0].rationale.find("Color has already encoded metric") == 0);

  CHECK(check_encoding_conflict(m, {one_track_clip(".petal", Property::Opacity)}, s.document).empty());
  EncodingManifest sized{{{".flower", Channel::Size, "value"}}};
  CHECK(check_encoding_conflict(sized, {one_track_clip(".flower", Property::Scale)}).size() == 1);

  // Selector spelling does not matter; shared elements do.
  EncodingManifest bare{{{"petal", Channel::FillColor, "metric"}}};
  CHECK(check_encoding_conflict(bare, {color}, s.document).size() == 1);
  auto both = color;
  both.tracks.push_back(one_track_clip(".petal", Property::StrokeColor).tracks[0]);
  CHECK(check_encoding_conflict(m, {both}, s.document).size() == 1);
}

TEST_CASE("manifest JSON") {
  const auto s = walkthrough_session();
  CHECK(s.manifest->entries.size() == 3);
  CHECK(manifest_from_json(manifest_to_json(*s.manifest)) == *s.manifest);
  try {
    manifest_from_json(nlohmann::json::parse(R"({"entries":[{"selector":".a","channel":"hue"}]})"));
    FAIL("expected SchemaViolation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SchemaViolation);
    CHECK(e.detail() == "$.entries[0].channel");
  }
  CHECK(error_code_of([] {
          manifest_from_json(nlohmann::json::parse(R"({"entries":[{"selector":".","channel":"size"}]})"));
        }) == ErrorCode::SchemaViolation);
}

TEST_CASE("parse_reply") {
  SUBCASE("two titled clips") {
    auto reply = parse_reply(read_fixture("../../data/stub_replies/" +
                                          StubClient::fixture_key("Make the flowers sway and the pistils glow") + ".json"));
    REQUIRE(reply.clips);
    REQUIRE(reply.clips->size() == 2);
    CHECK((*reply.clips)[0].title == "Gentle sway");
    CHECK((*reply.clips)[1].title == "Glow pulse");
    CHECK(reply.diagnostics.empty());
    for (const auto& c : *reply.clips) CHECK(validate_clip(c).empty());
  }
  SUBCASE("prose only") {
    auto reply = parse_reply("You could make the petals sway. Want me to try?");
    CHECK_FALSE(reply.clips);
    CHECK(reply.message == reply.raw);
    CHECK(error_code_of([&] { extract_reply_json(reply.raw); }) == ErrorCode::NoJsonFound);
  }
  SUBCASE("unknown property demotes the reply") {
    auto reply = parse_reply(
        R"({"message":"Done.","clips":[{"selector":".petal","title":"Jump","tracks":[{"property":"teleport","keyframes":[{"offset":0,"value":0},{"offset":1,"value":1}]}]}]})");
    CHECK(reply.message == "Done.");
    CHECK_FALSE(reply.clips);
    REQUIRE(reply.diagnostics.size() == 1);
    CHECK(reply.diagnostics[0].kind == DiagnosticKind::UnknownProperty);
    CHECK(reply.diagnostics[0].path == "$.clips[0].tracks[0].property");
  }
  SUBCASE("object inside prose and code fences") {
    auto reply = parse_reply(
        "Sure {not json}. Here: ```json\n{\"note\":\"{\\\"message\\\":1}\"}\n{\"message\":\"a } brace\",\"clips\":[]}\n```");
    CHECK(reply.message == "a } brace");
    CHECK_FALSE(reply.clips);
  }
}

TEST_CASE("build_prompt") {
  auto s = walkthrough_session();
  SUBCASE("small document goes in raw") {
    auto b = build_prompt(s, "Please make the flowers grow up", {});
    CHECK(b.svg_text == s.svg);
    CHECK(b.history.empty());
    CHECK_FALSE(b.condensation);
    CHECK(b.output_schema == reply_schema());
    CHECK(b.one_shot_reply.find("\"clips\"") != std::string::npos);
    CHECK(parse_reply(b.one_shot_reply).clips);
    CHECK(b.estimated_tokens() <= kDefaultContextBudget);
  }
  SUBCASE("referenced versions are inlined") {
    StubClient stub(SWAY_STUB_DIR);
    apply_generation(s, generate_version(s, stub, "Please make the flowers grow up", {}, offline()));
    auto b = build_prompt(s, "improve version 1", {1});
    REQUIRE(b.referenced_specs.size() == 1);
    CHECK(b.referenced_specs[0]["version"] == 1);
    CHECK(b.referenced_specs[0]["clips"][0] == clip_to_json(s.version(1).clips[0].clip));
    CHECK(b.user_content().find("\"title\":\"Grow up\"") != std::string::npos);
    CHECK(b.history.size() == 2);
    CHECK(error_code_of([&] { build_prompt(s, "x", {99}); }) == ErrorCode::UnknownVersion);
  }
  SUBCASE("large documents are condensed within budget") {
    std::string svg = "<svg viewBox=\"0 0 1000 1000\">";
    std::mt19937_64 rng(3);
    for (int i = 0; i < 40000; ++i)
      svg += "<circle class=\"dot\" cx=\"" + std::to_string(rng() % 1000) + "\" cy=\"" + std::to_string(rng() % 1000) +
             "\" r=\"2\" data-id=\"" + std::to_string(i) + "\" aria-label=\"point number " + std::to_string(i) + "\"/>";
    svg += "</svg>";
    REQUIRE(svg.size() > 3'000'000);
    auto big = make_session("big", svg);
    auto b = build_prompt(big, "make the dots pop in", {});
    REQUIRE(b.condensation);
    CHECK(b.estimated_tokens() <= kDefaultContextBudget);
    CHECK(b.user_content().find("dot: kept") != std::string::npos);
    for (std::size_t budget : {4000u, 6000u, 9000u}) {
      PromptOptions o;
      o.budget = budget;
      CHECK(build_prompt(big, "make the dots pop in", {}, o).estimated_tokens() <= budget);
    }
    PromptOptions tiny;
    tiny.budget = 500;
    CHECK(error_code_of([&] { build_prompt(big, "x", {}, tiny); }) == ErrorCode::BudgetTooSmall);
  }
  SUBCASE("screenshot") {
    PromptOptions o;
    o.screenshot = std::string("\x89PNG\r\n", 6);
    auto b = build_prompt(s, "hello", {}, o);
    CHECK(b.estimated_tokens() == build_prompt(s, "hello", {}).estimated_tokens() + kScreenshotTokens);
    HttpClient client({"http://127.0.0.1:9", "k"});
    auto body = client.request_body(b);
    const auto& last = body["messages"].back()["content"];
    CHECK(last[1]["image_url"]["url"] == "data:image/png;base64,iVBORw0K");
  }
}

TEST_CASE("generate_version with the stub") {
  StubClient stub(SWAY_STUB_DIR);
  SUBCASE("grow up") {
    auto s = walkthrough_session();
    auto g = generate_version(s, stub, "Please make the flowers grow up", {}, offline());
    REQUIRE(g.version);
    const auto& v = *g.version;
    CHECK(v.id == 1);
    REQUIRE(v.clips.size() == 2);
    CHECK(v.clips[0].clip.selector == ".flower");
    CHECK(v.clips[1].clip.selector == ".petal");
    for (const auto& c : v.clips) {
      CHECK(c.delay_ms == 0);
      CHECK(c.duration_ms == 1000);
      CHECK(c.offset_ms == 500);
      CHECK(c.coordination == CoordinationScheme{LayerCentric{Direction::Ascending}});
      CHECK(validate_clip(c.clip, s.document).empty());
    }
    CHECK(v.warnings.empty());
    CHECK(g.reply.produced_version == 1u);
    apply_generation(s, g);
    CHECK(s.active_version == 1u);
    CHECK(s.history.size() == 2);
    CHECK(s.version(1).origin_message == 0);
  }
  SUBCASE("color animation draws a warning") {
    auto s = walkthrough_session();
    auto g = generate_version(s, stub, "Add a looped animation slowly brightening the petals", {}, offline());
    REQUIRE(g.version);
    CHECK(g.version->clips[0].clip.loop);
    REQUIRE(g.version->warnings.size() == 1);
    CHECK(g.version->warnings[0].rationale.find("Color") != std::string::npos);
  }
  SUBCASE("chat only") {
    auto s = walkthrough_session();
    auto g = generate_version(s, stub, "How can I animate it?", {}, offline());
    CHECK_FALSE(g.version);
    CHECK(g.reply.text.find("grow") != std::string::npos);
    auto fallback = generate_version(s, stub, "unheard-of request", {}, offline());
    CHECK_FALSE(fallback.version);
  }
  SUBCASE("deterministic") {
    auto a = walkthrough_session(), b = walkthrough_session();
    apply_generation(a, generate_version(a, stub, "Please make the flowers grow up", {}, offline()));
    apply_generation(b, generate_version(b, stub, "Please make the flowers grow up", {}, offline()));
    CHECK(a == b);
    CHECK(version_digest(a.version(1)) == version_digest(b.version(1)));
  }
  SUBCASE("unreachable client leaves the session alone") {
    auto s = walkthrough_session();
    const auto before = s;
    HttpClientConfig cfg{"http://127.0.0.1:9", "key"};
    cfg.timeout = std::chrono::milliseconds(500);
    HttpClient client(cfg);
    CHECK(error_code_of([&] { generate_version(s, client, "Please make the flowers grow up", {}, offline()); }) ==
          ErrorCode::ClientError);
    CHECK(s == before);
    StubClient empty("/nonexistent-dir");
    CHECK(error_code_of([&] { generate_version(s, empty, "hi", {}, offline()); }) == ErrorCode::ClientError);
  }
}
