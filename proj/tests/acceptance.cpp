// Prints one PASS/FAIL line per acceptance criterion and exits non-zero when
// any criterion fails. `acceptance --digests` prints the determinism digests
// only; the determinism check compares them against a second process.
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <set>
#include <regex>
#include <sstream>

#include "oracles.hpp"
#include "sway/assistant.hpp"
#include "sway/condense.hpp"
#include "sway/digest.hpp"
#include "sway/service.hpp"
#include "test_support.hpp"

using namespace sway;
using sway::test::read_fixture;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool passed = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (ok) return;
    if (passed) detail = what;
    passed = false;
  }
};

PropertyTrack scalar_track(Property p, std::vector<std::pair<double, double>> keys, Easing e = Easing::Linear) {
  PropertyTrack t{p, {}};
  for (auto [o, v] : keys) t.keyframes.push_back({o, v, e});
  return t;
}

GroupClip group(std::string selector, std::vector<PropertyTrack> tracks, CoordinationScheme scheme, double delay,
                double offset, double duration = 1000) {
  GroupClip g;
  g.clip = {std::move(selector), std::move(tracks), "Clip", "", false};
  g.coordination = std::move(scheme);
  g.delay_ms = delay;
  g.offset_ms = offset;
  g.duration_ms = duration;
  return g;
}

const VectorDocument& flowers() {
  static const VectorDocument doc = parse_document(read_fixture("oecd_flowers.svg"));
  return doc;
}

EncodingManifest walkthrough_manifest() {
  return manifest_from_json(nlohmann::json::parse(read_fixture("oecd_manifest.json")));
}

// ---------------------------------------------------------------------------

Outcome worked_example() {
  Outcome o;
  o.require(element_start_time(200, 100, 0.1) == 210.0, "element_start_time(200, 100, 0.1) != 210");
  std::string svg = "<svg viewBox=\"0 0 110 10\">";
  for (int i = 0; i < 11; ++i) svg += "<rect class=\"bar\" x=\"" + std::to_string(i * 10) + "\" width=\"5\" height=\"5\"/>";
  const auto doc = parse_document(svg + "</svg>");
  Timeline tl{{group(".bar", {scalar_track(Property::Opacity, {{0, 0.25}, {1, 1}})}, LayerCentric{}, 200, 100)}, {}};
  const auto w = assign_timeline(doc, tl);
  const auto e = w[0].elements[1];
  o.require(w[0].weight_of(e) == 0.1, "second of eleven layer weights is not 0.1");
  auto opacity = [&](double t) { return std::get<double>(sample(doc, tl, w, t).values.at(e).at(Property::Opacity)); };
  o.require(opacity(210) == 0.25 && opacity(211) > 0.25, "element does not start at 210 ms");
  o.detail = o.passed ? "start = 210 ms" : o.detail;
  return o;
}

Outcome normalization_suite() {
  Outcome o;
  std::mt19937_64 rng(20240501);
  std::uniform_int_distribution<int> size(2, 500);
  std::uniform_real_distribution<double> value(-1e3, 1e3);
  for (int g = 0; g < 1000 && o.passed; ++g) {
    std::set<double> distinct;
    const int n = size(rng);
    while (static_cast<int>(distinct.size()) < n) distinct.insert(value(rng));
    std::vector<double> raw(distinct.begin(), distinct.end());
    std::shuffle(raw.begin(), raw.end(), rng);
    const auto w = normalize(raw);
    const auto [lo, hi] = std::minmax_element(w.begin(), w.end());
    o.require(*lo == 0.0 && *hi == 1.0, "group " + std::to_string(g) + " does not span [0,1]");
    for (double x : w) o.require(x >= 0 && x <= 1, "weight outside [0,1]");
  }
  for (int n : {1, 2, 17, 500}) {
    const auto w = normalize(std::vector<double>(static_cast<std::size_t>(n), 3.25));
    o.require(std::all_of(w.begin(), w.end(), [](double x) { return x == 0; }), "constant group is not all zero");
  }
  if (o.passed) o.detail = "1000 groups";
  return o;
}

Outcome geometry_oracles() {
  Outcome o;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> coord(0, 100);
  std::uniform_int_distribution<int> vertices(2, 8);
  double worst_sketch = 0, worst_line = 0, worst_box = 0;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Point> path(static_cast<std::size_t>(vertices(rng)));
    for (auto& p : path) p = {coord(rng), coord(rng)};
    const Point p{coord(rng), coord(rng)};
    std::vector<oracle::Vec> opath(path.begin(), path.end());
    const double engine = sketch_progress(p, path);
    const double brute = oracle::sampled_sketch_progress(p, opath, 100000);
    double diff = std::abs(engine - brute);
    // A point almost equidistant from two stretches of the path may snap to
    // either under sampling; accept the engine's answer when its foot point
    // is as close as the sampled one.
    if (diff > 1e-3) {
      std::vector<double> cum{0};
      for (std::size_t i = 1; i < path.size(); ++i) cum.push_back(cum.back() + (path[i] - path[i - 1]).norm());
      auto at = [&](double u) {
        const double s = u * cum.back();
        std::size_t k = 1;
        while (k + 1 < path.size() && cum[k] < s) ++k;
        const double len = cum[k] - cum[k - 1];
        return Point(path[k - 1] + (len > 0 ? (s - cum[k - 1]) / len : 0.0) * (path[k] - path[k - 1]));
      };
      if ((at(engine) - p).norm() <= (at(brute) - p).norm() + 1e-9) diff = 0;
    }
    worst_sketch = std::max(worst_sketch, diff);

    const Point a{coord(rng), coord(rng)}, b{coord(rng), coord(rng)};
    worst_line = std::max(worst_line, std::abs(sketch_progress(p, std::vector<Point>{a, b}) -
                                               oracle::clamped_projection(p, a, b)));
  }
  o.require(worst_sketch <= 1e-3, "sketch progress off by " + format_number(worst_sketch));
  o.require(worst_line <= 1e-9, "two-point sketch differs from projection by " + format_number(worst_line));

  std::uniform_real_distribution<double> angle(0, 360), extent(1, 40);
  for (int trial = 0; trial < 50; ++trial) {
    const double w = extent(rng), h = extent(rng), deg = angle(rng), cx = coord(rng), cy = coord(rng);
    const bool ellipse = trial % 2 == 1;
    std::ostringstream svg;
    svg << "<svg viewBox=\"0 0 200 200\"><g transform=\"translate(" << cx << " " << cy << ") rotate(" << deg << ")\">";
    if (ellipse) svg << "<ellipse rx=\"" << w << "\" ry=\"" << h << "\"/>";
    else svg << "<rect x=\"" << -w / 2 << "\" y=\"" << -h / 2 << "\" width=\"" << w << "\" height=\"" << h << "\"/>";
    svg << "</g></svg>";
    const auto doc = parse_document(svg.str());
    const Rect box = bounding_box(doc, 2);
    const double th = deg * std::numbers::pi / 180;
    Rect dense;
    for (int i = 0; i <= 20000; ++i) {
      const double s = static_cast<double>(i) / 20000;
      double x, y;
      if (ellipse) {
        x = w * std::cos(2 * std::numbers::pi * s);
        y = h * std::sin(2 * std::numbers::pi * s);
      } else {
        const double d = s * 2 * (w + h);
        x = d < w ? d - w / 2 : d < w + h ? w / 2 : d < 2 * w + h ? w / 2 - (d - w - h) : -w / 2;
        y = d < w ? -h / 2 : d < w + h ? d - w - h / 2 : d < 2 * w + h ? h / 2 : h / 2 - (d - 2 * w - h);
      }
      dense.expand(Point(cx + x * std::cos(th) - y * std::sin(th), cy + x * std::sin(th) + y * std::cos(th)));
    }
    worst_box = std::max({worst_box, std::abs(box.min_x - dense.min_x), std::abs(box.min_y - dense.min_y),
                          std::abs(box.max_x - dense.max_x), std::abs(box.max_y - dense.max_y)});
  }
  o.require(worst_box <= kDefaultFlatteningTolerance, "rotated box off by " + format_number(worst_box));
  if (o.passed)
    o.detail = "sketch " + format_number(worst_sketch) + ", line " + format_number(worst_line) + ", box " +
               format_number(worst_box);
  return o;
}

Outcome sampling_fidelity() {
  Outcome o;
  const auto& doc = flowers();
  std::mt19937_64 probe_rng(11);
  std::uniform_real_distribution<double> probe_time(0, 5000);
  for (auto [selector, p] : {std::pair{".petal", Property::Opacity}, std::pair{".stem", Property::StrokeWidth},
                             std::pair{".flower", Property::Rotate}, std::pair{".pistil", Property::FillColor}}) {
    const PropertyValue v = *base_value(doc, select_group(doc, selector).front(), p);
    Timeline tl{{group(selector, {PropertyTrack{p, {{0, v, Easing::Linear}, {0.4, v, Easing::SineInOut}, {1, v, Easing::Linear}}}},
                       LayerCentric{}, 0, 300)},
                {}};
    const auto w = assign_timeline(doc, tl);
    for (int k = 0; k < 50; ++k) {
      const double t = k == 0 ? 0.0 : probe_time(probe_rng);
      o.require(render_static(doc, sample(doc, tl, w, t)).source == doc.source,
                std::string(selector) + " identity clip changes the document at t=" + format_number(t));
    }
  }

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> val(-50, 50);
  for (int trial = 0; trial < 200; ++trial) {
    PropertyTrack t{Property::TranslateX, {}};
    const int n = 2 + trial % 6;
    for (int i = 0; i < n; ++i)
      t.keyframes.push_back({i == n - 1 ? 1.0 : i / double(n - 1), val(rng), static_cast<Easing>(trial % 5)});
    for (const auto& k : t.keyframes)
      o.require(interpolate_track(t, k.offset) == k.value, "keyframe value not hit exactly");
  }

  Timeline grow{{group(".flower", {scalar_track(Property::TranslateY, {{0, 40}, {1, 0}})}, LayerCentric{}, 0, 0)}, {}};
  const auto w = assign_timeline(doc, grow);
  const auto snap = sample(doc, grow, w, 500);
  int at_20 = 0;
  for (auto e : w[0].elements) at_20 += std::get<double>(snap.values.at(e).at(Property::TranslateY)) == 20.0;
  o.require(at_20 == 6 && w[0].size() == 6, "grow-up at 500 ms: " + std::to_string(at_20) + " of 6 flowers at 20");
  if (o.passed) o.detail = "200 identity probes, 200 keyframe tracks, 6 flowers at 20";
  return o;
}

std::string determinism_digest() {
  std::ostringstream out;
  const auto& doc = flowers();
  const auto w = assign_weights(doc, ".petal", RandomOrder{123456789});
  std::string weights;
  for (double x : w.weights) weights += format_number(x) + ",";
  out << "random " << sha256_hex(weights) << "\n";

  std::string svg = "<svg viewBox=\"0 0 1000 1000\">";
  for (int i = 0; i < 1000; ++i)
    svg += "<circle class=\"dot\" cx=\"" + std::to_string(i % 1000) + "\" cy=\"" + std::to_string((i * 37) % 1000) +
           "\" r=\"3\" fill=\"#4c78a8\"/>";
  const auto dots = parse_document(svg + "</svg>");
  out << "condense " << sha256_hex(condense_for_prompt(dots, 2000, 42).svg) << "\n";

  Timeline tl{{group(".flower", {scalar_track(Property::TranslateY, {{0, 40}, {1, 0}})}, LayoutRadius{{0.5, 0.5}}, 0, 500),
               group(".petal", {scalar_track(Property::Opacity, {{0, 0}, {1, 0.9}})}, RandomOrder{99}, 100, 250)},
              1};
  out << "program " << sha256_hex(serialize_program(export_program(doc, tl, "determinism"))) << "\n";
  return out.str();
}

Outcome determinism(const std::string& self) {
  Outcome o;
  const std::string first = determinism_digest();
  o.require(determinism_digest() == first, "digests differ within one process");
  std::string second;
  if (FILE* pipe = ::popen(("\"" + self + "\" --digests").c_str(), "r")) {
    char buf[256];
    while (std::fgets(buf, sizeof buf, pipe)) second += buf;
    ::pclose(pipe);
  }
  o.require(second == first, "a second run produced different bytes");
  if (o.passed) o.detail = "random weights, condensation and program identical across two runs";
  return o;
}

ServiceOptions fixed_clock() {
  ServiceOptions opts;
  opts.clock = [] { return std::string("2026-01-01T00:00:00Z"); };
  return opts;
}

struct TempDir {
  fs::path path = fs::temp_directory_path() / ("sway-acceptance-" + new_session_id());
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

Outcome round_trips() {
  Outcome o;
  const auto& doc = flowers();
  Timeline tl{{group(".flower", {scalar_track(Property::TranslateY, {{0, 40}, {1, 0}}, Easing::EaseOutQuad)},
                     LayoutSketch{{{0, 1}, {0.4, 0.3}, {1, 0.8}}}, 10, 333),
               group(".petal", {scalar_track(Property::Opacity, {{0, 0}, {0.5, 0.7}, {1, 0.9}})},
                     DataCentric{Direction::Descending, DataBasis::Rank, std::nullopt}, 0, 500)},
              2};
  const auto text = serialize_program(export_program(doc, tl, "round-trip"));
  o.require(serialize_program(import_program(text)) == text, "export, import, export is not byte-identical");

  TempDir dir;
  {
    SessionService svc(SessionStore(dir.path), std::make_shared<StubClient>(SWAY_STUB_DIR), fixed_clock());
    const auto id = svc.create_session(read_fixture("oecd_flowers.svg"), "", walkthrough_manifest());
    svc.post_message(id, "Please make the flowers grow up", {});
    svc.set_coordination(id, 1, 0, LayoutRadius{{0.5, 0.5}});
    svc.set_timing(id, 1, 1, 100, 600);
    const Session saved = *svc.session(id);
    const Session loaded = SessionStore(dir.path).load(id);
    o.require(loaded == saved, "reloaded session differs");
    o.require(loaded.document.source_digest == saved.document.source_digest, "source digest differs after reload");
    for (const auto& v : saved.versions)
      o.require(version_digest(loaded.version(v.id)) == version_digest(v), "version digest differs after reload");
  }

  std::string svg = "<svg viewBox=\"0 0 30 10\">";
  for (int i = 0; i < 3; ++i) svg += "<rect class=\"bar\" x=\"" + std::to_string(i * 10) + "\" width=\"5\" height=\"5\"/>";
  const auto bars = parse_document(svg + "</svg>");
  Timeline fade{{group(".bar", {scalar_track(Property::Opacity, {{0, 0}, {1, 1}})}, LayerCentric{}, 0, 500)}, {}};
  const auto baked = bake_css(bars, fade, assign_timeline(bars, fade));
  const double expected[] = {0, 250, 500};
  const auto members = select_group(bars, ".bar");
  for (int i = 0; i < 3; ++i) {
    const std::regex rule("\\[data-sway=\"" + std::to_string(members[i]) +
                          "\"\\] \\{\n  animation: sway-[^ ]+ [0-9.e+-]+ms linear ([0-9.e+-]+)ms");
    std::smatch m;
    const bool found = std::regex_search(baked.css, m, rule);
    o.require(found && std::abs(std::stod(m[1]) - expected[i]) <= 1e-9,
              "bar " + std::to_string(i) + " delay is not " + format_number(expected[i]) + " ms");
  }
  if (o.passed) o.detail = "program fixpoint, session reload, baked delays 0/250/500 ms";
  return o;
}

Outcome validator() {
  Outcome o;
  StubClient stub(SWAY_STUB_DIR);
  const auto s = make_session("s", read_fixture("oecd_flowers.svg"), "", walkthrough_manifest());
  GenerateOptions opts;
  opts.clock = [] { return std::string("2026-01-01T00:00:00Z"); };
  const auto g = generate_version(s, stub, "Add a looped animation slowly brightening the petals", {}, opts);
  o.require(g.version.has_value(), "walkthrough produced no version");
  if (g.version) {
    o.require(g.version->warnings.size() == 1, std::to_string(g.version->warnings.size()) + " warnings instead of one");
    for (const auto& w : g.version->warnings)
      o.require(w.rationale.find("Color") != std::string::npos, "warning does not mention Color");
  }

  const std::set<std::pair<std::string, std::string>> table{
      {"fill-color", "fill-color"},     {"fill-color", "stroke-color"}, {"stroke-color", "fill-color"},
      {"stroke-color", "stroke-color"}, {"scale", "size"},              {"translateX", "x-position"},
      {"translateY", "y-position"},     {"opacity", "opacity"}};
  int cells = 0, mismatches = 0;
  for (auto p : kAllProperties) {
    for (auto c : kAllChannels) {
      ++cells;
      const bool want = table.contains({std::string(property_name(p)), std::string(channel_name(c))});
      const PropertyValue a = value_kind(p) == ValueKind::Color ? PropertyValue(Color{0, 0, 0}) : PropertyValue(0.0);
      const PropertyValue b = value_kind(p) == ValueKind::Color ? PropertyValue(Color{255, 255, 255}) : PropertyValue(1.0);
      const ClipSpec clip{".g", {PropertyTrack{p, {{0, a, Easing::Linear}, {1, b, Easing::Linear}}}}, "t", "", false};
      const EncodingManifest m{{{".g", c, "data"}}};
      mismatches += conflicts(p, c) != want;
      mismatches += check_encoding_conflict(m, {clip}).size() != (want ? 1u : 0u);
    }
  }
  o.require(cells == 63, std::to_string(cells) + " cells instead of 63");
  o.require(mismatches == 0, std::to_string(mismatches) + " rule table mismatches");
  if (o.passed) o.detail = "one Color warning, 63 cells agree";
  return o;
}

Outcome offline() {
  Outcome o;
  for (const char* name : {"SWAY_MODEL_KEY", "OPENAI_API_KEY"}) ::unsetenv(name);
  const auto client = client_from_env(SWAY_STUB_DIR);
  o.require(dynamic_cast<StubClient*>(client.get()) != nullptr, "client_from_env did not fall back to the stub");
  const auto s = make_session("s", read_fixture("oecd_flowers.svg"), "", walkthrough_manifest());
  const auto g = generate_version(s, *client, "Please make the flowers grow up", {}, GenerateOptions{});
  o.require(g.version && g.version->clips.size() == 2, "stub did not produce the two-clip version");
  if (o.passed) o.detail = "stub client, version with 2 clips";
  return o;
}

Outcome performance(double& elapsed_ms) {
  Outcome o;
  std::ostringstream svg;
  svg << "<svg viewBox=\"0 0 1000 1000\">";
  for (int i = 0; i < 10000; ++i)
    svg << "<circle class=\"dot\" cx=\"" << (i % 100) * 10 + 5 << "\" cy=\"" << (i / 100) * 10 + 5 << "\" r=\"3\"/>";
  svg << "</svg>";
  const auto doc = parse_document(svg.str());
  Timeline tl{{group(".dot", {scalar_track(Property::Opacity, {{0, 0}, {1, 1}}), scalar_track(Property::Scale, {{0, 0.5}, {1, 1}})},
                     LayoutRadius{{0.5, 0.5}}, 0, 800)},
              {}};
  const auto t0 = std::chrono::steady_clock::now();
  const auto w = assign_timeline(doc, tl);
  const auto snap = sample(doc, tl, w, 600);
  elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  o.require(w[0].size() == 10000 && snap.values.size() == 10000, "not every element was sampled");
  o.require(elapsed_ms < 200, "took " + format_number(elapsed_ms) + " ms");
  if (o.passed) o.detail = "10000 elements";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1 && std::string(argv[1]) == "--digests") {
    std::cout << determinism_digest();
    return 0;
  }
  const std::string self = fs::read_symlink("/proc/self/exe").string();

  struct Criterion {
    const char* name;
    double limit_ms;
    std::function<Outcome()> run;
  };
  double perf_ms = 0;
  const std::vector<Criterion> criteria{
      {"start time of the worked example", 1000, worked_example},
      {"weight normalization", 5000, normalization_suite},
      {"geometry against brute-force oracles", 30000, geometry_oracles},
      {"sampling fidelity", 5000, sampling_fidelity},
      {"determinism across runs", 30000, [&] { return determinism(self); }},
      {"round trips", 30000, round_trips},
      {"encoding validator", 5000, validator},
      {"offline operation", 5000, offline},
      {"10k-element sampling", 200, [&] { return performance(perf_ms); }},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& c = criteria[i];
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.passed = false;
      o.detail = std::string("threw: ") + e.what();
    }
    double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    if (i + 1 == criteria.size()) ms = perf_ms;
    if (o.passed && ms > c.limit_ms) {
      o.passed = false;
      o.detail = "exceeded " + format_number(c.limit_ms) + " ms";
    }
    failed += !o.passed;
    std::printf("%s %d %s (%.1f ms)%s%s\n", o.passed ? "PASS" : "FAIL", static_cast<int>(i + 1), c.name, ms,
                o.detail.empty() ? "" : ": ", o.detail.c_str());
  }
  return failed == 0 ? 0 : 1;
}
