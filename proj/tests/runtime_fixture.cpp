// Writes an exported runtime module plus a JSON description of the document
// and the engine's own schedule, for the node-side runtime test.
#include <filesystem>
#include <fstream>
#include <iostream>

#include "sway/exporter.hpp"
#include "test_support.hpp"

using namespace sway;

namespace {

PropertyTrack opacity_track() {
  return {Property::Opacity, {{0, 0.0, Easing::Linear}, {0.5, 0.2, Easing::EaseInOutCubic}, {1, 0.9, Easing::Linear}}};
}

GroupClip track(const std::string& selector, CoordinationScheme scheme, double delay, double offset) {
  GroupClip g;
  g.clip = {selector, {opacity_track()}, "Fade", "", false};
  g.coordination = std::move(scheme);
  g.delay_ms = delay;
  g.offset_ms = offset;
  g.duration_ms = 400;
  return g;
}

nlohmann::json box_json(const VectorDocument& doc, ElementIndex i) {
  try {
    const Rect r = bounding_box(doc, i);
    return {r.min_x, r.min_y, r.max_x, r.max_y};
  } catch (const Error&) {
    return nullptr;
  }
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: runtime_fixture OUTPUT_DIR\n";
    return 2;
  }
  const std::filesystem::path out(argv[1]);
  std::filesystem::create_directories(out);

  const auto doc = parse_document(test::read_fixture("oecd_flowers.svg"));
  const auto vb = doc.viewbox;
  Timeline tl;
  tl.tracks = {
      track(".petal", LayoutRadius{to_relative(vb, {300, 200})}, 0, 700),
      track(".flower", LayoutProjection{{0, 0}, {1, 1}}, 50, 300),
      track(".petal", LayoutSketch{{{0.05, 0.9}, {0.5, 0.1}, {0.95, 0.9}}}, 10, 500),
      track(".petal", RandomOrder{kMaxSeed - 7}, 0, 1000),
      track(".petal", DataCentric{Direction::Descending, DataBasis::Value, "value"}, 0, 250),
      track(".flower", DataCentric{Direction::Ascending, DataBasis::Rank, std::nullopt}, 0, 250),
      track(".petal", LayerCentric{Direction::Descending}, 100, 900),
      track(".ghost", LayerCentric{}, 0, 100),
  };
  const auto assignments = assign_timeline(doc, tl, true);
  const auto program = export_program(doc, tl, "runtime-test");

  nlohmann::json elements = nlohmann::json::array();
  for (const auto& e : doc.elements) {
    nlohmann::json attrs = nlohmann::json::object();
    for (const auto& a : e.attributes) attrs[a.name] = a.value;
    elements.push_back({{"tag", e.tag},
                        {"parent", e.parent ? nlohmann::json(*e.parent) : nlohmann::json(nullptr)},
                        {"attributes", std::move(attrs)},
                        {"box", box_json(doc, e.index)}});
  }

  nlohmann::json expected = nlohmann::json::array();
  for (std::size_t i = 0; i < tl.tracks.size(); ++i) {
    nlohmann::json starts = nlohmann::json::array();
    for (std::size_t k = 0; k < assignments[i].size(); ++k)
      starts.push_back({{"index", assignments[i].elements[k]},
                        {"start", element_start_time(tl.tracks[i].delay_ms, tl.tracks[i].offset_ms,
                                                     assignments[i].weights[k])}});
    expected.push_back(std::move(starts));
  }

  nlohmann::json samples = nlohmann::json::array();
  for (double t : {0.0, 120.0, 333.0, 640.0, 1111.0, 5000.0}) {
    const auto snap = sample(doc, tl, assignments, t);
    nlohmann::json values = nlohmann::json::object();
    for (const auto& [index, props] : snap.values)
      values[std::to_string(index)] = std::get<double>(props.at(Property::Opacity));
    samples.push_back({{"time", t}, {"opacity", std::move(values)}});
  }

  std::ofstream(out / "program.mjs") << emit_runtime_script(program);
  std::ofstream(out / "document.json") << nlohmann::json{{"viewbox", {vb.min_x, vb.min_y, vb.width(), vb.height()}},
                                                         {"elements", std::move(elements)},
                                                         {"expected", std::move(expected)},
                                                         {"samples", std::move(samples)}}
                                              .dump();
  return 0;
}
