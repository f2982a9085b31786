#include <doctest.h>

#include <set>

#include "sway/condense.hpp"
#include "test_support.hpp"

using namespace sway;

namespace {

std::string dots(int n) {
  std::string s = R"(<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 1000 1000">)";
  s += R"(<rect class="frame" width="1000" height="1000" fill="none" stroke="#333" stroke-dasharray="4 2"/>)";
  for (int i = 0; i < n; ++i)
    s += "<circle class=\"dot\" cx=\"" + std::to_string(i % 100 * 10) + "\" cy=\"" +
         std::to_string(i / 100 * 10) + "\" r=\"3\" fill=\"steelblue\" data-value=\"" +
         std::to_string(i) + "\" onclick=\"select(this)\" aria-label=\"point " + std::to_string(i) + "\"/>";
  return s + "</svg>";
}

std::set<std::string> element_kinds(const VectorDocument& doc) {
  std::set<std::string> kinds;
  for (const auto& e : doc.elements) {
    std::string k = e.tag;
    for (const auto& c : e.classes) k += "." + c;
    kinds.insert(k);
  }
  return kinds;
}

}  // namespace

TEST_CASE("document under budget passes through unchanged") {
  auto doc = parse_document(dots(3));
  auto out = condense_for_prompt(doc, 16384);
  CHECK(out.svg == doc.source);
  CHECK(out.report.passthrough);
  CHECK(out.report.entries.empty());
  CHECK(out.report.summary().empty());
}

TEST_CASE("repetitive dots are sampled into the budget") {
  auto doc = parse_document(dots(1000));
  REQUIRE(estimate_tokens(doc.source) > 2000);
  auto out = condense_for_prompt(doc, 2000, 42);
  CHECK(estimate_tokens(out.svg) <= 2000);
  CHECK_FALSE(out.report.passthrough);
  REQUIRE(out.report.entries.size() == 1);
  const auto& e = out.report.entries[0];
  CHECK(e.group == "dot");
  CHECK(e.total == 1000);
  CHECK(e.kept >= 1);
  CHECK(e.kept < 1000);
  CHECK(out.report.summary() == "dot: kept " + std::to_string(e.kept) + " of 1000\n");

  auto again = parse_document(out.svg);
  CHECK(select_group(again, ".dot").size() == e.kept);
  CHECK(element_kinds(again) == element_kinds(doc));
  // Appearance-irrelevant attributes are gone, data attributes stay.
  CHECK(out.svg.find("onclick") == std::string::npos);
  CHECK(out.svg.find("aria-label") == std::string::npos);
  CHECK(out.svg.find("stroke-dasharray") == std::string::npos);
  CHECK(out.svg.find("data-value") != std::string::npos);
}

TEST_CASE("condensation is deterministic per seed") {
  auto doc = parse_document(dots(800));
  auto a = condense_for_prompt(doc, 1500, 7);
  auto b = condense_for_prompt(doc, 1500, 7);
  CHECK(a.svg == b.svg);
  auto c = condense_for_prompt(doc, 1500, 8);
  CHECK(estimate_tokens(c.svg) <= 1500);
}

TEST_CASE("budget too small") {
  auto doc = parse_document(dots(50));
  CHECK(sway::test::error_code_of([&] { condense_for_prompt(doc, 1); }) == ErrorCode::BudgetTooSmall);
  CHECK(sway::test::error_code_of([&] { condense_for_prompt(doc, 0); }) == ErrorCode::BudgetTooSmall);
}

TEST_CASE("nested groups keep an exemplar of every element kind") {
  auto doc = parse_document(sway::test::read_fixture("oecd_flowers.svg"));
  const auto kinds = element_kinds(doc);
  for (std::size_t budget : {600u, 900u, 1500u}) {
    auto out = condense_for_prompt(doc, budget, 3);
    CHECK(estimate_tokens(out.svg) <= budget);
    CHECK(element_kinds(parse_document(out.svg)) == kinds);
  }
}
