#include "sway/assistant.hpp"

#include <fstream>
#include <sstream>

#include "sway/digest.hpp"
#include "sway/error.hpp"

namespace sway {

namespace {

const char* const kSystemText = R"(You animate SVG data visualizations.
You receive a chart as SVG text (sometimes condensed, with a note listing what was sampled), an optional screenshot, the conversation so far, clip specifications the user refers to, and a request.
Reply with one JSON object {"message": string, "clips": [clip, ...]}. Omit "clips" when the user only asks a question.
A clip targets every element of one class selector such as ".petal" and holds keyframe tracks. Each track animates one property: translateX, translateY (user units, relative to the resting position), rotate (degrees about the element's own centre), scale (factor about the centre, 1 = unchanged), opacity (0..1), fill-color, stroke-color ("#rrggbb"), stroke-width (user units) or filter-blur (standard deviation in user units).
Keyframe offsets run from 0 to 1 and increase strictly, starting at 0 and ending at 1. Easing names: linear, ease-in-quad, ease-out-quad, ease-in-out-cubic, sine-in-out. The easing on a keyframe shapes the segment that starts there.
Give every clip a short title and a one-sentence description. Set "loop" to true only for repeating effects.
Timing and ordering across the elements of a group are configured separately, so describe the motion of a single element.
Only use selectors that appear in the SVG. Avoid changing a channel that already encodes data, for example recoloring marks whose color shows a category.)";

const char* const kOneShotRequest = R"(Request: Make the bars rise from the baseline.

SVG:
<svg viewBox="0 0 120 80"><rect class="bar" x="10" y="30" width="20" height="50" fill="#4c78a8"/><rect class="bar" x="50" y="10" width="20" height="70" fill="#4c78a8"/><rect class="bar" x="90" y="50" width="20" height="30" fill="#4c78a8"/></svg>)";

const char* const kOneShotReply =
    R"({"message":"Each bar now slides up from below the axis and fades in, so the chart builds from the baseline.","clips":[{"selector":".bar","title":"Rise from baseline","description":"Bars slide up into place while fading in.","loop":false,"tracks":[{"property":"translateY","keyframes":[{"offset":0,"value":60,"easing":"ease-out-quad"},{"offset":1,"value":0,"easing":"linear"}]},{"property":"opacity","keyframes":[{"offset":0,"value":0,"easing":"linear"},{"offset":1,"value":1,"easing":"linear"}]}]}]})";

nlohmann::json make_reply_schema() {
  using nlohmann::json;
  json value = {{"oneOf", json::array({{{"type", "number"}}, {{"type", "string"}, {"pattern", "^#[0-9a-fA-F]{6}$"}}})}};
  json easing = {{"enum", json::array({"linear", "ease-in-quad", "ease-out-quad", "ease-in-out-cubic", "sine-in-out"})}};
  json property = {{"enum", json::array()}};
  for (auto p : kAllProperties) property["enum"].push_back(property_name(p));
  json keyframe = {{"type", "object"},
                   {"required", json::array({"offset", "value"})},
                   {"additionalProperties", false},
                   {"properties",
                    {{"offset", {{"type", "number"}, {"minimum", 0}, {"maximum", 1}}}, {"value", value}, {"easing", easing}}}};
  json track = {{"type", "object"},
                {"required", json::array({"property", "keyframes"})},
                {"additionalProperties", false},
                {"properties", {{"property", property}, {"keyframes", {{"type", "array"}, {"minItems", 2}, {"items", keyframe}}}}}};
  json clip = {{"type", "object"},
               {"required", json::array({"selector", "title", "tracks"})},
               {"additionalProperties", false},
               {"properties",
                {{"selector", {{"type", "string"}, {"minLength", 1}}},
                 {"title", {{"type", "string"}, {"minLength", 1}}},
                 {"description", {{"type", "string"}}},
                 {"loop", {{"type", "boolean"}}},
                 {"tracks", {{"type", "array"}, {"minItems", 1}, {"items", track}}}}}};
  return {{"$schema", "https://json-schema.org/draft/2020-12/schema"},
          {"title", "Assistant reply"},
          {"type", "object"},
          {"required", json::array({"message"})},
          {"properties", {{"message", {{"type", "string"}}}, {"clips", {{"type", "array"}, {"items", clip}}}}}};
}

std::string condensation_note(const CondenseReport& report) {
  return "Note: the SVG was condensed to fit the context. Attributes that do not affect appearance were removed "
         "and repeated elements were randomly sampled:\n" +
         report.summary();
}

// Returns the end of the balanced object starting at `begin`, or npos.
std::size_t object_end(const std::string& s, std::size_t begin) {
  int depth = 0;
  bool in_string = false, escaped = false;
  for (std::size_t i = begin; i < s.size(); ++i) {
    const char c = s[i];
    if (in_string) {
      if (escaped) escaped = false;
      else if (c == '\\') escaped = true;
      else if (c == '"') in_string = false;
      continue;
    }
    if (c == '"') in_string = true;
    else if (c == '{') ++depth;
    else if (c == '}' && --depth == 0) return i + 1;
  }
  return std::string::npos;
}

}  // namespace

const nlohmann::json& reply_schema() {
  static const nlohmann::json schema = make_reply_schema();
  return schema;
}

std::string PromptBundle::user_content() const {
  std::string out = "Request: " + user_text + "\n";
  if (!referenced_specs.empty()) {
    out += "\nReferenced clips:\n";
    for (const auto& spec : referenced_specs) out += spec.dump() + "\n";
  }
  out += "\nSVG:\n" + svg_text;
  if (condensation) out += "\n\n" + condensation_note(*condensation);
  return out;
}

std::size_t PromptBundle::estimated_tokens() const {
  std::size_t n = estimate_tokens(system_text) + estimate_tokens(user_content()) +
                  estimate_tokens(one_shot_request) + estimate_tokens(one_shot_reply) +
                  estimate_tokens(output_schema.dump());
  for (const auto& [role, text] : history) n += estimate_tokens(role) + estimate_tokens(text);
  if (screenshot) n += kScreenshotTokens;
  return n;
}

PromptBundle build_prompt(const Session& session, const std::string& user_text,
                          const std::vector<VersionId>& base_versions, const PromptOptions& options) {
  PromptBundle b;
  b.system_text = kSystemText;
  for (const auto& e : session.history) b.history.emplace_back(role_name(e.role), e.text);
  b.user_text = user_text;
  b.screenshot = options.screenshot;
  for (auto id : base_versions) {
    const Version& v = session.version(id);
    nlohmann::json clips = nlohmann::json::array();
    for (const auto& g : v.clips) clips.push_back(clip_to_json(g.clip));
    b.referenced_specs.push_back({{"version", id}, {"clips", std::move(clips)}});
  }
  b.output_schema = reply_schema();
  b.one_shot_request = kOneShotRequest;
  b.one_shot_reply = kOneShotReply;

  b.svg_text = session.document.source;
  if (b.estimated_tokens() <= options.budget) return b;

  b.svg_text.clear();
  const std::size_t fixed = b.estimated_tokens();
  auto too_small = [&] {
    return Error(ErrorCode::BudgetTooSmall,
                 "context budget of " + std::to_string(options.budget) + " tokens cannot hold the prompt",
                 std::to_string(options.budget));
  };
  if (fixed >= options.budget) throw too_small();
  std::size_t svg_budget = options.budget - fixed;
  for (int attempt = 0; attempt < 8; ++attempt) {
    auto condensed = condense_for_prompt(session.document, svg_budget, options.condense_seed);
    b.svg_text = std::move(condensed.svg);
    b.condensation = condensed.report.passthrough ? std::nullopt : std::optional(condensed.report);
    const std::size_t total = b.estimated_tokens();
    if (total <= options.budget) return b;
    const std::size_t over = total - options.budget;
    if (over >= svg_budget) break;
    svg_budget -= over;
  }
  throw too_small();
}

nlohmann::json extract_reply_json(const std::string& raw) {
  for (std::size_t pos = raw.find('{'); pos != std::string::npos; pos = raw.find('{', pos + 1)) {
    const std::size_t end = object_end(raw, pos);
    if (end == std::string::npos) continue;
    auto j = nlohmann::json::parse(raw.begin() + static_cast<std::ptrdiff_t>(pos),
                                   raw.begin() + static_cast<std::ptrdiff_t>(end), nullptr, false);
    if (j.is_object() && j.contains("message") && j["message"].is_string()) return j;
  }
  throw Error(ErrorCode::NoJsonFound, "reply contains no JSON object with a message");
}

AssistantReply parse_reply(const std::string& raw) {
  AssistantReply reply;
  reply.raw = raw;
  nlohmann::json j;
  try {
    j = extract_reply_json(raw);
  } catch (const Error&) {
    reply.message = raw;
    return reply;
  }
  reply.message = j["message"].get<std::string>();
  if (!j.contains("clips") || j["clips"].is_null()) return reply;
  if (!j["clips"].is_array()) {
    reply.diagnostics.push_back({DiagnosticKind::SchemaError, "$.clips", "clips must be an array"});
    return reply;
  }
  std::vector<ClipSpec> clips;
  for (std::size_t i = 0; i < j["clips"].size(); ++i) {
    auto parsed = parse_clip(j["clips"][i], "$.clips[" + std::to_string(i) + "]");
    for (auto& d : parsed.diagnostics) reply.diagnostics.push_back(std::move(d));
    if (parsed.clip) clips.push_back(std::move(*parsed.clip));
  }
  if (reply.diagnostics.empty() && !clips.empty()) reply.clips = std::move(clips);
  return reply;
}

StubClient::StubClient(std::filesystem::path fixture_dir, std::size_t max_context)
    : dir_(std::move(fixture_dir)), max_context_(max_context) {}

std::string StubClient::fixture_key(const std::string& user_text) { return sha256_hex(user_text); }

std::string StubClient::complete(const PromptBundle& bundle) {
  for (auto name : {fixture_key(bundle.user_text) + ".json", std::string("default.json")}) {
    std::ifstream in(dir_ / name, std::ios::binary);
    if (!in) continue;
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
  throw Error(ErrorCode::ClientError, "no canned reply in " + dir_.string(), dir_.string());
}

Generation generate_version(const Session& session, ModelClient& client, const std::string& user_text,
                            const std::vector<VersionId>& base_versions, const GenerateOptions& options) {
  for (auto id : base_versions) session.version(id);
  auto bundle = build_prompt(session, user_text, base_versions, options.prompt);
  auto reply = parse_reply(client.complete(bundle));

  Generation g;
  const std::string now = options.clock ? options.clock() : std::string();
  g.request = {Role::User, user_text, base_versions, std::nullopt, now};
  g.reply = {Role::Assistant, reply.message, {}, std::nullopt, now};
  g.diagnostics = std::move(reply.diagnostics);
  if (!reply.clips) return g;

  Version v;
  v.id = session.next_version_id();
  v.origin_message = session.history.size();
  v.base_versions = base_versions;
  for (auto& clip : *reply.clips) {
    GroupClip gc;
    gc.clip = std::move(clip);
    v.clips.push_back(std::move(gc));
  }
  if (session.manifest) {
    std::vector<ClipSpec> specs;
    for (const auto& gc : v.clips) specs.push_back(gc.clip);
    v.warnings = check_encoding_conflict(*session.manifest, specs, session.document);
  }
  g.reply.produced_version = v.id;
  g.version = std::move(v);
  return g;
}

void apply_generation(Session& session, Generation generation) {
  session.history.push_back(std::move(generation.request));
  session.history.push_back(std::move(generation.reply));
  if (generation.version) {
    session.active_version = generation.version->id;
    session.versions.push_back(std::move(*generation.version));
  }
}

}  // namespace sway
