#include "sway/xml.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>

#include "sway/error.hpp"

namespace sway::xml {

const std::string* Node::attribute(std::string_view key) const {
  for (const auto& a : attributes)
    if (a.name == key) return &a.value;
  return nullptr;
}

std::string* Node::attribute(std::string_view key) {
  for (auto& a : attributes)
    if (a.name == key) return &a.value;
  return nullptr;
}

void Node::set_attribute(std::string_view key, std::string value) {
  if (auto* v = attribute(key)) {
    *v = std::move(value);
    return;
  }
  attributes.push_back({std::string(key), std::move(value)});
}

bool Node::erase_attribute(std::string_view key) {
  auto it = std::find_if(attributes.begin(), attributes.end(),
                         [&](const Attribute& a) { return a.name == key; });
  if (it == attributes.end()) return false;
  attributes.erase(it);
  return true;
}

namespace {

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

bool is_name_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == ':' ||
         static_cast<unsigned char>(c) >= 0x80;
}

bool is_name_char(char c) {
  return is_name_start(c) || std::isdigit(static_cast<unsigned char>(c)) ||
         c == '-' || c == '.';
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

class Parser {
 public:
  explicit Parser(const std::string& src) : src_(src) {}

  Node parse_document() {
    std::optional<Node> root;
    while (true) {
      skip_space();
      if (at_end()) break;
      if (starts_with("<?")) {
        skip_instruction();
      } else if (starts_with("<!--")) {
        skip_comment();
      } else if (starts_with("<!DOCTYPE") || starts_with("<!doctype")) {
        skip_doctype();
      } else if (peek() == '<') {
        if (root) fail("content after the root element");
        root = parse_element();
      } else {
        fail("text outside the root element");
      }
    }
    if (!root) fail("no root element");
    return std::move(*root);
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < std::min(pos_, src_.size()); ++i) {
      if (src_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::string where = std::to_string(line) + ":" + std::to_string(col);
    throw Error(ErrorCode::MalformedSvg, "XML error at " + where + ": " + what, where);
  }

  bool at_end() const { return pos_ >= src_.size(); }
  char peek() const { return at_end() ? '\0' : src_[pos_]; }
  bool starts_with(std::string_view s) const {
    return src_.compare(pos_, s.size(), s) == 0;
  }
  void skip_space() {
    while (!at_end() && is_space(src_[pos_])) ++pos_;
  }
  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::size_t find_or_fail(std::string_view terminator, const char* what) {
    auto at = src_.find(terminator, pos_);
    if (at == std::string::npos) fail(std::string("unterminated ") + what);
    return at;
  }

  Node raw_node(Node::Kind kind, std::string_view terminator, const char* what) {
    Node n;
    n.kind = kind;
    n.begin = pos_;
    auto at = find_or_fail(terminator, what);
    pos_ = at + terminator.size();
    n.end = pos_;
    n.text = src_.substr(n.begin, n.end - n.begin);
    return n;
  }

  void skip_instruction() { raw_node(Node::Kind::Instruction, "?>", "processing instruction"); }
  void skip_comment() { raw_node(Node::Kind::Comment, "-->", "comment"); }

  void skip_doctype() {
    // Internal subsets may contain '>' inside brackets.
    int depth = 0;
    while (!at_end()) {
      char c = src_[pos_++];
      if (c == '[') ++depth;
      if (c == ']') --depth;
      if (c == '>' && depth <= 0) return;
    }
    fail("unterminated DOCTYPE");
  }

  std::string parse_name() {
    if (!is_name_start(peek())) fail("expected a name");
    auto start = pos_;
    while (!at_end() && is_name_char(src_[pos_])) ++pos_;
    return src_.substr(start, pos_ - start);
  }

  Node parse_element() {
    Node n;
    n.begin = pos_;
    expect('<');
    n.name = parse_name();
    while (true) {
      bool had_space = !at_end() && is_space(peek());
      skip_space();
      if (at_end()) fail("unterminated start tag <" + n.name + ">");
      if (starts_with("/>")) {
        pos_ += 2;
        n.self_closing = true;
        n.start_tag_end = pos_;
        n.end = pos_;
        return n;
      }
      if (peek() == '>') {
        ++pos_;
        n.start_tag_end = pos_;
        break;
      }
      if (!had_space) fail("expected whitespace between attributes");
      Attribute a;
      a.name = parse_name();
      skip_space();
      expect('=');
      skip_space();
      char quote = peek();
      if (quote != '"' && quote != '\'') fail("expected quoted attribute value");
      ++pos_;
      auto close = src_.find(quote, pos_);
      if (close == std::string::npos) fail("unterminated attribute value");
      auto raw = std::string_view(src_).substr(pos_, close - pos_);
      if (raw.find('<') != std::string_view::npos) fail("'<' in attribute value");
      a.value = decode_entities(raw);
      pos_ = close + 1;
      if (n.attribute(a.name)) fail("duplicate attribute " + a.name);
      n.attributes.push_back(std::move(a));
    }
    parse_content(n);
    return n;
  }

  void parse_content(Node& parent) {
    while (true) {
      if (at_end()) fail("unterminated element <" + parent.name + ">");
      if (starts_with("</")) {
        pos_ += 2;
        auto name = parse_name();
        if (name != parent.name)
          fail("mismatched end tag </" + name + "> for <" + parent.name + ">");
        skip_space();
        expect('>');
        parent.end = pos_;
        return;
      }
      if (starts_with("<!--")) {
        parent.children.push_back(raw_node(Node::Kind::Comment, "-->", "comment"));
      } else if (starts_with("<![CDATA[")) {
        parent.children.push_back(raw_node(Node::Kind::CData, "]]>", "CDATA section"));
      } else if (starts_with("<?")) {
        parent.children.push_back(
            raw_node(Node::Kind::Instruction, "?>", "processing instruction"));
      } else if (peek() == '<') {
        parent.children.push_back(parse_element());
      } else {
        Node t;
        t.kind = Node::Kind::Text;
        t.begin = pos_;
        auto next = src_.find('<', pos_);
        pos_ = next == std::string::npos ? src_.size() : next;
        t.end = pos_;
        t.text = src_.substr(t.begin, t.end - t.begin);
        parent.children.push_back(std::move(t));
      }
    }
  }

  const std::string& src_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string decode_entities(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i] != '&') {
      out.push_back(raw[i]);
      continue;
    }
    auto semi = raw.find(';', i);
    if (semi == std::string_view::npos) {
      out.push_back('&');
      continue;
    }
    auto ent = raw.substr(i + 1, semi - i - 1);
    if (ent == "amp") out.push_back('&');
    else if (ent == "lt") out.push_back('<');
    else if (ent == "gt") out.push_back('>');
    else if (ent == "quot") out.push_back('"');
    else if (ent == "apos") out.push_back('\'');
    else if (!ent.empty() && ent[0] == '#') {
      std::uint32_t cp = 0;
      bool hex = ent.size() > 1 && (ent[1] == 'x' || ent[1] == 'X');
      try {
        cp = static_cast<std::uint32_t>(
            std::stoul(std::string(ent.substr(hex ? 2 : 1)), nullptr, hex ? 16 : 10));
      } catch (...) {
        out.append(raw.substr(i, semi - i + 1));
        i = semi;
        continue;
      }
      append_utf8(out, cp);
    } else {
      out.append(raw.substr(i, semi - i + 1));
    }
    i = semi;
  }
  return out;
}

std::string escape_attribute(std::string_view value) {
  std::string out;
  out.reserve(value.size());
  for (char c : value) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

Document parse(std::string source) {
  Document doc;
  doc.source = std::move(source);
  Parser p(doc.source);
  doc.root = p.parse_document();
  return doc;
}

void write(const Node& node, std::string& out) {
  if (!node.is_element()) {
    out += node.text;
    return;
  }
  out += '<';
  out += node.name;
  for (const auto& a : node.attributes) {
    out += ' ';
    out += a.name;
    out += "=\"";
    out += escape_attribute(a.value);
    out += '"';
  }
  if (node.children.empty()) {
    out += "/>";
    return;
  }
  out += '>';
  for (const auto& c : node.children) write(c, out);
  out += "</";
  out += node.name;
  out += '>';
}

std::string write(const Node& node) {
  std::string out;
  write(node, out);
  return out;
}

}  // namespace sway::xml
