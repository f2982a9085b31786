#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sway::xml {

struct Attribute {
  std::string name;
  std::string value;  // entity-decoded
};

struct Node {
  enum class Kind { Element, Text, Comment, CData, Instruction, Doctype };

  Kind kind = Kind::Element;
  std::string name;
  std::vector<Attribute> attributes;
  std::string text;  // raw source text for every non-element kind
  std::vector<Node> children;

  // Byte span of the whole node in the source, and of the start tag.
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t start_tag_end = 0;
  bool self_closing = false;

  bool is_element() const { return kind == Kind::Element; }
  const std::string* attribute(std::string_view key) const;
  std::string* attribute(std::string_view key);
  void set_attribute(std::string_view key, std::string value);
  bool erase_attribute(std::string_view key);
};

struct Document {
  std::string source;
  Node root;  // the single root element
};

// Throws sway::Error(MalformedSvg) with "line:col" as the detail.
Document parse(std::string source);

std::string escape_attribute(std::string_view value);
std::string decode_entities(std::string_view raw);

// Serializes a node from its fields (not from the source bytes).
void write(const Node& node, std::string& out);
std::string write(const Node& node);

}  // namespace sway::xml
