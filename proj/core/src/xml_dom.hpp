#pragma once

// Minimal element tree on top of expat, shared by the CIFTI and GIFTI
// readers. Not part of the public API.

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace gxt::xml {

struct Node {
  std::string name;
  std::vector<std::pair<std::string, std::string>> attributes;
  std::vector<std::unique_ptr<Node>> children;
  /// Concatenated character data directly inside this element.
  std::string text;

  const std::string* attribute(std::string_view key) const;
  const Node* child(std::string_view child_name) const;
  std::vector<const Node*> children_named(std::string_view child_name) const;
};

/// Parses a complete document; throws XmlError on malformed input.
std::unique_ptr<Node> parse(std::string_view document);

/// Streaming writer producing indented XML.
class Writer {
 public:
  explicit Writer(bool with_declaration = true);

  Writer& open(std::string_view name,
               const std::vector<std::pair<std::string, std::string>>& attrs = {});
  /// Element with text content on one line.
  Writer& leaf(std::string_view name, std::string_view text,
               const std::vector<std::pair<std::string, std::string>>& attrs = {},
               bool cdata = false);
  Writer& empty(std::string_view name,
                const std::vector<std::pair<std::string, std::string>>& attrs);
  Writer& close();
  /// Re-emits a parsed subtree verbatim (used for unknown elements).
  Writer& subtree(const Node& node);
  Writer& raw_line(std::string_view line);

  std::string str() const { return out_; }

 private:
  void indent();
  void write_attrs(const std::vector<std::pair<std::string, std::string>>& attrs);
  std::string out_;
  std::vector<std::string> stack_;
};

std::string escape(std::string_view text);
std::string cdata(std::string_view text);
std::string trim(std::string_view s);

/// Strict numeric parsing of a whole token; throws FormatError naming `what`.
double parse_double(std::string_view token, std::string_view what);
std::int64_t parse_int(std::string_view token, std::string_view what);

/// Splits on whitespace (and commas when `commas` is set).
std::vector<std::string_view> tokens(std::string_view text, bool commas = false);

}  // namespace gxt::xml
