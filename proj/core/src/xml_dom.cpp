#include "xml_dom.hpp"

#include <expat.h>

#include <charconv>
#include <cstdlib>

#include "gxt/error.hpp"

namespace gxt::xml {
namespace {

struct ParseState {
  std::unique_ptr<Node> root;
  std::vector<Node*> stack;
};

void XMLCALL on_start(void* user, const XML_Char* name, const XML_Char** attrs) {
  auto* st = static_cast<ParseState*>(user);
  auto node = std::make_unique<Node>();
  node->name = name;
  for (int i = 0; attrs[i] != nullptr; i += 2) node->attributes.emplace_back(attrs[i], attrs[i + 1]);
  Node* raw = node.get();
  if (st->stack.empty()) {
    st->root = std::move(node);
  } else {
    st->stack.back()->children.push_back(std::move(node));
  }
  st->stack.push_back(raw);
}

void XMLCALL on_end(void* user, const XML_Char*) {
  auto* st = static_cast<ParseState*>(user);
  st->stack.pop_back();
}

void XMLCALL on_text(void* user, const XML_Char* s, int len) {
  auto* st = static_cast<ParseState*>(user);
  if (!st->stack.empty()) st->stack.back()->text.append(s, static_cast<std::size_t>(len));
}

struct ParserCloser {
  void operator()(XML_Parser p) const { XML_ParserFree(p); }
};

}  // namespace

const std::string* Node::attribute(std::string_view key) const {
  for (const auto& [k, v] : attributes) {
    if (k == key) return &v;
  }
  return nullptr;
}

const Node* Node::child(std::string_view child_name) const {
  for (const auto& c : children) {
    if (c->name == child_name) return c.get();
  }
  return nullptr;
}

std::vector<const Node*> Node::children_named(std::string_view child_name) const {
  std::vector<const Node*> out;
  for (const auto& c : children) {
    if (c->name == child_name) out.push_back(c.get());
  }
  return out;
}

std::unique_ptr<Node> parse(std::string_view document) {
  std::unique_ptr<std::remove_pointer_t<XML_Parser>, ParserCloser> parser(XML_ParserCreate(nullptr));
  if (!parser) throw InternalError("cannot allocate XML parser");
  ParseState st;
  XML_SetUserData(parser.get(), &st);
  XML_SetElementHandler(parser.get(), on_start, on_end);
  XML_SetCharacterDataHandler(parser.get(), on_text);
  // Trailing NUL padding from NIFTI extensions is not XML.
  while (!document.empty() && document.back() == '\0') document.remove_suffix(1);
  if (XML_Parse(parser.get(), document.data(), static_cast<int>(document.size()), XML_TRUE) ==
      XML_STATUS_ERROR) {
    throw XmlError(std::string("XML parse error at line ") +
                   std::to_string(XML_GetCurrentLineNumber(parser.get())) + ": " +
                   XML_ErrorString(XML_GetErrorCode(parser.get())));
  }
  if (!st.root) throw XmlError("empty XML document");
  return std::move(st.root);
}

std::string escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string cdata(std::string_view text) {
  std::string out = "<![CDATA[";
  std::size_t pos = 0;
  while (true) {
    const std::size_t hit = text.find("]]>", pos);
    if (hit == std::string_view::npos) {
      out.append(text.substr(pos));
      break;
    }
    out.append(text.substr(pos, hit - pos));
    out += "]]]]><![CDATA[>";
    pos = hit + 3;
  }
  out += "]]>";
  return out;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

double parse_double(std::string_view token, std::string_view what) {
  double v = 0.0;
  const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
  if (res.ec == std::errc() && res.ptr == token.data() + token.size()) return v;
  // from_chars rejects a leading '+' and spellings like "inf"; strtod accepts them.
  std::string copy(token);
  char* end = nullptr;
  v = std::strtod(copy.c_str(), &end);
  if (copy.empty() || end != copy.c_str() + copy.size()) {
    throw FormatError("invalid number '" + copy + "' in " + std::string(what));
  }
  return v;
}

std::int64_t parse_int(std::string_view token, std::string_view what) {
  std::int64_t v = 0;
  const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
  if (res.ec != std::errc() || res.ptr != token.data() + token.size()) {
    throw FormatError("invalid integer '" + std::string(token) + "' in " + std::string(what));
  }
  return v;
}

std::vector<std::string_view> tokens(std::string_view text, bool commas) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  const auto is_sep = [&](char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || (commas && c == ',');
  };
  while (i < text.size()) {
    while (i < text.size() && is_sep(text[i])) ++i;
    const std::size_t start = i;
    while (i < text.size() && !is_sep(text[i])) ++i;
    if (i > start) out.push_back(text.substr(start, i - start));
  }
  return out;
}

Writer::Writer(bool with_declaration) {
  if (with_declaration) out_ = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
}

void Writer::indent() { out_.append(stack_.size() * 2, ' '); }

void Writer::write_attrs(const std::vector<std::pair<std::string, std::string>>& attrs) {
  for (const auto& [k, v] : attrs) {
    out_ += ' ';
    out_ += k;
    out_ += "=\"";
    out_ += escape(v);
    out_ += '"';
  }
}

Writer& Writer::open(std::string_view name,
                     const std::vector<std::pair<std::string, std::string>>& attrs) {
  indent();
  out_ += '<';
  out_ += name;
  write_attrs(attrs);
  out_ += ">\n";
  stack_.emplace_back(name);
  return *this;
}

Writer& Writer::leaf(std::string_view name, std::string_view text,
                     const std::vector<std::pair<std::string, std::string>>& attrs, bool use_cdata) {
  indent();
  out_ += '<';
  out_ += name;
  write_attrs(attrs);
  out_ += '>';
  out_ += use_cdata ? cdata(text) : escape(text);
  out_ += "</";
  out_ += name;
  out_ += ">\n";
  return *this;
}

Writer& Writer::empty(std::string_view name,
                      const std::vector<std::pair<std::string, std::string>>& attrs) {
  indent();
  out_ += '<';
  out_ += name;
  write_attrs(attrs);
  out_ += "/>\n";
  return *this;
}

Writer& Writer::close() {
  const std::string name = std::move(stack_.back());
  stack_.pop_back();
  indent();
  out_ += "</" + name + ">\n";
  return *this;
}

Writer& Writer::subtree(const Node& node) {
  if (node.children.empty()) {
    return leaf(node.name, node.text, node.attributes, false);
  }
  open(node.name, node.attributes);
  const std::string text = trim(node.text);
  if (!text.empty()) {
    indent();
    out_ += escape(text);
    out_ += '\n';
  }
  for (const auto& c : node.children) subtree(*c);
  return close();
}

Writer& Writer::raw_line(std::string_view line) {
  out_ += line;
  out_ += '\n';
  return *this;
}

}  // namespace gxt::xml
