// SPDX-License-Identifier: Apache-2.0
#include "cacaobpmn/xml.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

namespace cacaobpmn::xml {

namespace {

constexpr std::string_view kXmlNsUri = "http://www.w3.org/XML/1998/namespace";

bool is_name_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == ':' ||
         static_cast<unsigned char>(c) >= 0x80;
}

bool is_name_char(char c) {
  return is_name_start(c) || std::isdigit(static_cast<unsigned char>(c)) ||
         c == '-' || c == '.';
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Element run() {
    skip_bom();
    skip_misc();
    if (eof()) error("document has no root element");
    Element root = parse_element();
    skip_misc();
    if (!eof()) error("content after root element");
    return root;
  }

 private:
  struct NsFrame {
    std::map<std::string, std::string, std::less<>> bindings;  // prefix -> uri
    std::string default_ns;
    bool has_default = false;
  };

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
  std::vector<NsFrame> ns_stack_;

  bool eof() const { return pos_ >= text_.size(); }
  char peek() const { return eof() ? '\0' : text_[pos_]; }

  char advance() {
    char c = text_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  bool consume(std::string_view lit) {
    if (text_.substr(pos_, lit.size()) != lit) return false;
    for (std::size_t i = 0; i < lit.size(); ++i) advance();
    return true;
  }

  [[noreturn]] void error(const std::string& message) const {
    throw XmlError(message, line_, col_);
  }

  void skip_bom() {
    if (text_.substr(0, 3) == "\xEF\xBB\xBF") {
      pos_ = 3;
    }
  }

  void skip_ws() {
    while (!eof() && (peek() == ' ' || peek() == '\t' || peek() == '\n' ||
                      peek() == '\r'))
      advance();
  }

  // Whitespace, comments, PIs and the XML declaration outside elements.
  void skip_misc() {
    for (;;) {
      skip_ws();
      if (consume("<?")) {
        skip_until("?>");
      } else if (consume("<!--")) {
        skip_until("-->");
      } else if (text_.substr(pos_, 2) == "<!") {
        error("DOCTYPE and other declarations are not supported");
      } else {
        return;
      }
    }
  }

  void skip_until(std::string_view terminator) {
    while (!eof()) {
      if (consume(terminator)) return;
      advance();
    }
    error("unterminated '" + std::string(terminator) + "' construct");
  }

  std::string read_name() {
    if (eof() || !is_name_start(peek())) error("expected a name");
    std::string name;
    while (!eof() && is_name_char(peek())) name.push_back(advance());
    return name;
  }

  std::string decode_char_ref() {
    // positioned right after "&#"
    std::uint32_t cp = 0;
    if (peek() == 'x' || peek() == 'X') {
      advance();
      bool any = false;
      while (!eof() && std::isxdigit(static_cast<unsigned char>(peek()))) {
        char c = advance();
        cp = cp * 16 + (std::isdigit(static_cast<unsigned char>(c))
                            ? c - '0'
                            : (std::tolower(c) - 'a' + 10));
        any = true;
      }
      if (!any) error("malformed character reference");
    } else {
      bool any = false;
      while (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) {
        cp = cp * 10 + (advance() - '0');
        any = true;
      }
      if (!any) error("malformed character reference");
    }
    if (!consume(";")) error("unterminated character reference");
    // encode as UTF-8
    std::string out;
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
    return out;
  }

  std::string decode_entity() {
    // positioned right after "&"
    if (consume("#")) return decode_char_ref();
    std::string name = read_name();
    if (!consume(";")) error("unterminated entity reference");
    if (name == "lt") return "<";
    if (name == "gt") return ">";
    if (name == "amp") return "&";
    if (name == "quot") return "\"";
    if (name == "apos") return "'";
    error("unknown entity '&" + name + ";'");
  }

  std::string read_attr_value() {
    if (peek() != '"' && peek() != '\'') error("expected attribute value");
    const char quote = advance();
    std::string value;
    for (;;) {
      if (eof()) error("unterminated attribute value");
      char c = peek();
      if (c == quote) {
        advance();
        break;
      }
      if (c == '<') error("'<' in attribute value");
      if (c == '&') {
        advance();
        value += decode_entity();
        continue;
      }
      advance();
      // attribute-value normalization: literal whitespace becomes a space
      if (c == '\n' || c == '\r' || c == '\t') c = ' ';
      value.push_back(c);
    }
    return value;
  }

  QName resolve(const std::string& raw, bool is_attribute) {
    const auto colon = raw.find(':');
    std::string prefix = colon == std::string::npos ? "" : raw.substr(0, colon);
    std::string local = colon == std::string::npos ? raw : raw.substr(colon + 1);
    if (local.empty() || local.find(':') != std::string::npos)
      error("malformed qualified name '" + raw + "'");
    if (prefix == "xml") return {std::string(kXmlNsUri), local};
    if (prefix.empty()) {
      if (is_attribute) return {"", local};  // unprefixed attrs have no ns
      for (auto it = ns_stack_.rbegin(); it != ns_stack_.rend(); ++it)
        if (it->has_default) return {it->default_ns, local};
      return {"", local};
    }
    for (auto it = ns_stack_.rbegin(); it != ns_stack_.rend(); ++it) {
      auto found = it->bindings.find(prefix);
      if (found != it->bindings.end()) return {found->second, local};
    }
    error("undeclared namespace prefix '" + prefix + "'");
  }

  Element parse_element() {
    if (!consume("<")) error("expected element");
    Element element;
    element.line = line_;
    const std::string raw_name = read_name();

    // First pass over attributes: collect raw pairs and namespace
    // declarations so the element's own declarations are in scope.
    NsFrame frame;
    std::vector<std::pair<std::string, std::string>> raw_attrs;
    bool self_closing = false;
    for (;;) {
      skip_ws();
      if (consume("/>")) {
        self_closing = true;
        break;
      }
      if (consume(">")) break;
      if (eof()) error("unterminated start tag");
      const std::string attr_name = read_name();
      skip_ws();
      if (!consume("=")) error("expected '=' after attribute name");
      skip_ws();
      std::string value = read_attr_value();
      if (attr_name == "xmlns") {
        frame.default_ns = value;
        frame.has_default = true;
      } else if (attr_name.rfind("xmlns:", 0) == 0) {
        frame.bindings[attr_name.substr(6)] = value;
      } else {
        raw_attrs.emplace_back(attr_name, std::move(value));
      }
    }
    ns_stack_.push_back(std::move(frame));

    element.name = resolve(raw_name, false);
    std::set<QName> seen;
    for (auto& [raw, value] : raw_attrs) {
      QName qn = resolve(raw, true);
      if (!seen.insert(qn).second)
        error("duplicate attribute '" + raw + "'");
      element.attributes.push_back(Attribute{std::move(qn), std::move(value)});
    }

    if (!self_closing) parse_content(element, raw_name);
    ns_stack_.pop_back();
    return element;
  }

  void parse_content(Element& element, const std::string& raw_name) {
    std::string text;
    bool text_meaningful = false;
    for (;;) {
      if (eof()) error("unterminated element '" + raw_name + "'");
      if (text_.substr(pos_, 2) == "</") {
        consume("</");
        const std::string close = read_name();
        if (close != raw_name)
          error("mismatched end tag '</" + close + ">', expected '</" +
                raw_name + ">'");
        skip_ws();
        if (!consume(">")) error("malformed end tag");
        break;
      }
      if (consume("<!--")) {
        skip_until("-->");
        continue;
      }
      if (consume("<![CDATA[")) {
        const auto end = text_.find("]]>", pos_);
        if (end == std::string_view::npos) error("unterminated CDATA section");
        while (pos_ < end) text.push_back(advance());
        consume("]]>");
        text_meaningful = true;
        continue;
      }
      if (consume("<?")) {
        skip_until("?>");
        continue;
      }
      if (peek() == '<') {
        element.children.push_back(parse_element());
        continue;
      }
      if (peek() == '&') {
        advance();
        text += decode_entity();
        text_meaningful = true;
        continue;
      }
      char c = advance();
      if (c != ' ' && c != '\t' && c != '\n' && c != '\r')
        text_meaningful = true;
      text.push_back(c);
    }
    if (element.children.empty()) {
      // Text-only element: keep content verbatim (annotation text and
      // condition expressions must survive exactly).
      element.text = std::move(text);
    } else if (text_meaningful) {
      error("mixed element and character content is not supported");
    }
  }
};

void escape_text(const std::string& in, std::string& out, std::size_t line) {
  for (char c : in) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '\r': out += "&#13;"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20 && c != '\n' && c != '\t')
          throw XmlError("control character not representable in XML", line, 0);
        out.push_back(c);
    }
  }
}

void escape_attr(const std::string& in, std::string& out, std::size_t line) {
  for (char c : in) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\n': out += "&#10;"; break;
      case '\r': out += "&#13;"; break;
      case '\t': out += "&#9;"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20)
          throw XmlError("control character not representable in XML", line, 0);
        out.push_back(c);
    }
  }
}

class Writer {
 public:
  Writer(const Element& root, const PrefixMap& prefixes) : root_(root) {
    for (const auto& [uri, prefix] : prefixes.uri_to_prefix)
      prefix_of_[uri] = prefix;
    collect(root_);
    // Deterministic prefixes for any namespace the map does not cover.
    int next = 0;
    for (const auto& uri : used_) {
      if (uri.empty() || prefix_of_.count(uri)) continue;
      prefix_of_[uri] = "ns" + std::to_string(next++);
    }
    declared_order_ = prefixes.uri_to_prefix;
    for (const auto& uri : used_)
      if (!uri.empty() &&
          std::none_of(declared_order_.begin(), declared_order_.end(),
                       [&](const auto& p) { return p.first == uri; }))
        declared_order_.emplace_back(uri, prefix_of_[uri]);
  }

  std::string run() {
    out_ = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    write_element(root_, 0, true);
    return std::move(out_);
  }

 private:
  const Element& root_;
  std::map<std::string, std::string> prefix_of_;
  std::set<std::string> used_;  // sorted URIs
  std::vector<std::pair<std::string, std::string>> declared_order_;
  std::string out_;

  void collect(const Element& e) {
    used_.insert(e.name.ns);
    for (const auto& a : e.attributes) used_.insert(a.name.ns);
    for (const auto& c : e.children) collect(c);
  }

  std::string qualified(const QName& n) const {
    if (n.ns.empty()) return n.local;
    if (n.ns == kXmlNsUri) return "xml:" + n.local;
    return prefix_of_.at(n.ns) + ":" + n.local;
  }

  void write_element(const Element& e, int depth, bool is_root) {
    out_.append(static_cast<std::size_t>(depth) * 2, ' ');
    out_ += '<';
    out_ += qualified(e.name);
    if (is_root) {
      for (const auto& [uri, prefix] : declared_order_) {
        if (uri == kXmlNsUri) continue;
        out_ += " xmlns:" + prefix + "=\"";
        escape_attr(uri, out_, e.line);
        out_ += '"';
      }
    }
    for (const auto& a : e.attributes) {
      out_ += ' ';
      out_ += qualified(a.name);
      out_ += "=\"";
      escape_attr(a.value, out_, e.line);
      out_ += '"';
    }
    if (e.children.empty() && e.text.empty()) {
      out_ += "/>\n";
      return;
    }
    out_ += '>';
    if (e.children.empty()) {
      escape_text(e.text, out_, e.line);
    } else {
      out_ += '\n';
      for (const auto& c : e.children) write_element(c, depth + 1, false);
      out_.append(static_cast<std::size_t>(depth) * 2, ' ');
    }
    out_ += "</";
    out_ += qualified(e.name);
    out_ += ">\n";
  }
};

}  // namespace

Element parse(std::string_view text) { return Parser(text).run(); }

std::string write(const Element& root, const PrefixMap& prefixes) {
  return Writer(root, prefixes).run();
}

}  // namespace cacaobpmn::xml
