// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cacaobpmn::xml {

/// Namespace-resolved name. `ns` is the namespace URI ("" = no namespace);
/// prefixes are resolved away at parse time and reassigned at write time.
struct QName {
  std::string ns;
  std::string local;

  auto operator<=>(const QName&) const = default;
};

struct Attribute {
  QName name;
  std::string value;

  bool operator==(const Attribute&) const = default;
};

/// Element tree node. Mixed content is not supported: an element carries
/// either child elements or character data, which is all the BPMN subset
/// needs.
struct Element {
  QName name;
  std::vector<Attribute> attributes;
  std::vector<Element> children;
  std::string text;
  std::size_t line = 0;  // 1-based source position, 0 when synthesized

  const std::string* find_attribute(const QName& n) const {
    for (const auto& a : attributes)
      if (a.name == n) return &a.value;
    return nullptr;
  }
  void set_attribute(QName n, std::string value) {
    attributes.push_back(Attribute{std::move(n), std::move(value)});
  }
  Element& add_child(QName n) {
    children.push_back(Element{});
    children.back().name = std::move(n);
    return children.back();
  }
};

class XmlError : public std::runtime_error {
 public:
  XmlError(const std::string& message, std::size_t line, std::size_t column)
      : std::runtime_error(message + " (line " + std::to_string(line) +
                           ", column " + std::to_string(column) + ")"),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Parses a standalone XML document into its root element. Comments and
/// processing instructions are skipped; DOCTYPE is rejected. Namespace
/// declarations are resolved and do not appear as attributes.
Element parse(std::string_view text);

/// Writer options: fixed prefix per namespace URI, declared on the root
/// element in the given order. Namespaces used in the tree but absent from
/// the map get deterministic ns0, ns1, ... prefixes (sorted by URI).
struct PrefixMap {
  std::vector<std::pair<std::string, std::string>> uri_to_prefix;
};

/// Serializes deterministically: 2-space indent, attributes in stored
/// order, self-closing empty elements, newline-terminated. Throws XmlError
/// on characters XML 1.0 cannot represent.
std::string write(const Element& root, const PrefixMap& prefixes);

}  // namespace cacaobpmn::xml
