// SPDX-License-Identifier: Apache-2.0
#include "cacaobpmn/cacao/diff.hpp"

#include <algorithm>

#include "cacaobpmn/cacao/codec.hpp"

namespace cacaobpmn::cacao {

namespace {

std::string brief(const Json& value) {
  std::string text = value.dump();
  if (text.size() > 60) text = text.substr(0, 57) + "...";
  return text;
}

void diff_json(const Json& left, const Json& right, const std::string& path,
               std::vector<std::string>& out) {
  // Signed and unsigned storage of the same integer serialize identically,
  // so only the value matters; any other type change is a difference.
  if (left.is_number_integer() && right.is_number_integer()) {
    if (left != right)
      out.push_back(path + ": " + brief(left) + " != " + brief(right));
    return;
  }
  if (left.type() != right.type()) {
    out.push_back(path + ": " + brief(left) + " != " + brief(right));
    return;
  }
  if (left.is_object()) {
    auto l = left.begin();
    auto r = right.begin();
    while (l != left.end() || r != right.end()) {
      if (r == right.end() || (l != left.end() && l.key() < r.key())) {
        out.push_back(path + "/" + l.key() + ": only in first");
        ++l;
      } else if (l == left.end() || r.key() < l.key()) {
        out.push_back(path + "/" + r.key() + ": only in second");
        ++r;
      } else {
        diff_json(l.value(), r.value(), path + "/" + l.key(), out);
        ++l;
        ++r;
      }
    }
    return;
  }
  if (left.is_array()) {
    std::size_t common = std::min(left.size(), right.size());
    for (std::size_t i = 0; i < common; ++i)
      diff_json(left[i], right[i], path + "/" + std::to_string(i), out);
    for (std::size_t i = common; i < left.size(); ++i)
      out.push_back(path + "/" + std::to_string(i) + ": only in first");
    for (std::size_t i = common; i < right.size(); ++i)
      out.push_back(path + "/" + std::to_string(i) + ": only in second");
    return;
  }
  if (left != right)
    out.push_back(path + ": " + brief(left) + " != " + brief(right));
}

}  // namespace

std::vector<std::string> diff(const Playbook& left, const Playbook& right) {
  std::vector<std::string> out;
  diff_json(to_json(left), to_json(right), "", out);
  return out;
}

}  // namespace cacaobpmn::cacao
