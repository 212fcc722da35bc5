#pragma once

#include <cctype>
#include <string>
#include <string_view>

#include <fmt/format.h>

namespace qconcept::detail {

// Rewrites every floating-point token of serialized JSON in shortest
// round-trip form. nlohmann's printer round-trips but may emit 17 digits
// for a value that has a 12-digit representation.
inline std::string shortest_floats(std::string_view json) {
  std::string out;
  out.reserve(json.size());
  bool in_string = false;
  for (std::size_t i = 0; i < json.size();) {
    const char c = json[i];
    if (in_string) {
      out += c;
      if (c == '\\' && i + 1 < json.size()) out += json[++i];
      else if (c == '"') in_string = false;
      ++i;
      continue;
    }
    if (c == '"') {
      in_string = true;
      out += c;
      ++i;
      continue;
    }
    if (c == '-' || std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < json.size() && (std::isdigit(static_cast<unsigned char>(json[j])) || json[j] == '-' ||
                                 json[j] == '+' || json[j] == '.' || json[j] == 'e' || json[j] == 'E'))
        ++j;
      const std::string token(json.substr(i, j - i));
      if (token.find_first_of(".eE") == std::string::npos) {
        out += token;
      } else {
        std::string s = fmt::format("{}", std::stod(token));
        if (s.find_first_of(".e") == std::string::npos) s += ".0";
        out += s;
      }
      i = j;
      continue;
    }
    out += c;
    ++i;
  }
  return out;
}

}  // namespace qconcept::detail
