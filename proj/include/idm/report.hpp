#pragma once

// Canonical JSON rendering for run reports: insertion-ordered keys, two-space
// indentation, floats with 17 significant digits, non-finite floats as null.
// Parsing a rendered report and rendering it again reproduces it byte for byte.

#include <cmath>
#include <cstdio>
#include <string>

#include <json.hpp>

#include "idm/core.hpp"

namespace idm::report {

using Json = nlohmann::ordered_json;

namespace detail {

inline void indent(std::string& out, int depth) { out.append(static_cast<std::size_t>(depth) * 2, ' '); }

inline void render(const Json& j, std::string& out, int depth) {
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) out += ",\n";
        first = false;
        indent(out, depth + 1);
        out += Json(key).dump();
        out += ": ";
        render(value, out, depth + 1);
      }
      out += "\n";
      indent(out, depth);
      out += "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // arrays of scalars stay on one line
      bool flat = true;
      for (const auto& v : j) flat = flat && !v.is_structured();
      if (flat) {
        out += "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) out += ", ";
          render(j[i], out, depth);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        indent(out, depth + 1);
        render(j[i], out, depth + 1);
      }
      out += "\n";
      indent(out, depth);
      out += "]";
      return;
    }
    case Json::value_t::number_float: {
      const double x = j.get<double>();
      if (!std::isfinite(x)) {
        out += "null";
        return;
      }
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", x);
      out += buf;
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace detail

inline std::string dump_canonical(const Json& j) {
  std::string out;
  detail::render(j, out, 0);
  out += "\n";
  return out;
}

inline Json interval_json(const std::string& name, const Interval& iv) {
  Json j;
  j["name"] = name;
  j["kind"] = to_string(iv.kind);
  j["lower"] = iv.lower;
  j["upper"] = iv.upper;
  return j;
}

}  // namespace idm::report
