#include "evocity/canonical_json.hpp"

#include <cmath>
#include <cstdio>

namespace evocity {

namespace {

void write_value(const Json& v, std::string& out) {
  switch (v.type()) {
    case Json::value_t::object: {
      out.push_back('{');
      bool first = true;
      for (const auto& [key, child] : v.items()) {  // object_t is std::map: sorted
        if (!first) out.push_back(',');
        first = false;
        out += Json(key).dump(-1, ' ', false, Json::error_handler_t::replace);
        out.push_back(':');
        write_value(child, out);
      }
      out.push_back('}');
      break;
    }
    case Json::value_t::array: {
      out.push_back('[');
      bool first = true;
      for (const auto& child : v) {
        if (!first) out.push_back(',');
        first = false;
        write_value(child, out);
      }
      out.push_back(']');
      break;
    }
    case Json::value_t::number_float: {
      double d = round3(v.get<double>());
      if (!std::isfinite(d)) d = 0.0;
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.3f", d);
      out += buf;
      break;
    }
    case Json::value_t::string:
      out += v.dump(-1, ' ', false, Json::error_handler_t::replace);
      break;
    default:
      out += v.dump();
      break;
  }
}

}  // namespace

double round3(double value) {
  double r = std::round(value * 1000.0) / 1000.0;
  return r == 0.0 ? 0.0 : r;
}

std::string canonical_dump(const Json& value) {
  std::string out;
  write_value(value, out);
  return out;
}

}  // namespace evocity
