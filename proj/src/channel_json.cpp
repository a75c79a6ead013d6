#include "cvtel/channel_json.hpp"

#include <json.hpp>

#include <cstdlib>

namespace cvtel {

namespace {

using nlohmann::json;

double number_field(const json& j, const char* name) {
  if (!j.contains(name) || !j[name].is_number()) {
    throw SpecFormatError(std::string("channel spec field '") + name + "' must be a number");
  }
  return j[name].get<double>();
}

Mat4 matrix4_field(const json& j, const char* name) {
  if (!j.contains(name) || !j[name].is_array() || j[name].size() != 4) {
    throw SpecFormatError(std::string("channel spec field '") + name +
                          "' must be an array of 4 rows");
  }
  Mat4 m;
  for (int row = 0; row < 4; ++row) {
    const json& jrow = j[name][row];
    if (!jrow.is_array() || jrow.size() != 4) {
      throw SpecFormatError(std::string("channel spec field '") + name + "' row " +
                            std::to_string(row) + " must hold 4 numbers");
    }
    for (int col = 0; col < 4; ++col) {
      if (!jrow[col].is_number()) {
        throw SpecFormatError(std::string("channel spec field '") + name + "' entry (" +
                              std::to_string(row) + "," + std::to_string(col) +
                              ") must be a number");
      }
      m(row, col) = jrow[col].get<double>();
    }
  }
  return m;
}

json matrix_to_json(const Mat4& m) {
  json rows = json::array();
  for (int row = 0; row < 4; ++row) {
    json r = json::array();
    for (int col = 0; col < 4; ++col) r.push_back(m(row, col));
    rows.push_back(r);
  }
  return rows;
}

}  // namespace

ChannelSpec channel_from_json(const std::string& text) {
  const json j = json::parse(text);  // propagates parse_error with byte position
  if (!j.is_object()) throw SpecFormatError("channel spec must be a JSON object");
  if (!j.contains("kind") || !j["kind"].is_string()) {
    throw SpecFormatError("channel spec needs a string field 'kind'");
  }
  ChannelSpec spec;
  spec.kind = j["kind"].get<std::string>();
  if (spec.kind == "tmsv_noisy") {
    ChannelParams params;
    params.r = number_field(j, "r");
    params.b0 = number_field(j, "b0");
    spec.params = params;
    spec.gamma = make_tmsv_noisy(params);
  } else if (spec.kind == "explicit") {
    spec.gamma.m = matrix4_field(j, "gamma");
  } else {
    throw SpecFormatError("unknown channel kind '" + spec.kind +
                          "' (expected tmsv_noisy or explicit)");
  }
  return spec;
}

std::string channel_to_json(const ChannelSpec& spec) {
  json j;
  if (spec.kind == "tmsv_noisy" && spec.params) {
    j["kind"] = "tmsv_noisy";
    j["r"] = spec.params->r;
    j["b0"] = spec.params->b0;
  } else {
    j["kind"] = "explicit";
    j["gamma"] = matrix_to_json(spec.gamma.m);
  }
  return j.dump();
}

OneModeCovariance parse_input_covariance(const std::string& text) {
  if (text == "coherent") return OneModeCovariance::coherent();
  if (text == "vacuum") return OneModeCovariance::vacuum();
  if (text.rfind("squeezed:", 0) == 0) {
    const std::string arg = text.substr(9);
    char* end = nullptr;
    const double s = std::strtod(arg.c_str(), &end);
    if (arg.empty() || end != arg.c_str() + arg.size()) {
      throw SpecFormatError("squeezed input takes a numeric parameter, e.g. squeezed:0.3");
    }
    return OneModeCovariance::squeezed(s);
  }
  if (!text.empty() && (text[0] == '[' || text[0] == '{')) {
    const json j = json::parse(text);
    if (!j.is_array() || j.size() != 2) {
      throw SpecFormatError("input covariance must be a JSON 2x2 matrix");
    }
    OneModeCovariance d;
    for (int row = 0; row < 2; ++row) {
      const json& jrow = j[row];
      if (!jrow.is_array() || jrow.size() != 2) {
        throw SpecFormatError("input covariance must be a JSON 2x2 matrix");
      }
      for (int col = 0; col < 2; ++col) {
        if (!jrow[col].is_number()) {
          throw SpecFormatError("input covariance entries must be numbers");
        }
        d.m(row, col) = jrow[col].get<double>();
      }
    }
    return d;
  }
  throw SpecFormatError("unrecognized input state '" + text +
                        "' (expected coherent, vacuum, squeezed:<s>, or a 2x2 JSON matrix)");
}

}  // namespace cvtel
