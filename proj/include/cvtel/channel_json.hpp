#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "cvtel/gaussian_core.hpp"

namespace cvtel {

// Malformed textual specification (bad JSON structure, missing or mistyped
// field).  Distinct from ValidationError so callers can map it to a usage
// failure rather than a domain one.
struct SpecFormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ChannelSpec {
  TwoModeCovariance gamma;
  std::optional<ChannelParams> params;  // present for the tmsv_noisy family
  std::string kind;                     // "tmsv_noisy" or "explicit"
};

// Accepts {"kind":"tmsv_noisy","r":...,"b0":...} or
// {"kind":"explicit","gamma":[[...4 rows of 4 numbers...]]}.
ChannelSpec channel_from_json(const std::string& text);

std::string channel_to_json(const ChannelSpec& spec);

// Accepts "coherent", "vacuum", "squeezed:<s>", or a JSON 2x2 matrix.
OneModeCovariance parse_input_covariance(const std::string& text);

}  // namespace cvtel
