#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace polarity {

/// Direct model: drift from the traces c(-1) - c(1). Exchange model: drift from boundary-bound masses.
enum class Model { direct, exchange };

inline std::string_view to_string(Model m) { return m == Model::direct ? "direct" : "exchange"; }

inline Model parse_model(std::string_view s) {
    if (s == "direct") return Model::direct;
    if (s == "exchange") return Model::exchange;
    throw std::invalid_argument("unknown model '" + std::string(s) + "' (expected direct|exchange)");
}

}  // namespace polarity
