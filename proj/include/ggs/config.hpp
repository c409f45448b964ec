#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "ggs/engine.hpp"

namespace ggs {

struct ConfigError : std::invalid_argument {
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

// Line-oriented "key = value" format with '#' comments. Keys: kappa1,
// rate_ratio, window, epsilon, trials, seed, mode, target, max_retries,
// sign_rule, realign_first. Unknown keys and out-of-range values are
// rejected. Missing keys take the documented defaults.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig parse_config_file(const std::string& path);

// Applies one "key=value" override on top of an existing config.
void apply_override(ExperimentConfig& config, std::string_view assignment);

// Canonical text form; parse_config(serialize_config(c)) == c.
std::string serialize_config(const ExperimentConfig& config);

std::string mode_name(Mode mode);
std::string sign_rule_name(SignRule rule);
std::string target_name(const Target& target);

} // namespace ggs
