#include "ggs/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace ggs {

namespace {

std::string trim(std::string_view s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string_view::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(begin, end - begin + 1));
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double out = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return out;
    } catch (const std::exception&) {
        throw ConfigError("config: bad numeric value for " + key + ": '" + value + "'");
    }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    const double d = parse_double(key, value);
    if (d < 0.0 || d != std::floor(d) || d > 1.8e19) {
        throw ConfigError("config: " + key + " must be a nonnegative integer");
    }
    return static_cast<std::uint64_t>(d);
}

void set_key(ExperimentConfig& config, const std::string& key, const std::string& value) {
    if (key == "kappa1") {
        config.model.kappa1 = parse_double(key, value);
        if (!(config.model.kappa1 > 0.0)) throw ConfigError("config: kappa1 must be positive");
    } else if (key == "rate_ratio") {
        config.model.rate_ratio = parse_double(key, value);
        if (!(config.model.rate_ratio >= 1.0)) {
            throw ConfigError("config: rate_ratio must be >= 1");
        }
    } else if (key == "window") {
        if (value == "inf" || value == "infinity") {
            config.model.window = std::numeric_limits<double>::infinity();
        } else {
            config.model.window = parse_double(key, value);
            if (!(config.model.window > 0.0)) {
                throw ConfigError("config: window must be positive");
            }
        }
    } else if (key == "epsilon") {
        config.policy.epsilon = parse_double(key, value);
        if (!(config.policy.epsilon > 0.0 && config.policy.epsilon < 0.5)) {
            throw ConfigError("config: epsilon must lie in (0, 1/2)");
        }
    } else if (key == "trials") {
        config.trials = parse_u64(key, value);
        if (config.trials < 1) throw ConfigError("config: trials must be >= 1");
    } else if (key == "seed") {
        config.seed = parse_u64(key, value);
    } else if (key == "mode") {
        if (value == "naive") {
            config.policy.mode = Mode::Naive;
        } else if (value == "adaptive") {
            config.policy.mode = Mode::Adaptive;
        } else {
            throw ConfigError("config: mode must be naive or adaptive");
        }
    } else if (key == "target") {
        if (value == "bond") {
            config.target = Target{TargetKind::Bond, 2};
        } else {
            TargetKind kind;
            std::size_t prefix;
            if (value.rfind("ghz(", 0) == 0) {
                kind = TargetKind::Ghz;
                prefix = 4;
            } else if (value.rfind("chain(", 0) == 0) {
                kind = TargetKind::Chain;
                prefix = 6;
            } else {
                throw ConfigError("config: target must be bond, ghz(n) or chain(n)");
            }
            if (value.back() != ')') {
                throw ConfigError("config: malformed target '" + value + "'");
            }
            const std::string inner = value.substr(prefix, value.size() - prefix - 1);
            const std::uint64_t n = parse_u64(key, inner);
            if (n < 2 || n > 1000) throw ConfigError("config: target size must be in [2, 1000]");
            config.target = Target{kind, static_cast<int>(n)};
        }
    } else if (key == "max_retries") {
        const std::uint64_t n = parse_u64(key, value);
        if (n > 1000) throw ConfigError("config: max_retries must be <= 1000");
        config.policy.max_retries = static_cast<int>(n);
    } else if (key == "sign_rule") {
        if (value == "matched") {
            config.policy.sign_rule = SignRule::Matched;
        } else if (value == "fixed+") {
            config.policy.sign_rule = SignRule::FixedPlus;
        } else if (value == "fixed-") {
            config.policy.sign_rule = SignRule::FixedMinus;
        } else {
            throw ConfigError("config: sign_rule must be matched, fixed+ or fixed-");
        }
    } else if (key == "realign_first") {
        if (value == "true" || value == "1") {
            config.policy.realign_first = true;
        } else if (value == "false" || value == "0") {
            config.policy.realign_first = false;
        } else {
            throw ConfigError("config: realign_first must be true or false");
        }
    } else {
        throw ConfigError("config: unknown key '" + key + "'");
    }
}

} // namespace

void apply_override(ExperimentConfig& config, std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos) {
        throw ConfigError("config: override must look like key=value, got '" +
                          std::string(assignment) + "'");
    }
    const std::string key = trim(assignment.substr(0, eq));
    const std::string value = trim(assignment.substr(eq + 1));
    if (key.empty() || value.empty()) {
        throw ConfigError("config: empty key or value in override");
    }
    set_key(config, key, value);
}

ExperimentConfig parse_config(std::string_view text) {
    ExperimentConfig config;
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;
        try {
            apply_override(config, stripped);
        } catch (const ConfigError& e) {
            throw ConfigError(std::string(e.what()) + " (line " + std::to_string(line_no) + ")");
        }
    }
    validate(config);
    return config;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string mode_name(Mode mode) {
    return mode == Mode::Naive ? "naive" : "adaptive";
}

std::string sign_rule_name(SignRule rule) {
    switch (rule) {
        case SignRule::Matched: return "matched";
        case SignRule::FixedPlus: return "fixed+";
        case SignRule::FixedMinus: return "fixed-";
    }
    return "matched";
}

std::string target_name(const Target& target) {
    switch (target.kind) {
        case TargetKind::Bond: return "bond";
        case TargetKind::Ghz: return "ghz(" + std::to_string(target.size) + ")";
        case TargetKind::Chain: return "chain(" + std::to_string(target.size) + ")";
    }
    return "bond";
}

std::string serialize_config(const ExperimentConfig& config) {
    char buf[64];
    std::ostringstream out;
    const auto num = [&buf](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    out << "kappa1 = " << num(config.model.kappa1) << "\n";
    out << "rate_ratio = " << num(config.model.rate_ratio) << "\n";
    out << "window = "
        << (std::isinf(config.model.window) ? "inf" : num(config.model.window)) << "\n";
    out << "epsilon = " << num(config.policy.epsilon) << "\n";
    out << "trials = " << config.trials << "\n";
    out << "seed = " << config.seed << "\n";
    out << "mode = " << mode_name(config.policy.mode) << "\n";
    out << "target = " << target_name(config.target) << "\n";
    out << "max_retries = " << config.policy.max_retries << "\n";
    out << "sign_rule = " << sign_rule_name(config.policy.sign_rule) << "\n";
    out << "realign_first = " << (config.policy.realign_first ? "true" : "false") << "\n";
    return out.str();
}

} // namespace ggs
