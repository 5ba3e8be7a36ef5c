#include "ddegrowth/config.hpp"

#include "ddegrowth/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>

namespace ddegrowth {

namespace {

std::string_view trim(std::string_view s) {
    const auto is_space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
    while (!s.empty() && is_space(s.front())) {
        s.remove_prefix(1);
    }
    while (!s.empty() && is_space(s.back())) {
        s.remove_suffix(1);
    }
    return s;
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

template <class T>
T parse_as(std::string_view text, const std::string& where, std::string_view key) {
    T v{};
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc{} || ptr != end) {
        throw ConfigError(where + ": " + std::string(key) + ": cannot read '" + std::string(text) + "' as a number");
    }
    return v;
}

std::vector<std::int64_t> parse_int_list(std::string_view text, const std::string& where) {
    std::vector<std::int64_t> out;
    while (true) {
        const auto comma = text.find(',');
        const std::string_view item = trim(text.substr(0, comma));
        out.push_back(parse_as<std::int64_t>(item, where, "N"));
        if (comma == std::string_view::npos) {
            break;
        }
        text.remove_prefix(comma + 1);
    }
    return out;
}

}  // namespace

std::optional<Command> parse_command(std::string_view text) {
    const std::string s = lower(trim(text));
    if (s == "simulate") return Command::Simulate;
    if (s == "predict") return Command::Predict;
    if (s == "verify") return Command::Verify;
    if (s == "sweep") return Command::Sweep;
    if (s == "chareq") return Command::Chareq;
    if (s == "envelope") return Command::Envelope;
    return std::nullopt;
}

std::string to_string(Command c) {
    switch (c) {
        case Command::Simulate: return "simulate";
        case Command::Predict: return "predict";
        case Command::Verify: return "verify";
        case Command::Sweep: return "sweep";
        case Command::Chareq: return "chareq";
        case Command::Envelope: return "envelope";
    }
    return "?";
}

void apply_setting(RunConfig& cfg, std::string_view key_in, std::string_view value_in, const std::string& where) {
    const std::string key = lower(trim(key_in));
    const std::string_view value = trim(value_in);
    if (value.empty()) {
        throw ConfigError(where + ": " + key + ": empty value");
    }
    try {
        if (key == "command") {
            cfg.command = parse_command(value);
            if (!cfg.command) {
                throw ConfigError(where + ": unknown command '" + std::string(value) + "'");
            }
        } else if (key == "f") {
            cfg.f = parse_coefficient(value);
        } else if (key == "g") {
            cfg.g = parse_coefficient(value);
        } else if (key == "tau") {
            cfg.tau = parse_as<double>(value, where, key);
        } else if (key == "psi") {
            cfg.psi = parse_history(value);
        } else if (key == "n") {
            cfg.step_ns = parse_int_list(value, where);
        } else if (key == "horizon") {
            cfg.horizon = parse_as<double>(value, where, key);
        } else if (key == "out") {
            cfg.out = std::string(value);
        } else if (key == "tol") {
            cfg.tol = parse_as<double>(value, where, key);
        } else if (key == "c") {
            cfg.C = parse_as<double>(value, where, key);
        } else if (key == "eps") {
            cfg.eps = parse_as<double>(value, where, key);
        } else {
            throw ConfigError(where + ": unknown key '" + key + "'");
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(where + ": " + key + ": " + e.what());
    }
}

RunConfig parse_config(std::istream& in, const std::string& source) {
    RunConfig cfg;
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        std::string_view text = line;
        if (const auto hash = text.find('#'); hash != std::string_view::npos) {
            text = text.substr(0, hash);
        }
        text = trim(text);
        if (text.empty()) {
            continue;
        }
        const std::string where = source + ":" + std::to_string(number);
        const auto eq = text.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError(where + ": expected 'key = value'");
        }
        apply_setting(cfg, text.substr(0, eq), text.substr(eq + 1), where);
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(path + ": cannot open");
    }
    return parse_config(in, path);
}

Scenario to_scenario(const RunConfig& cfg, std::size_t index) {
    if (!cfg.g) {
        throw ConfigError("missing key 'g'");
    }
    if (!cfg.tau) {
        throw ConfigError("missing key 'tau'");
    }
    if (!cfg.horizon) {
        throw ConfigError("missing key 'horizon'");
    }
    if (index >= cfg.step_ns.size()) {
        throw ConfigError("missing key 'N'");
    }
    try {
        return Scenario::make(cfg.f, *cfg.g, *cfg.tau, cfg.psi, cfg.step_ns[index], *cfg.horizon);
    } catch (const DomainError& e) {
        throw ConfigError(std::string("invalid scenario: ") + e.what());
    }
}

}  // namespace ddegrowth
