#pragma once

// Run configuration, loadable from a JSON file named by MERGEWEAVE_CONFIG.

#include <cstdlib>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>

#include <json.hpp>

#include "mergeweave/align.hpp"
#include "mergeweave/labels.hpp"

namespace mergeweave {

inline constexpr const char* kConfigEnvVar = "MERGEWEAVE_CONFIG";

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Config {
    std::size_t context_budget = kDefaultContextBudget;
    std::size_t K = 3;
    std::size_t M = 5;
    double tau = 0.0;
    std::string classifier = "heuristic";  // heuristic | oracle | abstain | fixed:N | cmd:... | tcp:host:port
    std::string language = "auto";
    std::uint64_t seed = 1;
    std::size_t workers = std::max(1u, std::thread::hardware_concurrency());

    void validate() const {
        if (K < 1 || K > kNumLabels) throw ConfigError("K must be in [1, 9]");
        if (M < 1) throw ConfigError("M must be >= 1");
        if (!(tau >= 0.0 && tau <= 1.0)) throw ConfigError("tau must be in [0, 1]");
        if (workers < 1) throw ConfigError("workers must be >= 1");
        if (classifier.empty()) throw ConfigError("classifier must be set");
    }
};

/// Overlays the keys present in `j` onto `cfg`. Unknown keys are an error.
inline void apply_config_json(Config& cfg, const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& [key, v] : j.items()) {
        try {
            if (key == "context_budget")
                cfg.context_budget = v.get<std::size_t>();
            else if (key == "K")
                cfg.K = v.get<std::size_t>();
            else if (key == "M")
                cfg.M = v.get<std::size_t>();
            else if (key == "tau")
                cfg.tau = v.get<double>();
            else if (key == "classifier")
                cfg.classifier = v.get<std::string>();
            else if (key == "language")
                cfg.language = v.get<std::string>();
            else if (key == "seed")
                cfg.seed = v.get<std::uint64_t>();
            else if (key == "workers")
                cfg.workers = v.get<std::size_t>();
            else
                throw ConfigError("unknown config key '" + key + "'");
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("config key '" + key + "': " + e.what());
        }
    }
}

inline Config load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path);
    auto j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ConfigError("config " + path + " is not valid JSON");
    Config cfg;
    apply_config_json(cfg, j);
    cfg.validate();
    return cfg;
}

/// Defaults, overlaid with the file named by MERGEWEAVE_CONFIG when set.
inline Config load_config_from_env() {
    if (const char* p = std::getenv(kConfigEnvVar); p && *p) return load_config_file(p);
    return Config{};
}

inline nlohmann::ordered_json to_json(const Config& c) {
    nlohmann::ordered_json j;
    j["context_budget"] = c.context_budget;
    j["K"] = c.K;
    j["M"] = c.M;
    j["tau"] = c.tau;
    j["classifier"] = c.classifier;
    j["language"] = c.language;
    j["seed"] = c.seed;
    j["workers"] = c.workers;
    return j;
}

}  // namespace mergeweave
