#pragma once

#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "dbm/verdict.hpp"

namespace dbm {

/// Command echo, configuration, headline verdict and results. No timing, so equal inputs give equal bytes.
struct Report {
    std::string command;
    json args = json::object();
    json config = json::object();
    Verdict verdict;
    json result = json::object();
    std::vector<std::pair<std::string, std::string>> display;  // human-readable results
    std::optional<std::pair<std::string, std::string>> error;  // (type, message)

    void show(std::string key, std::string text) { display.emplace_back(std::move(key), std::move(text)); }

    int exit_code() const { return error ? 2 : (verdict.member ? 0 : 1); }

    json to_json() const {
        json j;
        j["command"] = command;
        j["args"] = args;
        j["config"] = config;
        if (error) {
            j["error"] = {{"type", error->first}, {"message", error->second}};
            return j;
        }
        j["verdict"] = verdict.to_json();
        j["result"] = result;
        return j;
    }

    std::string to_text() const {
        std::ostringstream os;
        os << "command: " << command;
        for (auto it = args.begin(); it != args.end(); ++it) os << " --" << it.key() << " " << (it->is_string() ? it->get<std::string>() : it->dump());
        os << "\n";
        for (auto it = config.begin(); it != config.end(); ++it) os << it.key() << ": " << (it->is_string() ? it->get<std::string>() : it->dump()) << "\n";
        if (error) {
            os << "error (" << error->first << "): " << error->second << "\n";
            return os.str();
        }
        for (const auto& [k, v] : display) os << k << " = " << v << "\n";
        os << verdict.to_text();
        return os.str();
    }
};

}  // namespace dbm
