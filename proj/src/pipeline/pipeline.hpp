#pragma once

#include "config.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

namespace nlsdist {

struct CommandOptions {
    std::string config_path; // empty: built-in defaults
    std::string out_dir = "out";
    std::string filter;
    bool strict = false;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::string command_line; // recorded in the manifest
    std::function<void(const std::string&)> log;
};

// scatter | basis | evolve | asymptotics | verify
// Throws Error on failure; outputs written before a hypothesis or verification failure are kept.
void run_command(const std::string& name, const CommandOptions& opt);

// 0 success, 1 invalid input / io / convergence, 2 strict hypothesis failure, 3 verification failed
int exit_code_for(ErrorKind kind);

json hypothesis_json(const HypothesisReport& h);
json genericity_json(const GenericityReport& g);

// checks every output listed in a manifest against its recorded hash; returns the mismatching paths
std::vector<std::string> check_manifest(const std::string& out_dir);

} // namespace nlsdist
