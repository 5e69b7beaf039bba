#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "prodsynth/jsonl.hpp"

namespace prodsynth::cli {

struct RunConfig {
    std::filesystem::path catalog;
    std::filesystem::path offers;
    std::filesystem::path matches;
    std::filesystem::path pages;  // stored-page directory with page_index.jsonl
    std::filesystem::path out = "out";
    double theta = 0.5;
    bool unrestricted = false;  // classifier features over all offers/products
    bool strict = false;        // loaders reject instead of skip
    std::uint64_t seed = 42;
};

jsonl::json run_config_to_json(const RunConfig& config);
RunConfig run_config_from_json(const jsonl::json& j);
RunConfig load_run_config(const std::filesystem::path& path);

// Each command validates its inputs, writes its artifacts plus a
// <command>-report.json under config.out, and throws on failure.
void cmd_extract(const RunConfig& config);
void cmd_learn(const RunConfig& config);
void cmd_synthesize(const RunConfig& config);
void cmd_generate(const RunConfig& config);
void cmd_eval(const RunConfig& config, const std::vector<std::string>& methods);

// Argument-vector front end (no program name). Errors print to err and map
// to the exit code: 0 success, 2 bad input, 3 degenerate data.
int run_cli(const std::vector<std::string>& args, std::ostream& err);

}  // namespace prodsynth::cli
