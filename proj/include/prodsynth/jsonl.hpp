#pragma once

#include <filesystem>
#include <functional>
#include <string>

#include <json.hpp>

namespace prodsynth::jsonl {

using json = nlohmann::ordered_json;

// Visit every non-blank line of a JSONL file. The handler receives the parsed
// object and the 1-based line number. Parse failures go to on_bad_line; return
// false from it to abort the scan.
void for_each_record(const std::filesystem::path& path,
                     const std::function<void(const json&, std::size_t)>& handler,
                     const std::function<bool(const std::string&, std::size_t)>& on_bad_line);

class Writer {
public:
    explicit Writer(const std::filesystem::path& path);
    ~Writer();
    Writer(const Writer&) = delete;
    Writer& operator=(const Writer&) = delete;

    void write(const json& record);
    void close();

private:
    struct Impl;
    Impl* impl_;
};

std::string get_string(const json& j, const char* key, bool required);

}  // namespace prodsynth::jsonl
