#pragma once

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <string>

#include "prodsynth/corpus.hpp"

namespace testutil {

// Scratch directory removed on scope exit.
class TempDir {
public:
    TempDir() {
        static std::atomic<unsigned> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("prodsynth-test-" + std::to_string(::getpid()) + "-" +
                 std::to_string(counter.fetch_add(1)));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

    std::filesystem::path write_file(const std::string& name, const std::string& content) const {
        auto file = path_ / name;
        std::filesystem::create_directories(file.parent_path());
        std::ofstream out(file, std::ios::binary);
        out << content;
        return file;
    }

private:
    std::filesystem::path path_;
};

inline std::filesystem::path fixture_dir() {
    return std::filesystem::path(PRODSYNTH_FIXTURE_DIR);
}

inline std::filesystem::path fixture_path(const std::string& rel) { return fixture_dir() / rel; }

inline prodsynth::corpus::Corpus load_fixture_corpus(const std::string& name) {
    auto catalog = prodsynth::corpus::load_catalog(fixture_path(name + "/catalog.jsonl"), true);
    auto offers = prodsynth::corpus::load_offers(fixture_path(name + "/offers.jsonl"), true);
    prodsynth::corpus::Corpus corpus(std::move(catalog), std::move(offers));
    auto matches =
        prodsynth::corpus::load_matches(fixture_path(name + "/matches.jsonl"), corpus, true);
    corpus.set_matches(std::move(matches));
    return corpus;
}

}  // namespace testutil
