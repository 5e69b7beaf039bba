#include "prodsynth/jsonl.hpp"

#include <fstream>

#include "prodsynth/errors.hpp"
#include "prodsynth/text.hpp"

namespace prodsynth::jsonl {

void for_each_record(const std::filesystem::path& path,
                     const std::function<void(const json&, std::size_t)>& handler,
                     const std::function<bool(const std::string&, std::size_t)>& on_bad_line) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path.string());
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        json record = json::parse(line, nullptr, false);
        if (record.is_discarded() || !record.is_object()) {
            if (!on_bad_line("not a JSON object", line_no)) return;
            continue;
        }
        handler(record, line_no);
    }
}

struct Writer::Impl {
    std::ofstream out;
    std::filesystem::path path;
};

Writer::Writer(const std::filesystem::path& path) : impl_(new Impl) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    impl_->out.open(path, std::ios::binary);
    impl_->path = path;
    if (!impl_->out) {
        delete impl_;
        throw ValidationError("cannot write " + path.string());
    }
}

Writer::~Writer() { delete impl_; }

void Writer::write(const json& record) {
    impl_->out << record.dump() << '\n';
    if (!impl_->out) throw ValidationError("write failed for " + impl_->path.string());
}

void Writer::close() { impl_->out.close(); }

std::string get_string(const json& j, const char* key, bool required) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) {
        if (required) throw ValidationError(std::string("missing field \"") + key + "\"");
        return {};
    }
    if (!it->is_string()) throw ValidationError(std::string("field \"") + key + "\" is not a string");
    return it->get<std::string>();
}

}  // namespace prodsynth::jsonl
