#include "prodsynth/extract.hpp"

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>

#include "prodsynth/html.hpp"
#include "prodsynth/jsonl.hpp"
#include "prodsynth/text.hpp"

namespace prodsynth::extract {

namespace {

bool subtree_contains_table(const html::Node& node) {
    for (const auto& child : node.children) {
        if (!child.is_text && child.tag == "table") return true;
        if (subtree_contains_table(child)) return true;
    }
    return false;
}

std::string cell_text(const html::Node& cell) { return text::collapse_ws(html::text_content(cell)); }

void harvest_row(const html::Node& row, corpus::Spec& pairs) {
    std::vector<const html::Node*> cells;
    bool tainted_cell = false;
    for (const auto& child : row.children) {
        if (child.is_text) continue;
        if (child.tag != "td" && child.tag != "th") continue;
        if (subtree_contains_table(child)) {
            tainted_cell = true;
            continue;
        }
        cells.push_back(&child);
    }
    if (tainted_cell || cells.size() != 2) return;

    std::string name = cell_text(*cells[0]);
    if (!name.empty() && name.back() == ':') name.pop_back();
    name = text::collapse_ws(name);
    if (name.empty()) return;
    pairs.emplace_back(std::move(name), cell_text(*cells[1]));
}

// Pre-order walk; each row is harvested where it appears, so pairs come out
// in document order even when spec tables nest inside layout tables. The
// in_table flag resets inside a row so that only rows owned by a table count.
void walk_tables(const html::Node& node, bool in_table, corpus::Spec& pairs) {
    for (const auto& child : node.children) {
        if (child.is_text) continue;
        if (child.tag == "table") {
            walk_tables(child, true, pairs);
        } else if (child.tag == "tr" && in_table) {
            harvest_row(child, pairs);
            walk_tables(child, false, pairs);
        } else {
            walk_tables(child, in_table, pairs);
        }
    }
}

}  // namespace

RawSpecification extract_pairs(std::string_view markup, const std::string& offer_id,
                               const std::string& source) {
    RawSpecification spec;
    spec.offer_id = offer_id;
    spec.source = source;
    html::Node document = html::parse(markup);
    walk_tables(document, false, spec.pairs);
    return spec;
}

std::string page_file_name(std::string_view locator) {
    std::uint64_t hash = 1469598103934665603ULL;
    for (unsigned char c : locator) {
        hash ^= c;
        hash *= 1099511628211ULL;
    }
    std::ostringstream out;
    out << std::hex << hash;
    return out.str() + ".html";
}

std::vector<PageIndexEntry> load_page_index(const std::filesystem::path& page_store,
                                            corpus::LoadStats* stats) {
    std::vector<PageIndexEntry> entries;
    const auto path = page_store / "page_index.jsonl";
    if (!std::filesystem::exists(path)) {
        if (stats) stats->warn("page_index.jsonl not found in " + page_store.string());
        return entries;
    }
    jsonl::for_each_record(
        path,
        [&](const jsonl::json& j, std::size_t) {
            if (stats) ++stats->records_read;
            PageIndexEntry entry;
            entry.offer_id = jsonl::get_string(j, "offer", true);
            entry.file = jsonl::get_string(j, "file", true);
            entries.push_back(std::move(entry));
            if (stats) ++stats->accepted;
        },
        [&](const std::string& why, std::size_t line_no) {
            if (stats) stats->warn("page_index.jsonl line " + std::to_string(line_no) + ": " + why);
            return true;
        });
    return entries;
}

void write_page_index(const std::filesystem::path& page_store,
                      const std::vector<PageIndexEntry>& entries) {
    jsonl::Writer out(page_store / "page_index.jsonl");
    for (const auto& entry : entries) {
        jsonl::json j;
        j["offer"] = entry.offer_id;
        j["file"] = entry.file;
        out.write(j);
    }
}

std::vector<corpus::Offer> enrich_offers(const std::vector<corpus::Offer>& offers,
                                         const std::filesystem::path& page_store,
                                         corpus::LoadStats* stats) {
    std::map<std::string, std::string> file_by_offer;
    for (const auto& entry : load_page_index(page_store, stats)) {
        if (!file_by_offer.emplace(entry.offer_id, entry.file).second && stats)
            stats->warn("page_index.jsonl maps offer \"" + entry.offer_id + "\" twice");
    }

    std::vector<corpus::Offer> enriched;
    enriched.reserve(offers.size());
    for (const auto& offer : offers) {
        enriched.push_back(offer);
        auto it = file_by_offer.find(offer.offer_id);
        if (it == file_by_offer.end()) continue;

        const auto page_path = page_store / it->second;
        std::ifstream in(page_path, std::ios::binary);
        if (!in) {
            if (stats) stats->warn("page file missing for offer \"" + offer.offer_id + "\": " +
                                   page_path.string());
            continue;
        }
        std::ostringstream buffer;
        buffer << in.rdbuf();
        auto raw = extract_pairs(buffer.str(), offer.offer_id, it->second);
        auto& spec = enriched.back().spec;
        spec.insert(spec.end(), raw.pairs.begin(), raw.pairs.end());
    }
    return enriched;
}

}  // namespace prodsynth::extract
