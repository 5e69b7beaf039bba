#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "prodsynth/corpus.hpp"

namespace prodsynth::extract {

// Attribute-value pairs harvested from one stored page.
struct RawSpecification {
    std::string offer_id;
    corpus::Spec pairs;
    std::string source;  // page locator, for audit trails
};

// Harvest every two-cell table row of the document: first cell is the
// attribute name (whitespace collapsed, one trailing ':' stripped), second
// cell the value (whitespace collapsed). Rows whose cells contain nested
// tables do not count as two-cell rows. Pairs come out in document order;
// rows of inner tables are reported once, under the innermost table.
RawSpecification extract_pairs(std::string_view markup, const std::string& offer_id,
                               const std::string& source = "");

// Stable file name for a stored page: 64-bit FNV-1a of the locator, hex.
std::string page_file_name(std::string_view locator);

// One line of page_index.jsonl: which stored file belongs to which offer.
struct PageIndexEntry {
    std::string offer_id;
    std::string file;
};

std::vector<PageIndexEntry> load_page_index(const std::filesystem::path& page_store,
                                            corpus::LoadStats* stats = nullptr);
void write_page_index(const std::filesystem::path& page_store,
                      const std::vector<PageIndexEntry>& entries);

// Append page-harvested pairs to each offer's feed spec (feed pairs first).
// Offers without an indexed or readable page pass through unchanged, counted
// as warnings in stats.
std::vector<corpus::Offer> enrich_offers(const std::vector<corpus::Offer>& offers,
                                         const std::filesystem::path& page_store,
                                         corpus::LoadStats* stats = nullptr);

}  // namespace prodsynth::extract
