#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "prodsynth/jsonl.hpp"

namespace prodsynth::corpus {

using AttrValue = std::pair<std::string, std::string>;
using Spec = std::vector<AttrValue>;

// Attribute names valid for one taxonomy category, plus the ordered list of
// attributes usable as product keys.
struct CatalogSchema {
    std::string category;
    std::vector<std::string> attributes;
    std::vector<std::string> key_attributes;
};

struct Product {
    std::string product_id;
    std::string category;
    Spec spec;
};

struct Offer {
    std::string offer_id;
    std::string merchant;
    std::string category;
    std::string title;
    std::optional<std::string> price;     // opaque decimal string, never parsed
    std::optional<std::string> currency;
    std::optional<std::string> url;
    std::optional<std::string> image_url;
    Spec spec;                            // may be empty until extraction runs
};

// A historical offer-to-product association.
struct MatchRecord {
    std::string offer_id;
    std::string product_id;
};

struct Catalog {
    std::vector<CatalogSchema> schemas;
    std::vector<Product> products;
};

struct LoadStats {
    std::size_t records_read = 0;
    std::size_t accepted = 0;
    std::size_t skipped = 0;
    std::vector<std::string> warnings;

    void warn(std::string msg) {
        ++skipped;
        warnings.push_back(std::move(msg));
    }
};

Catalog load_catalog(const std::filesystem::path& path, bool strict = false,
                     LoadStats* stats = nullptr);
std::vector<Offer> load_offers(const std::filesystem::path& path, bool strict = false,
                               LoadStats* stats = nullptr);

void write_catalog(const std::filesystem::path& path, const Catalog& catalog);
void write_offers(const std::filesystem::path& path, const std::vector<Offer>& offers);
void write_matches(const std::filesystem::path& path, const std::vector<MatchRecord>& matches);

jsonl::json offer_to_json(const Offer& offer);
Offer offer_from_json(const jsonl::json& j);

// Immutable view over one loaded data set: catalog, offers, and matches, with
// the lookup indexes the rest of the pipeline relies on. Safe for concurrent
// reads once fully constructed.
class Corpus {
public:
    Corpus(Catalog catalog, std::vector<Offer> offers);

    // Attach validated match records. Callable once.
    void set_matches(std::vector<MatchRecord> matches);

    const std::vector<CatalogSchema>& schemas() const { return catalog_.schemas; }
    const std::vector<Product>& products() const { return catalog_.products; }
    const std::vector<Offer>& offers() const { return offers_; }
    const std::vector<MatchRecord>& matches() const { return matches_; }

    const CatalogSchema* schema(const std::string& category) const;
    const Product* product(const std::string& product_id) const;
    const Offer* offer(const std::string& offer_id) const;

    // O(1): product matched by this offer, or nullptr.
    const Product* matched_product(const std::string& offer_id) const;
    bool offer_is_matched(const std::string& offer_id) const;
    // O(1) bucket lookup: offers matched to this product.
    std::vector<const Offer*> matching_offers(const std::string& product_id) const;

    const std::vector<std::size_t>& product_indices_by_category(const std::string& category) const;
    const std::vector<std::size_t>& offer_indices_by_category(const std::string& category) const;
    const std::vector<std::size_t>& offer_indices_by_merchant(const std::string& merchant) const;
    const std::vector<std::size_t>& offer_indices_by_merchant_category(
        const std::string& merchant, const std::string& category) const;

    const Product& product_at(std::size_t i) const { return catalog_.products[i]; }
    const Offer& offer_at(std::size_t i) const { return offers_[i]; }

    // Sorted list of (merchant, category) pairs that have at least one match.
    std::vector<std::pair<std::string, std::string>> matched_merchant_categories() const;

private:
    Catalog catalog_;
    std::vector<Offer> offers_;
    std::vector<MatchRecord> matches_;

    std::map<std::string, std::size_t> schema_by_category_;
    std::unordered_map<std::string, std::size_t> product_by_id_;
    std::unordered_map<std::string, std::size_t> offer_by_id_;
    std::unordered_map<std::string, std::size_t> match_by_offer_;  // offer_id -> product index
    std::unordered_map<std::string, std::vector<std::size_t>> offers_by_product_;

    std::map<std::string, std::vector<std::size_t>> products_by_category_;
    std::map<std::string, std::vector<std::size_t>> offers_by_category_;
    std::map<std::string, std::vector<std::size_t>> offers_by_merchant_;
    std::map<std::pair<std::string, std::string>, std::vector<std::size_t>> offers_by_mc_;
};

std::vector<MatchRecord> load_matches(const std::filesystem::path& path, const Corpus& corpus,
                                      bool strict = false, LoadStats* stats = nullptr);

}  // namespace prodsynth::corpus
