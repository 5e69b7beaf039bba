#include "prodsynth/corpus.hpp"

#include <set>
#include <unordered_set>

#include "prodsynth/errors.hpp"
#include "prodsynth/text.hpp"

namespace prodsynth::corpus {

namespace {

using jsonl::json;

const std::vector<std::string> kDefaultKeyAttributes = {"Model Part Number", "UPC"};

Spec spec_from_json(const json& j, const char* key) {
    Spec spec;
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return spec;
    if (!it->is_array()) throw ValidationError("\"spec\" is not an array");
    for (const auto& pair : *it) {
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_string() || !pair[1].is_string())
            throw ValidationError("spec entry is not a [name, value] pair");
        std::string name = pair[0].get<std::string>();
        if (text::trim(name).empty()) throw ValidationError("spec entry has an empty attribute name");
        spec.emplace_back(std::move(name), pair[1].get<std::string>());
    }
    return spec;
}

json spec_to_json(const Spec& spec) {
    json arr = json::array();
    for (const auto& [name, value] : spec) arr.push_back(json::array({name, value}));
    return arr;
}

// Shared skip-or-abort policy for malformed records.
struct RecordSink {
    bool strict;
    LoadStats* stats;
    std::string file;

    // Returns true when loading should continue with the next line.
    bool reject(const std::string& why, std::size_t line_no) {
        std::string msg = file + ":" + std::to_string(line_no) + ": " + why;
        if (strict) throw ValidationError(msg);
        if (stats) stats->warn(msg);
        return true;
    }
};

}  // namespace

Catalog load_catalog(const std::filesystem::path& path, bool strict, LoadStats* stats) {
    Catalog catalog;
    RecordSink sink{strict, stats, path.filename().string()};

    jsonl::for_each_record(
        path,
        [&](const json& record, std::size_t line_no) {
            if (stats) ++stats->records_read;
            try {
                std::string kind = jsonl::get_string(record, "kind", true);
                if (kind == "schema") {
                    CatalogSchema schema;
                    schema.category = jsonl::get_string(record, "category", true);
                    if (text::trim(schema.category).empty())
                        throw ValidationError("schema with empty category");
                    if (!record.contains("attributes") || !record["attributes"].is_array())
                        throw ValidationError("schema without attributes array");
                    for (const auto& a : record["attributes"]) {
                        if (!a.is_string()) throw ValidationError("attribute name is not a string");
                        schema.attributes.push_back(a.get<std::string>());
                    }
                    if (record.contains("keys") && record["keys"].is_array()) {
                        for (const auto& k : record["keys"])
                            schema.key_attributes.push_back(k.get<std::string>());
                    } else {
                        for (const auto& k : kDefaultKeyAttributes) {
                            for (const auto& a : schema.attributes)
                                if (a == k) schema.key_attributes.push_back(k);
                        }
                    }
                    catalog.schemas.push_back(std::move(schema));
                } else if (kind == "product") {
                    Product product;
                    product.product_id = jsonl::get_string(record, "id", true);
                    product.category = jsonl::get_string(record, "category", true);
                    product.spec = spec_from_json(record, "spec");
                    if (text::trim(product.product_id).empty())
                        throw ValidationError("product with empty id");
                    catalog.products.push_back(std::move(product));
                } else {
                    throw ValidationError("unknown record kind \"" + kind + "\"");
                }
                if (stats) ++stats->accepted;
            } catch (const ValidationError& e) {
                sink.reject(e.what(), line_no);
            }
        },
        [&](const std::string& why, std::size_t line_no) {
            if (stats) ++stats->records_read;
            return sink.reject(why, line_no);
        });

    // Cross-record validation always aborts: a broken catalog is not feed noise.
    std::map<std::string, const CatalogSchema*> by_category;
    for (const auto& schema : catalog.schemas) {
        if (!by_category.emplace(schema.category, &schema).second)
            throw ValidationError("duplicate schema for category \"" + schema.category + "\"");
        std::set<std::string> seen;
        for (const auto& attr : schema.attributes) {
            if (text::trim(attr).empty())
                throw ValidationError("empty attribute name in schema \"" + schema.category + "\"");
            if (!seen.insert(attr).second)
                throw ValidationError("duplicate attribute \"" + attr + "\" in schema \"" +
                                      schema.category + "\"");
        }
        for (const auto& key : schema.key_attributes) {
            if (!seen.count(key))
                throw ValidationError("key attribute \"" + key + "\" missing from schema \"" +
                                      schema.category + "\"");
        }
    }
    std::unordered_set<std::string> product_ids;
    for (const auto& product : catalog.products) {
        if (!product_ids.insert(product.product_id).second)
            throw ValidationError("duplicate product id \"" + product.product_id + "\"");
        auto it = by_category.find(product.category);
        if (it == by_category.end())
            throw ValidationError("product \"" + product.product_id +
                                  "\" references unknown category \"" + product.category + "\"");
        std::set<std::string> allowed(it->second->attributes.begin(), it->second->attributes.end());
        for (const auto& [name, value] : product.spec) {
            if (!allowed.count(name))
                throw ValidationError("product \"" + product.product_id + "\" uses attribute \"" +
                                      name + "\" not in schema \"" + product.category + "\"");
        }
    }
    return catalog;
}

Offer offer_from_json(const json& j) {
    Offer offer;
    offer.offer_id = jsonl::get_string(j, "id", true);
    offer.merchant = jsonl::get_string(j, "merchant", false);
    offer.category = jsonl::get_string(j, "category", false);
    offer.title = jsonl::get_string(j, "title", false);
    auto opt = [&](const char* key) -> std::optional<std::string> {
        if (!j.contains(key) || j[key].is_null()) return std::nullopt;
        return jsonl::get_string(j, key, false);
    };
    offer.price = opt("price");
    offer.currency = opt("currency");
    offer.url = opt("url");
    offer.image_url = opt("image");
    offer.spec = spec_from_json(j, "spec");
    return offer;
}

json offer_to_json(const Offer& offer) {
    json j;
    j["id"] = offer.offer_id;
    j["merchant"] = offer.merchant;
    j["category"] = offer.category;
    j["title"] = offer.title;
    if (offer.price) j["price"] = *offer.price;
    if (offer.currency) j["currency"] = *offer.currency;
    if (offer.url) j["url"] = *offer.url;
    if (offer.image_url) j["image"] = *offer.image_url;
    j["spec"] = spec_to_json(offer.spec);
    return j;
}

std::vector<Offer> load_offers(const std::filesystem::path& path, bool strict, LoadStats* stats) {
    std::vector<Offer> offers;
    std::unordered_set<std::string> seen_ids;
    RecordSink sink{strict, stats, path.filename().string()};

    jsonl::for_each_record(
        path,
        [&](const json& record, std::size_t line_no) {
            if (stats) ++stats->records_read;
            try {
                Offer offer = offer_from_json(record);
                if (text::trim(offer.offer_id).empty()) throw ValidationError("offer with empty id");
                if (text::trim(offer.merchant).empty())
                    throw ValidationError("offer \"" + offer.offer_id + "\" has no merchant");
                if (text::trim(offer.category).empty())
                    throw ValidationError("offer \"" + offer.offer_id + "\" has no category");
                if (!seen_ids.insert(offer.offer_id).second)
                    throw ValidationError("duplicate offer id \"" + offer.offer_id + "\"");
                offers.push_back(std::move(offer));
                if (stats) ++stats->accepted;
            } catch (const ValidationError& e) {
                sink.reject(e.what(), line_no);
            }
        },
        [&](const std::string& why, std::size_t line_no) {
            if (stats) ++stats->records_read;
            return sink.reject(why, line_no);
        });
    return offers;
}

void write_catalog(const std::filesystem::path& path, const Catalog& catalog) {
    jsonl::Writer out(path);
    for (const auto& schema : catalog.schemas) {
        json j;
        j["kind"] = "schema";
        j["category"] = schema.category;
        j["attributes"] = schema.attributes;
        j["keys"] = schema.key_attributes;
        out.write(j);
    }
    for (const auto& product : catalog.products) {
        json j;
        j["kind"] = "product";
        j["id"] = product.product_id;
        j["category"] = product.category;
        j["spec"] = spec_to_json(product.spec);
        out.write(j);
    }
}

void write_offers(const std::filesystem::path& path, const std::vector<Offer>& offers) {
    jsonl::Writer out(path);
    for (const auto& offer : offers) out.write(offer_to_json(offer));
}

void write_matches(const std::filesystem::path& path, const std::vector<MatchRecord>& matches) {
    jsonl::Writer out(path);
    for (const auto& match : matches) {
        json j;
        j["offer"] = match.offer_id;
        j["product"] = match.product_id;
        out.write(j);
    }
}

Corpus::Corpus(Catalog catalog, std::vector<Offer> offers)
    : catalog_(std::move(catalog)), offers_(std::move(offers)) {
    for (std::size_t i = 0; i < catalog_.schemas.size(); ++i)
        schema_by_category_[catalog_.schemas[i].category] = i;
    for (std::size_t i = 0; i < catalog_.products.size(); ++i) {
        const auto& product = catalog_.products[i];
        if (!product_by_id_.emplace(product.product_id, i).second)
            throw ValidationError("duplicate product id \"" + product.product_id + "\"");
        products_by_category_[product.category].push_back(i);
    }
    for (std::size_t i = 0; i < offers_.size(); ++i) {
        const auto& offer = offers_[i];
        if (!offer_by_id_.emplace(offer.offer_id, i).second)
            throw ValidationError("duplicate offer id \"" + offer.offer_id + "\"");
        offers_by_category_[offer.category].push_back(i);
        offers_by_merchant_[offer.merchant].push_back(i);
        offers_by_mc_[{offer.merchant, offer.category}].push_back(i);
    }
}

void Corpus::set_matches(std::vector<MatchRecord> matches) {
    if (!matches_.empty() || !match_by_offer_.empty())
        throw ValidationError("matches already attached to this corpus");
    for (const auto& match : matches) {
        const Offer* o = offer(match.offer_id);
        const Product* p = product(match.product_id);
        if (!o) throw ValidationError("match references unknown offer \"" + match.offer_id + "\"");
        if (!p) throw ValidationError("match references unknown product \"" + match.product_id + "\"");
        if (o->category != p->category)
            throw ValidationError("match " + match.offer_id + " -> " + match.product_id +
                                  " crosses categories (\"" + o->category + "\" vs \"" +
                                  p->category + "\")");
        auto [it, inserted] = match_by_offer_.emplace(match.offer_id, product_by_id_.at(match.product_id));
        if (!inserted)
            throw ValidationError("offer \"" + match.offer_id + "\" matched to more than one product");
        offers_by_product_[match.product_id].push_back(offer_by_id_.at(match.offer_id));
    }
    matches_ = std::move(matches);
}

const CatalogSchema* Corpus::schema(const std::string& category) const {
    auto it = schema_by_category_.find(category);
    return it == schema_by_category_.end() ? nullptr : &catalog_.schemas[it->second];
}

const Product* Corpus::product(const std::string& product_id) const {
    auto it = product_by_id_.find(product_id);
    return it == product_by_id_.end() ? nullptr : &catalog_.products[it->second];
}

const Offer* Corpus::offer(const std::string& offer_id) const {
    auto it = offer_by_id_.find(offer_id);
    return it == offer_by_id_.end() ? nullptr : &offers_[it->second];
}

const Product* Corpus::matched_product(const std::string& offer_id) const {
    auto it = match_by_offer_.find(offer_id);
    return it == match_by_offer_.end() ? nullptr : &catalog_.products[it->second];
}

bool Corpus::offer_is_matched(const std::string& offer_id) const {
    return match_by_offer_.count(offer_id) != 0;
}

std::vector<const Offer*> Corpus::matching_offers(const std::string& product_id) const {
    std::vector<const Offer*> result;
    auto it = offers_by_product_.find(product_id);
    if (it == offers_by_product_.end()) return result;
    result.reserve(it->second.size());
    for (std::size_t i : it->second) result.push_back(&offers_[i]);
    return result;
}

namespace {
const std::vector<std::size_t> kEmptyIndices;
}

const std::vector<std::size_t>& Corpus::product_indices_by_category(const std::string& category) const {
    auto it = products_by_category_.find(category);
    return it == products_by_category_.end() ? kEmptyIndices : it->second;
}

const std::vector<std::size_t>& Corpus::offer_indices_by_category(const std::string& category) const {
    auto it = offers_by_category_.find(category);
    return it == offers_by_category_.end() ? kEmptyIndices : it->second;
}

const std::vector<std::size_t>& Corpus::offer_indices_by_merchant(const std::string& merchant) const {
    auto it = offers_by_merchant_.find(merchant);
    return it == offers_by_merchant_.end() ? kEmptyIndices : it->second;
}

const std::vector<std::size_t>& Corpus::offer_indices_by_merchant_category(
    const std::string& merchant, const std::string& category) const {
    auto it = offers_by_mc_.find({merchant, category});
    return it == offers_by_mc_.end() ? kEmptyIndices : it->second;
}

std::vector<std::pair<std::string, std::string>> Corpus::matched_merchant_categories() const {
    std::set<std::pair<std::string, std::string>> keys;
    for (const auto& match : matches_) {
        const Offer* o = offer(match.offer_id);
        keys.emplace(o->merchant, o->category);
    }
    return {keys.begin(), keys.end()};
}

std::vector<MatchRecord> load_matches(const std::filesystem::path& path, const Corpus& corpus,
                                      bool strict, LoadStats* stats) {
    std::vector<MatchRecord> matches;
    std::unordered_set<std::string> seen_offers;
    RecordSink sink{strict, stats, path.filename().string()};

    jsonl::for_each_record(
        path,
        [&](const json& record, std::size_t line_no) {
            if (stats) ++stats->records_read;
            MatchRecord match;
            try {
                match.offer_id = jsonl::get_string(record, "offer", true);
                match.product_id = jsonl::get_string(record, "product", true);
            } catch (const ValidationError& e) {
                sink.reject(e.what(), line_no);
                return;
            }
            // Referential problems always abort: a dangling match would silently
            // poison every distribution computed from it.
            const Offer* o = corpus.offer(match.offer_id);
            const Product* p = corpus.product(match.product_id);
            if (!o) throw ValidationError("match references unknown offer \"" + match.offer_id + "\"");
            if (!p)
                throw ValidationError("match references unknown product \"" + match.product_id + "\"");
            if (o->category != p->category)
                throw ValidationError("match " + match.offer_id + " -> " + match.product_id +
                                      " crosses categories");
            if (!seen_offers.insert(match.offer_id).second)
                throw ValidationError("offer \"" + match.offer_id + "\" appears in multiple matches");
            matches.push_back(std::move(match));
            if (stats) ++stats->accepted;
        },
        [&](const std::string& why, std::size_t line_no) {
            if (stats) ++stats->records_read;
            return sink.reject(why, line_no);
        });
    return matches;
}

}  // namespace prodsynth::corpus
