#include "prodsynth/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "prodsynth/distsim.hpp"
#include "prodsynth/errors.hpp"
#include "prodsynth/text.hpp"

namespace prodsynth::pipeline {

jsonl::json PipelineCounters::to_json() const {
    jsonl::json j;
    j["offers_in"] = offers_in;
    j["pairs_in"] = pairs_in;
    j["pairs_reconciled"] = pairs_reconciled;
    j["pairs_discarded"] = pairs_discarded;
    j["keyless_offers"] = keyless_offers;
    j["clusters"] = clusters;
    j["products"] = products;
    j["attributes_synthesized"] = attributes_synthesized;
    j["key_conflicts"] = key_conflicts;
    return j;
}

CorrespondenceIndex::CorrespondenceIndex(
    const std::vector<matcher::Correspondence>& correspondences) {
    for (const auto& c : correspondences) {
        std::tuple<std::string, std::string, std::string> key{
            c.candidate.merchant, c.candidate.category, c.candidate.offer_attribute};
        auto [it, inserted] = index_.emplace(key, std::pair{c.candidate.catalog_attribute, c.score});
        if (inserted) continue;
        auto& [attr, score] = it->second;
        if (c.score > score ||
            (c.score == score && c.candidate.catalog_attribute < attr)) {
            attr = c.candidate.catalog_attribute;
            score = c.score;
        }
    }
}

const std::string* CorrespondenceIndex::lookup(const std::string& merchant,
                                               const std::string& category,
                                               const std::string& offer_attribute) const {
    auto it = index_.find({merchant, category, offer_attribute});
    return it == index_.end() ? nullptr : &it->second.first;
}

ReconciledOffer reconcile(const corpus::Offer& offer, const CorrespondenceIndex& correspondences,
                          const corpus::CatalogSchema& schema, PipelineCounters* counters) {
    ReconciledOffer out;
    out.offer_id = offer.offer_id;
    out.merchant = offer.merchant;
    out.category = offer.category;

    std::set<std::string> allowed(schema.attributes.begin(), schema.attributes.end());
    std::map<std::string, std::string> identity;  // normalized name -> schema spelling
    for (const auto& attr : schema.attributes) identity[text::normalized_name(attr)] = attr;

    for (const auto& [name, value] : offer.spec) {
        if (counters) ++counters->pairs_in;
        const std::string* target = correspondences.lookup(offer.merchant, offer.category, name);
        if (target == nullptr) {
            auto it = identity.find(text::normalized_name(name));
            if (it != identity.end()) target = &it->second;
        }
        if (target == nullptr || !allowed.count(*target)) {
            if (counters) ++counters->pairs_discarded;
            continue;
        }
        out.pairs.emplace_back(*target, value);
        if (counters) ++counters->pairs_reconciled;
    }
    return out;
}

std::optional<std::pair<std::string, std::string>> extract_key(
    const ReconciledOffer& offer, const corpus::CatalogSchema& schema) {
    for (const auto& key_attr : schema.key_attributes) {
        for (const auto& [name, value] : offer.pairs) {
            if (name != key_attr) continue;
            std::string normalized = text::normalize_key(value);
            if (!normalized.empty()) return std::pair{key_attr, std::move(normalized)};
        }
    }
    return std::nullopt;
}

std::vector<Cluster> cluster(const std::vector<ReconciledOffer>& offers,
                             const std::vector<corpus::CatalogSchema>& schemas,
                             PipelineCounters* counters) {
    std::map<std::string, const corpus::CatalogSchema*> schema_by_category;
    for (const auto& schema : schemas) schema_by_category[schema.category] = &schema;

    std::map<std::tuple<std::string, std::string, std::string>, Cluster> groups;
    for (const auto& offer : offers) {
        auto schema_it = schema_by_category.find(offer.category);
        std::optional<std::pair<std::string, std::string>> key;
        if (schema_it != schema_by_category.end()) key = extract_key(offer, *schema_it->second);
        if (!key) {
            if (counters) ++counters->keyless_offers;
            continue;
        }
        auto& group = groups[{offer.category, key->first, key->second}];
        if (group.members.empty()) {
            group.category = offer.category;
            group.key_attribute = key->first;
            group.key = key->second;
        }
        group.members.push_back(offer);
    }

    std::vector<Cluster> clusters;
    clusters.reserve(groups.size());
    for (auto& [key, group] : groups) clusters.push_back(std::move(group));
    if (counters) counters->clusters += clusters.size();

    // Members agreeing on the cluster key can still disagree on another key
    // attribute; that is worth surfacing in the run report.
    if (counters) {
        for (const auto& c : clusters) {
            auto schema_it = schema_by_category.find(c.category);
            if (schema_it == schema_by_category.end()) continue;
            for (const auto& other_key : schema_it->second->key_attributes) {
                if (other_key == c.key_attribute) continue;
                std::set<std::string> values;
                for (const auto& member : c.members)
                    for (const auto& [name, value] : member.pairs)
                        if (name == other_key) values.insert(text::normalize_key(value));
                if (values.size() > 1) {
                    ++counters->key_conflicts;
                    break;
                }
            }
        }
    }
    return clusters;
}

std::string fuse_value(const std::vector<std::string>& values, FusionTrace* trace) {
    if (values.empty()) throw ValidationError("fuse_value requires at least one value");

    // Distinct values in first-appearance order, with multiplicities.
    std::vector<std::string> distinct;
    std::vector<long long> counts;
    std::map<std::string, std::size_t> value_index;
    for (const auto& value : values) {
        auto [it, inserted] = value_index.emplace(value, distinct.size());
        if (inserted) {
            distinct.push_back(value);
            counts.push_back(1);
        } else {
            ++counts[it->second];
        }
    }

    // Term list T in first-appearance order; per-value presence sets.
    std::vector<std::string> terms;
    std::map<std::string, std::size_t> term_index;
    std::vector<std::set<std::size_t>> presence(distinct.size());
    for (std::size_t v = 0; v < distinct.size(); ++v) {
        for (const auto& token : distsim::tokenize(distinct[v])) {
            auto [it, inserted] = term_index.emplace(token, terms.size());
            if (inserted) terms.push_back(token);
            presence[v].insert(it->second);
        }
    }

    const std::size_t dim = terms.size();
    const double n = static_cast<double>(values.size());
    std::vector<double> centroid(dim, 0.0);
    for (std::size_t v = 0; v < distinct.size(); ++v)
        for (std::size_t t : presence[v]) centroid[t] += static_cast<double>(counts[v]);
    for (auto& c : centroid) c /= n;

    std::vector<double> dist_sq(distinct.size(), 0.0);
    for (std::size_t v = 0; v < distinct.size(); ++v) {
        double sum = 0.0;
        for (std::size_t t = 0; t < dim; ++t) {
            const double x = presence[v].count(t) ? 1.0 : 0.0;
            const double d = x - centroid[t];
            sum += d * d;
        }
        dist_sq[v] = sum;
    }

    std::size_t best = 0;
    for (std::size_t v = 1; v < distinct.size(); ++v) {
        const double diff = dist_sq[v] - dist_sq[best];
        if (diff < -1e-12) {
            best = v;
        } else if (diff <= 1e-12) {
            if (counts[v] > counts[best] ||
                (counts[v] == counts[best] && distinct[v] < distinct[best]))
                best = v;
        }
    }

    if (trace) {
        trace->terms = terms;
        trace->values = distinct;
        trace->multiplicities = counts;
        trace->vectors.assign(distinct.size(), std::vector<double>(dim, 0.0));
        for (std::size_t v = 0; v < distinct.size(); ++v)
            for (std::size_t t : presence[v]) trace->vectors[v][t] = 1.0;
        trace->centroid = centroid;
        trace->distances.resize(distinct.size());
        for (std::size_t v = 0; v < distinct.size(); ++v)
            trace->distances[v] = std::sqrt(dist_sq[v]);
        trace->chosen = distinct[best];
    }
    return distinct[best];
}

SynthesizedProduct fuse_cluster(const Cluster& cluster, const corpus::CatalogSchema& schema,
                                PipelineCounters* counters) {
    if (cluster.members.empty()) throw ValidationError("cannot fuse an empty cluster");
    SynthesizedProduct product;
    product.category = cluster.category;
    product.key = cluster.key;
    product.key_attribute = cluster.key_attribute;

    for (const auto& attribute : schema.attributes) {
        std::vector<std::string> values;
        std::vector<std::pair<std::string, std::string>> sources;
        for (const auto& member : cluster.members) {
            for (const auto& [name, value] : member.pairs) {
                if (name != attribute) continue;
                values.push_back(value);
                sources.emplace_back(member.offer_id, value);
            }
        }
        if (values.empty()) continue;
        product.spec.emplace_back(attribute, fuse_value(values));
        product.provenance.emplace(attribute, std::move(sources));
        if (counters) ++counters->attributes_synthesized;
    }
    if (counters) ++counters->products;
    return product;
}

std::vector<SynthesizedProduct> synthesize(
    const std::vector<corpus::Offer>& offers,
    const std::vector<matcher::Correspondence>& correspondences,
    const std::vector<corpus::CatalogSchema>& schemas, PipelineCounters* counters) {
    std::map<std::string, const corpus::CatalogSchema*> schema_by_category;
    for (const auto& schema : schemas) schema_by_category[schema.category] = &schema;

    CorrespondenceIndex index(correspondences);
    std::vector<ReconciledOffer> reconciled;
    reconciled.reserve(offers.size());
    for (const auto& offer : offers) {
        if (counters) ++counters->offers_in;
        auto it = schema_by_category.find(offer.category);
        if (it == schema_by_category.end()) {
            // No schema, no catalog vocabulary: every pair is noise here.
            if (counters) {
                counters->pairs_in += offer.spec.size();
                counters->pairs_discarded += offer.spec.size();
                ++counters->keyless_offers;
            }
            continue;
        }
        reconciled.push_back(reconcile(offer, index, *it->second, counters));
    }

    std::vector<SynthesizedProduct> products;
    for (const auto& c : cluster(reconciled, schemas, counters))
        products.push_back(fuse_cluster(c, *schema_by_category.at(c.category), counters));
    return products;
}

void write_products(const std::filesystem::path& path,
                    const std::vector<SynthesizedProduct>& products) {
    jsonl::Writer out(path);
    for (const auto& product : products) {
        jsonl::json j;
        j["category"] = product.category;
        j["key"] = product.key;
        j["key_attribute"] = product.key_attribute;
        jsonl::json spec = jsonl::json::array();
        for (const auto& [name, value] : product.spec) spec.push_back({name, value});
        j["spec"] = std::move(spec);
        jsonl::json provenance = jsonl::json::object();
        for (const auto& [attr, sources] : product.provenance) {
            jsonl::json list = jsonl::json::array();
            for (const auto& [offer_id, value] : sources) {
                jsonl::json entry;
                entry["offer"] = offer_id;
                entry["value"] = value;
                list.push_back(std::move(entry));
            }
            provenance[attr] = std::move(list);
        }
        j["provenance"] = std::move(provenance);
        out.write(j);
    }
}

std::vector<SynthesizedProduct> load_products(const std::filesystem::path& path) {
    std::vector<SynthesizedProduct> products;
    jsonl::for_each_record(
        path,
        [&](const jsonl::json& j, std::size_t line_no) {
            SynthesizedProduct product;
            product.category = jsonl::get_string(j, "category", true);
            product.key = jsonl::get_string(j, "key", true);
            product.key_attribute = jsonl::get_string(j, "key_attribute", true);
            if (!j.contains("spec") || !j["spec"].is_array())
                throw ValidationError("products line " + std::to_string(line_no) +
                                      " lacks a spec array");
            for (const auto& pair : j["spec"]) {
                if (!pair.is_array() || pair.size() != 2)
                    throw ValidationError("products line " + std::to_string(line_no) +
                                          " has a malformed spec pair");
                product.spec.emplace_back(pair[0].get<std::string>(), pair[1].get<std::string>());
            }
            if (j.contains("provenance") && j["provenance"].is_object()) {
                for (const auto& [attr, list] : j["provenance"].items()) {
                    auto& sources = product.provenance[attr];
                    for (const auto& entry : list)
                        sources.emplace_back(jsonl::get_string(entry, "offer", true),
                                             jsonl::get_string(entry, "value", true));
                }
            }
            products.push_back(std::move(product));
        },
        [&](const std::string& why, std::size_t line_no) -> bool {
            throw ValidationError("products line " + std::to_string(line_no) + ": " + why);
        });
    return products;
}

}  // namespace prodsynth::pipeline
