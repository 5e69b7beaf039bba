#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "prodsynth/corpus.hpp"
#include "prodsynth/jsonl.hpp"
#include "prodsynth/matcher.hpp"

namespace prodsynth::pipeline {

// Offer spec rewritten into catalog vocabulary; pairs that map to no catalog
// attribute are gone.
struct ReconciledOffer {
    std::string offer_id;
    std::string merchant;
    std::string category;
    corpus::Spec pairs;
};

struct Cluster {
    std::string category;
    std::string key_attribute;
    std::string key;  // normalized
    std::vector<ReconciledOffer> members;
};

// Everything fuse_value decided, for audits and tests: distinct values in
// first-appearance order, their 0/1 term vectors, the centroid, distances.
struct FusionTrace {
    std::vector<std::string> terms;
    std::vector<std::string> values;
    std::vector<long long> multiplicities;
    std::vector<std::vector<double>> vectors;
    std::vector<double> centroid;
    std::vector<double> distances;
    std::string chosen;
};

struct SynthesizedProduct {
    std::string category;
    std::string key;
    std::string key_attribute;
    corpus::Spec spec;
    // attribute -> contributing (offer_id, value) pairs, in member order
    std::map<std::string, std::vector<std::pair<std::string, std::string>>> provenance;
};

struct PipelineCounters {
    std::size_t offers_in = 0;
    std::size_t pairs_in = 0;
    std::size_t pairs_reconciled = 0;
    std::size_t pairs_discarded = 0;
    std::size_t keyless_offers = 0;
    std::size_t clusters = 0;
    std::size_t products = 0;
    std::size_t attributes_synthesized = 0;
    std::size_t key_conflicts = 0;  // clusters whose members disagree on another key attribute

    jsonl::json to_json() const;
};

// Fast (merchant, category, offer attribute) -> catalog attribute lookup.
// When several correspondences share a slot the higher score wins, ties to
// the lexicographically smaller catalog attribute.
class CorrespondenceIndex {
public:
    CorrespondenceIndex() = default;
    explicit CorrespondenceIndex(const std::vector<matcher::Correspondence>& correspondences);

    const std::string* lookup(const std::string& merchant, const std::string& category,
                              const std::string& offer_attribute) const;
    std::size_t size() const { return index_.size(); }

private:
    std::map<std::tuple<std::string, std::string, std::string>, std::pair<std::string, double>>
        index_;
};

// Rewrite one offer: a pair maps through its correspondence when one is
// selected, otherwise through name identity with a catalog attribute,
// otherwise it is dropped. Emitted names use the schema's spelling.
ReconciledOffer reconcile(const corpus::Offer& offer, const CorrespondenceIndex& correspondences,
                          const corpus::CatalogSchema& schema,
                          PipelineCounters* counters = nullptr);

// First schema key attribute carrying a value that survives normalization.
std::optional<std::pair<std::string, std::string>> extract_key(
    const ReconciledOffer& offer, const corpus::CatalogSchema& schema);

// Group keyed offers by (category, key attribute, normalized key); keyless
// offers are dropped and counted. Cluster order is the group-by key order.
std::vector<Cluster> cluster(const std::vector<ReconciledOffer>& offers,
                             const std::vector<corpus::CatalogSchema>& schemas,
                             PipelineCounters* counters = nullptr);

// Representative value: 0/1 term vectors over the distinct lowercased tokens
// of all values; pick the value closest (Euclidean) to the centroid; ties go
// to the value occurring more often, then the lexicographically smallest.
std::string fuse_value(const std::vector<std::string>& values, FusionTrace* trace = nullptr);

SynthesizedProduct fuse_cluster(const Cluster& cluster, const corpus::CatalogSchema& schema,
                                PipelineCounters* counters = nullptr);

// reconcile + cluster + fuse over a whole offer list.
std::vector<SynthesizedProduct> synthesize(const std::vector<corpus::Offer>& offers,
                                           const std::vector<matcher::Correspondence>& correspondences,
                                           const std::vector<corpus::CatalogSchema>& schemas,
                                           PipelineCounters* counters = nullptr);

void write_products(const std::filesystem::path& path,
                    const std::vector<SynthesizedProduct>& products);
std::vector<SynthesizedProduct> load_products(const std::filesystem::path& path);

}  // namespace prodsynth::pipeline
