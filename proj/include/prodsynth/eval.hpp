#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "prodsynth/corpus.hpp"
#include "prodsynth/distsim.hpp"
#include "prodsynth/jsonl.hpp"
#include "prodsynth/matcher.hpp"
#include "prodsynth/pipeline.hpp"

namespace prodsynth::eval {

// Knobs for the seeded corpus generator. The first attribute of every
// category is the key attribute ("Model Part Number").
struct SynthConfig {
    std::size_t categories = 6;
    std::size_t merchants = 20;
    std::size_t attributes_per_category = 10;
    std::size_t synonym_pool = 3;   // alternative merchant-side names per attribute
    std::size_t value_vocab = 24;   // tokens in each attribute's value domain
    std::size_t products_per_category = 200;
    std::size_t offers_min = 3;
    std::size_t offers_max = 15;
    double match_fraction = 0.6;    // offers that get a MatchRecord
    double identity_prob = 0.12;    // merchant uses the catalog spelling
    double perturbation_rate = 0.2; // value rewritten (case, token order, unit suffix)
    double noise_rate = 0.1;        // offers gaining a junk attribute-value pair
    double attribute_drop_rate = 0.12;
};

jsonl::json synth_config_to_json(const SynthConfig& config);
SynthConfig synth_config_from_json(const jsonl::json& j);
void write_synth_config(const std::filesystem::path& path, const SynthConfig& config);
SynthConfig load_synth_config(const std::filesystem::path& path);

struct GroundTruth {
    // Every correct tuple discoverable from the corpus, identities included.
    std::set<matcher::CandidateTuple> correspondences;
    // (merchant, category) -> catalog attribute -> merchant-side name.
    std::map<std::pair<std::string, std::string>, std::map<std::string, std::string>> synonyms;
    std::vector<corpus::MatchRecord> matches;
    std::vector<pipeline::SynthesizedProduct> planted_products;

    std::size_t cross_name_count() const;
};

struct SyntheticData {
    corpus::Corpus corpus;
    GroundTruth truth;
};

// Deterministic for a fixed (config, seed). Throws ValidationError on
// infeasible configs (empty dimensions, rates outside [0,1], synonym pool
// too small for identity_prob < 1).
SyntheticData generate_synthetic(const SynthConfig& config, std::uint64_t seed);

// Corpus where every merchant stocks only one of two complementary product
// halves and paired attributes split a shared vocabulary oppositely between
// the halves. Category-wide value distributions of paired attributes are
// indistinguishable; match-restricted ones separate cleanly.
SyntheticData generate_biased_synthetic(std::uint64_t seed);

void write_ground_truth(const std::filesystem::path& path, const GroundTruth& truth);
GroundTruth load_ground_truth(const std::filesystem::path& path);

struct CurvePoint {
    double theta = 0.0;
    std::size_t coverage = 0;              // outputs with score > theta
    std::optional<double> precision;       // empty when coverage is 0
};

struct MethodCurve {
    std::string method;
    std::vector<CurvePoint> points;        // ascending theta
};

// 0.00, 0.01, ..., 0.99.
std::vector<double> theta_grid();

// Name-identity outputs are excluded before anything is counted; an output
// is correct when its tuple is in the truth set.
MethodCurve precision_coverage(const std::vector<matcher::Correspondence>& scored,
                               const GroundTruth& truth, const std::vector<double>& thetas);

// Largest coverage among curve points reaching the precision; empty when the
// curve never reaches it.
std::optional<std::size_t> coverage_at_precision(const MethodCurve& curve, double precision);

// Recall of A relative to B when both are measured at precision p: the
// coverage ratio c_a / c_b. Throws DegenerateDataError when c_b is 0.
double relative_recall(double c_a, double c_b, double p);

// Correspondences scored by one similarity alone: js_* features map through
// 1 - js/ln2, jaccard_* features are used as-is. Output is conflict-resolved
// like the classifier's.
std::vector<matcher::Correspondence> single_feature_scores(
    const std::vector<matcher::CandidateTuple>& candidates,
    const std::vector<distsim::FeatureVector>& features, const std::string& feature);

// Synthesized products against the planted ones, matched by (category, key).
// Values compare exactly after whitespace collapse.
struct ProductScore {
    std::size_t synthesized = 0;
    std::size_t matched_key = 0;
    std::size_t attributes_compared = 0;
    std::size_t attributes_correct = 0;
    std::size_t fully_correct = 0;         // every synthesized attribute correct
    double attribute_precision = 0.0;      // correct / compared, 0 when none compared
    double product_precision = 0.0;        // fully_correct / synthesized, 0 when none

    jsonl::json to_json() const;
};

ProductScore score_products(const std::vector<pipeline::SynthesizedProduct>& products,
                            const GroundTruth& truth);

struct MethodSummary {
    std::string method;
    std::size_t outputs = 0;    // all correspondences loaded for the method
    std::size_t evaluated = 0;  // after name-identity exclusion
    std::map<std::string, std::optional<std::size_t>> coverage_at_precision;  // "0.70".."0.90"
};

struct EvalReport {
    std::string reference;
    std::vector<MethodCurve> curves;
    std::vector<MethodSummary> summaries;
    // precision label -> method -> reference coverage / method coverage
    std::map<std::string, std::map<std::string, std::optional<double>>> relative_recall;
};

// Writes curves/<method>.csv (theta,coverage,precision) and report.json under
// out_dir. Method labels must be known ("ours", "js_mc", "jaccard_mc",
// "dumas", "nb", "restricted", "unrestricted") and unique; the reference for
// relative recall is "ours" when present, otherwise the first method.
EvalReport score_pipeline(
    const std::vector<std::pair<std::string, std::vector<matcher::Correspondence>>>& outputs,
    const GroundTruth& truth, const std::filesystem::path& out_dir,
    const ProductScore* products = nullptr);

}  // namespace prodsynth::eval
