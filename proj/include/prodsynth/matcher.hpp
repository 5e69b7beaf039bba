#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "prodsynth/corpus.hpp"
#include "prodsynth/distsim.hpp"

namespace prodsynth::matcher {

// One potential attribute correspondence: catalog attribute A^P of category C
// against offer attribute A^O used by merchant M in C.
struct CandidateTuple {
    std::string catalog_attribute;
    std::string offer_attribute;
    std::string merchant;
    std::string category;

    // Canonical order: category, merchant, catalog attribute, offer attribute.
    friend bool operator<(const CandidateTuple& a, const CandidateTuple& b) {
        if (a.category != b.category) return a.category < b.category;
        if (a.merchant != b.merchant) return a.merchant < b.merchant;
        if (a.catalog_attribute != b.catalog_attribute)
            return a.catalog_attribute < b.catalog_attribute;
        return a.offer_attribute < b.offer_attribute;
    }
    friend bool operator==(const CandidateTuple& a, const CandidateTuple& b) {
        return a.category == b.category && a.merchant == b.merchant &&
               a.catalog_attribute == b.catalog_attribute &&
               a.offer_attribute == b.offer_attribute;
    }

    // Same attribute name on both sides after trim + casefold.
    bool is_name_identity() const;
};

struct LabeledExample {
    CandidateTuple candidate;
    distsim::FeatureVector features;
    int label = 0;  // 1 = correspondence, 0 = not
};

struct LogisticModel {
    std::vector<std::string> feature_names;
    std::vector<double> weights;
    double bias = 0.0;
    std::vector<double> feature_means;
    std::vector<double> feature_stds;  // all > 0; zero-variance columns store 1

    // sigmoid(w . standardize(f) + bias)
    double score(const std::array<double, 6>& features) const;
};

struct Correspondence {
    CandidateTuple candidate;
    double score = 0.0;
};

struct TrainOptions {
    double lambda = 1e-4;     // L2 strength on weights; the bias is never penalized
    double tolerance = 1e-6;  // stop when max |gradient component| drops below
    std::size_t max_iterations = 10000;
};

// Cross product of catalog attributes seen in matched products of C with offer
// attributes seen in matched offers of (M, C), for every (M, C) holding at
// least one match. Sorted canonically, duplicate-free.
std::vector<CandidateTuple> generate_candidates(const corpus::Corpus& corpus);

// Table 1 features for each candidate, sharing one bag cache.
std::vector<distsim::FeatureVector> compute_features(
    const corpus::Corpus& corpus, const std::vector<CandidateTuple>& candidates,
    distsim::FeatureMode mode = distsim::FeatureMode::MatchRestricted);

// Name-identity auto-labeling. Identity tuples are positives; a non-identity
// tuple is a negative exactly when its catalog attribute also appears as an
// identity tuple for the same merchant and category. Everything else is
// excluded.
std::vector<LabeledExample> build_training_set(const std::vector<CandidateTuple>& candidates,
                                               const std::vector<distsim::FeatureVector>& features);

// L2-regularized logistic regression via full-batch gradient ascent with
// backtracking line search. Deterministic: zero initialization, fixed example
// order, no sampling. Throws DegenerateDataError unless both classes occur.
LogisticModel train(const std::vector<LabeledExample>& examples, const TrainOptions& options = {});

Correspondence predict(const LogisticModel& model, const CandidateTuple& candidate,
                       const distsim::FeatureVector& features);

// Keep score > threshold. With resolve_conflicts, an offer attribute maps to
// at most one catalog attribute per (M, C): highest score wins, ties go to the
// lexicographically smaller catalog attribute. Output is canonically sorted.
std::vector<Correspondence> select_correspondences(std::vector<Correspondence> scored,
                                                   double threshold,
                                                   bool resolve_conflicts = true);

void save_model(const std::filesystem::path& path, const LogisticModel& model);
LogisticModel load_model(const std::filesystem::path& path);

void write_correspondences(const std::filesystem::path& path,
                           const std::vector<Correspondence>& correspondences);
std::vector<Correspondence> load_correspondences(const std::filesystem::path& path);

}  // namespace prodsynth::matcher
