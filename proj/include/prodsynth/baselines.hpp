#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "prodsynth/corpus.hpp"
#include "prodsynth/matcher.hpp"

namespace prodsynth::baselines {

// Jaro-Winkler similarity in [0,1]: prefix scale 0.1, prefix capped at 4.
double jaro_winkler(const std::string& a, const std::string& b);

// Token document frequencies over a value corpus. Each value string counts
// once toward df no matter how often a token repeats inside it.
struct TfidfStats {
    std::size_t corpus_size = 0;
    std::map<std::string, std::size_t> document_frequency;

    // ln(1 + N/df). Unseen tokens are weighted as if df = 1, so every weight
    // stays strictly positive and cosine normalization is always defined.
    double idf(const std::string& token) const;
};

TfidfStats build_tfidf_stats(const std::vector<std::string>& values);

// SoftTFIDF with Jaro-Winkler as the secondary measure: a token pairs with its
// most similar counterpart when the similarity exceeds 0.9; token weight is
// ln(tf+1) * idf, cosine-normalized per string. Identical strings score 1,
// strings without any close token pair score 0.
double soft_tfidf(const std::string& a, const std::string& b, const TfidfStats& stats);

// Averaged value-similarity matrix for one merchant and category. Rows are
// offer attributes, columns catalog attributes, cells in [0,1].
struct SimilarityMatrix {
    std::string merchant;
    std::string category;
    std::vector<std::string> offer_attributes;
    std::vector<std::string> catalog_attributes;
    std::vector<std::vector<double>> cells;  // cells[row][col]

    double at(const std::string& offer_attribute, const std::string& catalog_attribute) const;
};

// Mean of the per-match similarity matrices over every matched (product,
// offer) pair of the merchant and category. Rows and columns are the unions
// across pairs; a pair missing either attribute contributes 0 to that cell.
// Throws DegenerateDataError when the pair has no matches.
SimilarityMatrix dumas_merchant_matrix(const corpus::Corpus& corpus, const std::string& merchant,
                                       const std::string& category);

// Exact maximum-weight bipartite assignment (Hungarian algorithm on the
// zero-padded square matrix). Returns (row, col) pairs sorted by row; every
// row and every column appears at most once. Missing cells in ragged rows
// count as weight 0 and never appear in the result.
std::vector<std::pair<std::size_t, std::size_t>> max_weight_assignment(
    const std::vector<std::vector<double>>& weights);

// Correspondences from the optimal assignment over the matrix: one per
// assigned pair with positive weight, scored by the cell value.
std::vector<matcher::Correspondence> dumas_match(const SimilarityMatrix& matrix);

// dumas_merchant_matrix + dumas_match for every (merchant, category) holding
// at least one match. Canonically sorted.
std::vector<matcher::Correspondence> dumas_correspondences(const corpus::Corpus& corpus);

// Multinomial Naive Bayes over catalog values: one class per attribute that
// appears in at least one product of the category.
struct NBModel {
    std::string category;
    std::vector<std::string> classes;  // sorted
    std::map<std::string, std::map<std::string, std::size_t>> term_counts;
    std::map<std::string, std::size_t> class_counts;       // products having the attribute
    std::map<std::string, std::size_t> class_term_totals;  // term occurrences per class
    std::set<std::string> vocabulary;
};

// Trains on every product of the category. Throws DegenerateDataError when
// the category has no products or its products carry no attributes at all.
NBModel nb_train(const corpus::Corpus& corpus, const std::string& category);

// P(class | value) for every class, with add-one smoothing over the category
// vocabulary, normalized to sum to 1. Token-free values fall back to the
// class priors.
std::map<std::string, double> nb_posteriors(const NBModel& model, const std::string& value);

// Mean posterior of catalog_attribute over the distinct values the merchant's
// offers in the model's category give to offer_attribute. 0 when no such
// value exists.
double nb_score(const NBModel& model, const corpus::Corpus& corpus,
                const std::string& catalog_attribute, const std::string& offer_attribute,
                const std::string& merchant);

// For every merchant, category, and catalog attribute A: emit <A, B> for the
// offer attribute B with the strictly highest score. Ties emit nothing.
// Categories without products are skipped.
std::vector<matcher::Correspondence> nb_correspondences(const corpus::Corpus& corpus);

// Same record layout as the matcher's correspondence files plus a trailing
// "method" field; method must be "dumas" or "nb".
void write_correspondences(const std::filesystem::path& path,
                           const std::vector<matcher::Correspondence>& correspondences,
                           const std::string& method);

}  // namespace prodsynth::baselines
