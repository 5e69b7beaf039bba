#pragma once

#include <array>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "prodsynth/corpus.hpp"

namespace prodsynth::distsim {

inline constexpr double kLn2 = 0.6931471805599453;

// Multiset of tokens drawn from attribute values.
struct TokenBag {
    std::map<std::string, long long> counts;
    long long total = 0;

    bool empty() const { return total == 0; }
    void add(const std::string& token, long long n = 1) {
        counts[token] += n;
        total += n;
    }
};

struct TermDistribution {
    std::map<std::string, double> probs;
};

// Whitespace split, lowercased, punctuation kept inside tokens
// ("ATA 100 mb/s" -> ata, 100, mb/s).
std::vector<std::string> tokenize(std::string_view value);

TokenBag build_bag(const std::vector<std::string>& values);

TermDistribution distribution(const TokenBag& bag);

// Mixture (p + q) / 2 over the union of supports.
TermDistribution mixture(const TermDistribution& p, const TermDistribution& q);

// Sum over tokens of p(t) * ln(p(t)/m(t)), with 0*log0 := 0. Throws
// std::domain_error when some p(t) > 0 has m(t) = 0.
double kl_divergence(const TermDistribution& p, const TermDistribution& m);

// Symmetric, in [0, ln 2]. Either bag empty -> ln 2 (maximal dissimilarity).
double js_divergence(const TokenBag& a, const TokenBag& b);

// Over distinct token sets; both empty -> 0.
double jaccard(const TokenBag& a, const TokenBag& b);

enum class Grouping { MerchantCategory, Category, Merchant };

// MatchRestricted selects only offers that appear in a match record and the
// products those offers match to; Unrestricted ignores matches and takes every
// offer of the group plus every catalog product of the involved categories.
enum class FeatureMode { MatchRestricted, Unrestricted };

struct BagPair {
    TokenBag product_side;  // values of the catalog attribute
    TokenBag offer_side;    // values of the offer attribute
};

BagPair group_bags(const corpus::Corpus& corpus, const std::string& catalog_attribute,
                   const std::string& offer_attribute, const std::string& merchant,
                   const std::string& category, Grouping grouping,
                   FeatureMode mode = FeatureMode::MatchRestricted);

struct FeatureVector {
    double js_mc = kLn2;
    double js_c = kLn2;
    double js_m = kLn2;
    double jaccard_mc = 0.0;
    double jaccard_c = 0.0;
    double jaccard_m = 0.0;
    // False when either bag of the grouping was empty and the defaults above
    // were used. Diagnostics only, never classifier input.
    bool has_mc = false;
    bool has_c = false;
    bool has_m = false;

    std::array<double, 6> values() const {
        return {js_mc, js_c, js_m, jaccard_mc, jaccard_c, jaccard_m};
    }
    static const std::array<const char*, 6>& names();
};

FeatureVector feature_vector(const corpus::Corpus& corpus, const std::string& catalog_attribute,
                             const std::string& offer_attribute, const std::string& merchant,
                             const std::string& category,
                             FeatureMode mode = FeatureMode::MatchRestricted);

// Same features with the per-group bags memoized; use this when featurizing
// many candidates against one corpus. Read-only over the corpus.
class FeatureComputer {
public:
    explicit FeatureComputer(const corpus::Corpus& corpus,
                             FeatureMode mode = FeatureMode::MatchRestricted)
        : corpus_(corpus), mode_(mode) {}

    FeatureVector compute(const std::string& catalog_attribute, const std::string& offer_attribute,
                          const std::string& merchant, const std::string& category);

private:
    const TokenBag& offer_bag(Grouping grouping, const std::string& merchant,
                              const std::string& category, const std::string& attribute);
    const TokenBag& product_bag(Grouping grouping, const std::string& merchant,
                                const std::string& category, const std::string& attribute);

    const corpus::Corpus& corpus_;
    FeatureMode mode_;
    std::map<std::string, TokenBag> cache_;
};

}  // namespace prodsynth::distsim
