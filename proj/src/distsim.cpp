#include "prodsynth/distsim.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

#include "prodsynth/text.hpp"

namespace prodsynth::distsim {

std::vector<std::string> tokenize(std::string_view value) {
    std::vector<std::string> tokens = text::split_ws(value);
    for (auto& token : tokens) token = text::casefold(token);
    return tokens;
}

TokenBag build_bag(const std::vector<std::string>& values) {
    TokenBag bag;
    for (const auto& value : values)
        for (const auto& token : tokenize(value)) bag.add(token);
    return bag;
}

TermDistribution distribution(const TokenBag& bag) {
    TermDistribution dist;
    if (bag.total == 0) return dist;
    const double total = static_cast<double>(bag.total);
    for (const auto& [token, count] : bag.counts)
        dist.probs[token] = static_cast<double>(count) / total;
    return dist;
}

TermDistribution mixture(const TermDistribution& p, const TermDistribution& q) {
    TermDistribution m;
    for (const auto& [token, prob] : p.probs) m.probs[token] += 0.5 * prob;
    for (const auto& [token, prob] : q.probs) m.probs[token] += 0.5 * prob;
    return m;
}

double kl_divergence(const TermDistribution& p, const TermDistribution& m) {
    double sum = 0.0;
    for (const auto& [token, prob] : p.probs) {
        if (prob <= 0.0) continue;
        auto it = m.probs.find(token);
        if (it == m.probs.end() || it->second <= 0.0)
            throw std::domain_error("kl_divergence: token \"" + token +
                                    "\" has zero probability in the reference distribution");
        sum += prob * std::log(prob / it->second);
    }
    return sum;
}

double js_divergence(const TokenBag& a, const TokenBag& b) {
    if (a.empty() || b.empty()) return kLn2;
    const TermDistribution pa = distribution(a);
    const TermDistribution pb = distribution(b);
    const TermDistribution pm = mixture(pa, pb);
    double js = 0.5 * kl_divergence(pa, pm) + 0.5 * kl_divergence(pb, pm);
    return js < 0.0 ? 0.0 : js;
}

double jaccard(const TokenBag& a, const TokenBag& b) {
    if (a.counts.empty() && b.counts.empty()) return 0.0;
    std::size_t intersection = 0;
    for (const auto& [token, count] : a.counts)
        if (b.counts.count(token)) ++intersection;
    const std::size_t uni = a.counts.size() + b.counts.size() - intersection;
    return static_cast<double>(intersection) / static_cast<double>(uni);
}

namespace {

// Offer indices for the grouping, before any match filtering.
const std::vector<std::size_t>& group_offers(const corpus::Corpus& corpus, Grouping grouping,
                                             const std::string& merchant,
                                             const std::string& category) {
    switch (grouping) {
        case Grouping::MerchantCategory:
            return corpus.offer_indices_by_merchant_category(merchant, category);
        case Grouping::Category:
            return corpus.offer_indices_by_category(category);
        case Grouping::Merchant:
        default:
            return corpus.offer_indices_by_merchant(merchant);
    }
}

TokenBag build_offer_bag(const corpus::Corpus& corpus, const std::vector<std::size_t>& offers,
                         const std::string& attribute, FeatureMode mode) {
    TokenBag bag;
    for (std::size_t idx : offers) {
        const corpus::Offer& offer = corpus.offer_at(idx);
        if (mode == FeatureMode::MatchRestricted && !corpus.offer_is_matched(offer.offer_id))
            continue;
        for (const auto& [name, value] : offer.spec) {
            if (name != attribute) continue;
            for (const auto& token : tokenize(value)) bag.add(token);
        }
    }
    return bag;
}

TokenBag build_product_bag(const corpus::Corpus& corpus, const std::vector<std::size_t>& offers,
                           const std::string& attribute, FeatureMode mode) {
    TokenBag bag;
    if (mode == FeatureMode::MatchRestricted) {
        // The set of products matched by the selected offers; each product
        // contributes its values once no matter how many offers match it.
        std::set<std::string> product_ids;
        for (std::size_t idx : offers) {
            const corpus::Offer& offer = corpus.offer_at(idx);
            if (const corpus::Product* p = corpus.matched_product(offer.offer_id))
                product_ids.insert(p->product_id);
        }
        for (const auto& id : product_ids) {
            for (const auto& [name, value] : corpus.product(id)->spec) {
                if (name != attribute) continue;
                for (const auto& token : tokenize(value)) bag.add(token);
            }
        }
    } else {
        std::set<std::string> categories;
        for (std::size_t idx : offers) categories.insert(corpus.offer_at(idx).category);
        for (const auto& category : categories) {
            for (std::size_t pi : corpus.product_indices_by_category(category)) {
                for (const auto& [name, value] : corpus.product_at(pi).spec) {
                    if (name != attribute) continue;
                    for (const auto& token : tokenize(value)) bag.add(token);
                }
            }
        }
    }
    return bag;
}

std::string cache_key(char side, Grouping grouping, const std::string& merchant,
                      const std::string& category, const std::string& attribute) {
    std::string key(1, side);
    switch (grouping) {
        case Grouping::MerchantCategory:
            key += "mc\x1f" + merchant + "\x1f" + category;
            break;
        case Grouping::Category:
            key += "c\x1f" + category;
            break;
        case Grouping::Merchant:
            key += "m\x1f" + merchant;
            break;
    }
    key += "\x1f" + attribute;
    return key;
}

}  // namespace

BagPair group_bags(const corpus::Corpus& corpus, const std::string& catalog_attribute,
                   const std::string& offer_attribute, const std::string& merchant,
                   const std::string& category, Grouping grouping, FeatureMode mode) {
    const auto& offers = group_offers(corpus, grouping, merchant, category);
    BagPair bags;
    bags.product_side = build_product_bag(corpus, offers, catalog_attribute, mode);
    bags.offer_side = build_offer_bag(corpus, offers, offer_attribute, mode);
    return bags;
}

const std::array<const char*, 6>& FeatureVector::names() {
    static const std::array<const char*, 6> kNames = {"js_mc", "js_c",       "js_m",
                                                      "jaccard_mc", "jaccard_c", "jaccard_m"};
    return kNames;
}

const TokenBag& FeatureComputer::offer_bag(Grouping grouping, const std::string& merchant,
                                           const std::string& category,
                                           const std::string& attribute) {
    std::string key = cache_key('o', grouping, merchant, category, attribute);
    auto it = cache_.find(key);
    if (it == cache_.end()) {
        it = cache_
                 .emplace(std::move(key),
                          build_offer_bag(corpus_, group_offers(corpus_, grouping, merchant, category),
                                          attribute, mode_))
                 .first;
    }
    return it->second;
}

const TokenBag& FeatureComputer::product_bag(Grouping grouping, const std::string& merchant,
                                             const std::string& category,
                                             const std::string& attribute) {
    std::string key = cache_key('p', grouping, merchant, category, attribute);
    auto it = cache_.find(key);
    if (it == cache_.end()) {
        it = cache_
                 .emplace(std::move(key),
                          build_product_bag(corpus_, group_offers(corpus_, grouping, merchant, category),
                                            attribute, mode_))
                 .first;
    }
    return it->second;
}

FeatureVector FeatureComputer::compute(const std::string& catalog_attribute,
                                       const std::string& offer_attribute,
                                       const std::string& merchant, const std::string& category) {
    FeatureVector fv;
    struct Slot {
        Grouping grouping;
        double FeatureVector::*js;
        double FeatureVector::*jac;
        bool FeatureVector::*flag;
    };
    static const Slot kSlots[] = {
        {Grouping::MerchantCategory, &FeatureVector::js_mc, &FeatureVector::jaccard_mc,
         &FeatureVector::has_mc},
        {Grouping::Category, &FeatureVector::js_c, &FeatureVector::jaccard_c, &FeatureVector::has_c},
        {Grouping::Merchant, &FeatureVector::js_m, &FeatureVector::jaccard_m, &FeatureVector::has_m},
    };
    for (const Slot& slot : kSlots) {
        const TokenBag& products = product_bag(slot.grouping, merchant, category, catalog_attribute);
        const TokenBag& offers = offer_bag(slot.grouping, merchant, category, offer_attribute);
        if (products.empty() || offers.empty()) {
            fv.*slot.js = kLn2;
            fv.*slot.jac = 0.0;
            fv.*slot.flag = false;
        } else {
            fv.*slot.js = js_divergence(products, offers);
            fv.*slot.jac = jaccard(products, offers);
            fv.*slot.flag = true;
        }
    }
    return fv;
}

FeatureVector feature_vector(const corpus::Corpus& corpus, const std::string& catalog_attribute,
                             const std::string& offer_attribute, const std::string& merchant,
                             const std::string& category, FeatureMode mode) {
    FeatureComputer computer(corpus, mode);
    return computer.compute(catalog_attribute, offer_attribute, merchant, category);
}

}  // namespace prodsynth::distsim
