#include "prodsynth/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "prodsynth/errors.hpp"
#include "prodsynth/rng.hpp"
#include "prodsynth/text.hpp"

namespace prodsynth::eval {

namespace {

constexpr const char* kKeyAttribute = "Model Part Number";

const std::set<std::string>& known_methods() {
    static const std::set<std::string> methods = {"ours",  "js_mc",      "jaccard_mc",  "dumas",
                                                  "nb",    "restricted", "unrestricted"};
    return methods;
}

std::string zero_pad(std::size_t value, std::size_t width) {
    std::string s = std::to_string(value);
    while (s.size() < width) s.insert(s.begin(), '0');
    return s;
}

std::size_t label_width(std::size_t count, std::size_t minimum) {
    return std::max(minimum, std::to_string(count == 0 ? 0 : count - 1).size());
}

std::string ascii_upper(std::string s) {
    for (char& ch : s)
        if (ch >= 'a' && ch <= 'z') ch = static_cast<char>(ch - 'a' + 'A');
    return s;
}

std::string join_tokens(const std::vector<std::string>& tokens) {
    std::string out;
    for (const auto& t : tokens) {
        if (!out.empty()) out += ' ';
        out += t;
    }
    return out;
}

std::string perturb_value(const std::string& value, Rng& rng) {
    switch (rng.bounded(3)) {
        case 0:
            return ascii_upper(value);
        case 1: {
            auto tokens = text::split_ws(value);
            std::reverse(tokens.begin(), tokens.end());
            return join_tokens(tokens);
        }
        default: {
            static const char* units[] = {"gb", "mhz", "rpm", "kg"};
            return value + " " + units[rng.bounded(4)];
        }
    }
}

// Key values may only change in case and punctuation so the normalized key
// survives.
std::string perturb_key(const std::string& value, Rng& rng) {
    if (rng.bounded(2) == 0) return text::casefold(value);
    std::string out;
    for (char ch : value)
        if (ch != '-') out += ch;
    return out;
}

void validate_config(const SynthConfig& c) {
    if (c.categories == 0 || c.merchants == 0 || c.attributes_per_category == 0 ||
        c.products_per_category == 0)
        throw ValidationError(
            "synthetic config needs at least one category, merchant, attribute, and product");
    if (c.offers_min == 0 || c.offers_max < c.offers_min)
        throw ValidationError("synthetic config needs 1 <= offers_min <= offers_max");
    if (c.value_vocab < 2) throw ValidationError("synthetic config needs value_vocab >= 2");
    const std::pair<const char*, double> rates[] = {{"match_fraction", c.match_fraction},
                                                    {"identity_prob", c.identity_prob},
                                                    {"perturbation_rate", c.perturbation_rate},
                                                    {"noise_rate", c.noise_rate},
                                                    {"attribute_drop_rate", c.attribute_drop_rate}};
    for (const auto& [name, rate] : rates)
        if (rate < 0.0 || rate > 1.0)
            throw ValidationError(std::string("synthetic config rate out of [0,1]: ") + name);
    if (c.identity_prob < 1.0 && c.synonym_pool == 0)
        throw ValidationError("synthetic config with identity_prob < 1 needs a synonym pool");
}

std::vector<pipeline::SynthesizedProduct> plant_products(const corpus::Corpus& corpus) {
    std::vector<pipeline::SynthesizedProduct> planted;
    planted.reserve(corpus.products().size());
    for (const auto& product : corpus.products()) {
        pipeline::SynthesizedProduct p;
        p.category = product.category;
        p.key_attribute = product.spec.empty() ? "" : product.spec.front().first;
        p.key = product.spec.empty() ? "" : text::normalize_key(product.spec.front().second);
        p.spec = product.spec;
        planted.push_back(std::move(p));
    }
    return planted;
}

GroundTruth assemble_truth(
    const corpus::Corpus& corpus,
    std::map<std::pair<std::string, std::string>, std::map<std::string, std::string>> synonyms,
    std::vector<corpus::MatchRecord> matches) {
    GroundTruth truth;
    truth.synonyms = std::move(synonyms);
    truth.matches = std::move(matches);
    truth.planted_products = plant_products(corpus);

    const auto candidates = matcher::generate_candidates(corpus);
    const std::set<matcher::CandidateTuple> candidate_set(candidates.begin(), candidates.end());
    for (const auto& [mc, mapping] : truth.synonyms)
        for (const auto& [attr, name] : mapping) {
            matcher::CandidateTuple tuple{attr, name, mc.first, mc.second};
            if (candidate_set.count(tuple)) truth.correspondences.insert(tuple);
        }

    if (!truth.matches.empty() && truth.correspondences.empty())
        throw Error("matched corpus generated without any discoverable correspondence");
    return truth;
}

jsonl::json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    jsonl::json j = jsonl::json::parse(buffer.str(), nullptr, false);
    if (j.is_discarded()) throw ValidationError("invalid JSON in " + path.string());
    return j;
}

std::string precision_label(double p) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%.2f", p);
    return buf;
}

}  // namespace

jsonl::json synth_config_to_json(const SynthConfig& c) {
    jsonl::json j;
    j["categories"] = c.categories;
    j["merchants"] = c.merchants;
    j["attributes_per_category"] = c.attributes_per_category;
    j["synonym_pool"] = c.synonym_pool;
    j["value_vocab"] = c.value_vocab;
    j["products_per_category"] = c.products_per_category;
    j["offers_min"] = c.offers_min;
    j["offers_max"] = c.offers_max;
    j["match_fraction"] = c.match_fraction;
    j["identity_prob"] = c.identity_prob;
    j["perturbation_rate"] = c.perturbation_rate;
    j["noise_rate"] = c.noise_rate;
    j["attribute_drop_rate"] = c.attribute_drop_rate;
    return j;
}

SynthConfig synth_config_from_json(const jsonl::json& j) {
    if (!j.is_object()) throw ValidationError("synthetic config must be a JSON object");
    SynthConfig c;
    const jsonl::json defaults = synth_config_to_json(c);
    for (const auto& [key, value] : j.items()) {
        if (!defaults.contains(key))
            throw ValidationError("unknown synthetic config field \"" + key + "\"");
        if (!value.is_number())
            throw ValidationError("synthetic config field \"" + key + "\" must be numeric");
    }
    auto size_field = [&](const char* key, std::size_t fallback) {
        return j.contains(key) ? j.at(key).get<std::size_t>() : fallback;
    };
    auto rate_field = [&](const char* key, double fallback) {
        return j.contains(key) ? j.at(key).get<double>() : fallback;
    };
    c.categories = size_field("categories", c.categories);
    c.merchants = size_field("merchants", c.merchants);
    c.attributes_per_category = size_field("attributes_per_category", c.attributes_per_category);
    c.synonym_pool = size_field("synonym_pool", c.synonym_pool);
    c.value_vocab = size_field("value_vocab", c.value_vocab);
    c.products_per_category = size_field("products_per_category", c.products_per_category);
    c.offers_min = size_field("offers_min", c.offers_min);
    c.offers_max = size_field("offers_max", c.offers_max);
    c.match_fraction = rate_field("match_fraction", c.match_fraction);
    c.identity_prob = rate_field("identity_prob", c.identity_prob);
    c.perturbation_rate = rate_field("perturbation_rate", c.perturbation_rate);
    c.noise_rate = rate_field("noise_rate", c.noise_rate);
    c.attribute_drop_rate = rate_field("attribute_drop_rate", c.attribute_drop_rate);
    return c;
}

void write_synth_config(const std::filesystem::path& path, const SynthConfig& config) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + path.string());
    out << synth_config_to_json(config).dump(2) << '\n';
}

SynthConfig load_synth_config(const std::filesystem::path& path) {
    return synth_config_from_json(read_json_file(path));
}

std::size_t GroundTruth::cross_name_count() const {
    std::size_t n = 0;
    for (const auto& tuple : correspondences)
        if (!tuple.is_name_identity()) ++n;
    return n;
}

SyntheticData generate_synthetic(const SynthConfig& config, std::uint64_t seed) {
    validate_config(config);
    Rng rng(seed);

    const std::size_t cat_w = label_width(config.categories, 2);
    const std::size_t mer_w = label_width(config.merchants, 2);
    const std::size_t prod_w = label_width(config.products_per_category, 4);

    std::vector<std::string> categories, merchants;
    for (std::size_t c = 0; c < config.categories; ++c)
        categories.push_back("category-" + zero_pad(c, cat_w));
    for (std::size_t m = 0; m < config.merchants; ++m)
        merchants.push_back("merchant-" + zero_pad(m, mer_w));

    auto attr_name = [&](std::size_t c, std::size_t k) -> std::string {
        if (k == 0) return kKeyAttribute;
        return "feature-" + zero_pad(c, cat_w) + "-" + zero_pad(k, 2);
    };
    auto value_token = [&](std::size_t c, std::size_t k, std::size_t t) {
        return "v" + zero_pad(c, cat_w) + "f" + zero_pad(k, 2) + "t" + zero_pad(t, 2);
    };

    std::map<std::pair<std::string, std::string>, std::map<std::string, std::string>> synonyms;
    for (std::size_t m = 0; m < config.merchants; ++m)
        for (std::size_t c = 0; c < config.categories; ++c)
            for (std::size_t k = 0; k < config.attributes_per_category; ++k) {
                const std::string attr = attr_name(c, k);
                std::string name = attr;
                if (!rng.bernoulli(config.identity_prob))
                    name = "alias-" + zero_pad(c, cat_w) + "-" + zero_pad(k, 2) + "-" +
                           std::to_string(rng.bounded(config.synonym_pool));
                synonyms[{merchants[m], categories[c]}][attr] = name;
            }

    corpus::Catalog catalog;
    for (std::size_t c = 0; c < config.categories; ++c) {
        corpus::CatalogSchema schema;
        schema.category = categories[c];
        for (std::size_t k = 0; k < config.attributes_per_category; ++k)
            schema.attributes.push_back(attr_name(c, k));
        schema.key_attributes = {kKeyAttribute};
        catalog.schemas.push_back(std::move(schema));
    }
    for (std::size_t c = 0; c < config.categories; ++c)
        for (std::size_t i = 0; i < config.products_per_category; ++i) {
            corpus::Product product;
            product.product_id = "prod-" + zero_pad(c, cat_w) + "-" + zero_pad(i, prod_w);
            product.category = categories[c];
            product.spec.emplace_back(kKeyAttribute,
                                      "MPN-" + zero_pad(c, cat_w) + "-" + zero_pad(i, prod_w));
            for (std::size_t k = 1; k < config.attributes_per_category; ++k) {
                std::vector<std::string> tokens;
                const std::size_t count = 1 + rng.bounded(2);
                for (std::size_t t = 0; t < count; ++t)
                    tokens.push_back(value_token(c, k, rng.bounded(config.value_vocab)));
                product.spec.emplace_back(attr_name(c, k), join_tokens(tokens));
            }
            catalog.products.push_back(std::move(product));
        }

    std::vector<corpus::Offer> offers;
    std::vector<corpus::MatchRecord> matches;
    std::size_t offer_counter = 0;
    for (std::size_t c = 0; c < config.categories; ++c)
        for (std::size_t i = 0; i < config.products_per_category; ++i) {
            const auto& product = catalog.products[c * config.products_per_category + i];
            const std::size_t count =
                config.offers_min + rng.bounded(config.offers_max - config.offers_min + 1);
            for (std::size_t n = 0; n < count; ++n) {
                const std::size_t m = rng.bounded(config.merchants);
                corpus::Offer offer;
                offer.offer_id = "offer-" + zero_pad(offer_counter++, 6);
                offer.merchant = merchants[m];
                offer.category = categories[c];
                offer.title = "Listing for " + product.product_id;
                offer.price = std::to_string(5 + rng.bounded(995)) + ".99";
                offer.currency = "USD";
                const auto& mapping = synonyms.at({merchants[m], categories[c]});
                for (std::size_t k = 0; k < config.attributes_per_category; ++k) {
                    const auto& [attr, value] = product.spec[k];
                    if (k > 0 && rng.bernoulli(config.attribute_drop_rate)) continue;
                    std::string v = value;
                    if (rng.bernoulli(config.perturbation_rate))
                        v = k == 0 ? perturb_key(v, rng) : perturb_value(v, rng);
                    offer.spec.emplace_back(mapping.at(attr), std::move(v));
                }
                if (rng.bernoulli(config.noise_rate)) {
                    const std::string junk_attr =
                        "xinfo-" + zero_pad(m, mer_w) + "-" + std::to_string(rng.bounded(4));
                    std::vector<std::string> tokens;
                    const std::size_t count_j = 1 + rng.bounded(2);
                    for (std::size_t t = 0; t < count_j; ++t)
                        tokens.push_back("junktok" + zero_pad(rng.bounded(40), 2));
                    offer.spec.emplace_back(junk_attr, join_tokens(tokens));
                }
                if (rng.bernoulli(config.match_fraction))
                    matches.push_back({offer.offer_id, product.product_id});
                offers.push_back(std::move(offer));
            }
        }

    corpus::Corpus corpus(std::move(catalog), std::move(offers));
    corpus.set_matches(matches);
    GroundTruth truth = assemble_truth(corpus, std::move(synonyms), std::move(matches));
    return {std::move(corpus), std::move(truth)};
}

SyntheticData generate_biased_synthetic(std::uint64_t seed) {
    constexpr std::size_t kCategories = 2;
    constexpr std::size_t kMerchants = 10;
    constexpr std::size_t kFamilies = 3;       // paired attributes per category
    constexpr std::size_t kHalf = 8;           // tokens per domain half
    constexpr std::size_t kProducts = 160;
    constexpr std::size_t kSynonyms = 2;
    constexpr double kIdentityProb = 0.3;
    constexpr double kDropRate = 0.1;
    constexpr double kMatchFraction = 0.7;
    const std::size_t attrs = 1 + 2 * kFamilies;

    Rng rng(seed);
    std::vector<std::string> categories, merchants;
    for (std::size_t c = 0; c < kCategories; ++c)
        categories.push_back("category-" + zero_pad(c, 2));
    for (std::size_t m = 0; m < kMerchants; ++m)
        merchants.push_back("merchant-" + zero_pad(m, 2));

    auto attr_name = [&](std::size_t c, std::size_t k) -> std::string {
        if (k == 0) return kKeyAttribute;
        return "feature-" + zero_pad(c, 2) + "-" + zero_pad(k, 2);
    };

    std::map<std::pair<std::string, std::string>, std::map<std::string, std::string>> synonyms;
    for (std::size_t m = 0; m < kMerchants; ++m)
        for (std::size_t c = 0; c < kCategories; ++c)
            for (std::size_t k = 0; k < attrs; ++k) {
                const std::string attr = attr_name(c, k);
                std::string name = attr;
                if (!rng.bernoulli(kIdentityProb))
                    name = "alias-" + zero_pad(c, 2) + "-" + zero_pad(k, 2) + "-" +
                           std::to_string(rng.bounded(kSynonyms));
                synonyms[{merchants[m], categories[c]}][attr] = name;
            }

    corpus::Catalog catalog;
    for (std::size_t c = 0; c < kCategories; ++c) {
        corpus::CatalogSchema schema;
        schema.category = categories[c];
        for (std::size_t k = 0; k < attrs; ++k) schema.attributes.push_back(attr_name(c, k));
        schema.key_attributes = {kKeyAttribute};
        catalog.schemas.push_back(std::move(schema));
    }
    for (std::size_t c = 0; c < kCategories; ++c)
        for (std::size_t i = 0; i < kProducts; ++i) {
            const std::size_t group = i % 2;
            corpus::Product product;
            product.product_id = "prod-" + zero_pad(c, 2) + "-" + zero_pad(i, 4);
            product.category = categories[c];
            product.spec.emplace_back(kKeyAttribute, "MPN-" + zero_pad(c, 2) + "-" + zero_pad(i, 4));
            for (std::size_t k = 1; k < attrs; ++k) {
                const std::size_t family = (k - 1) / 2;
                const std::size_t member = (k - 1) % 2;
                const std::size_t half = member == 0 ? group : 1 - group;
                std::vector<std::string> tokens;
                const std::size_t count = 1 + rng.bounded(2);
                for (std::size_t t = 0; t < count; ++t)
                    tokens.push_back("b" + zero_pad(c, 2) + "f" + std::to_string(family) + "t" +
                                     zero_pad(half * kHalf + rng.bounded(kHalf), 2));
                product.spec.emplace_back(attr_name(c, k), join_tokens(tokens));
            }
            catalog.products.push_back(std::move(product));
        }

    std::vector<corpus::Offer> offers;
    std::vector<corpus::MatchRecord> matches;
    std::size_t offer_counter = 0;
    for (std::size_t c = 0; c < kCategories; ++c)
        for (std::size_t i = 0; i < kProducts; ++i) {
            const auto& product = catalog.products[c * kProducts + i];
            const std::size_t group = i % 2;
            const std::size_t count = 2 + rng.bounded(4);
            for (std::size_t n = 0; n < count; ++n) {
                const std::size_t m = group + 2 * rng.bounded(kMerchants / 2);
                corpus::Offer offer;
                offer.offer_id = "offer-" + zero_pad(offer_counter++, 6);
                offer.merchant = merchants[m];
                offer.category = categories[c];
                offer.title = "Listing for " + product.product_id;
                offer.price = std::to_string(5 + rng.bounded(995)) + ".99";
                offer.currency = "USD";
                const auto& mapping = synonyms.at({merchants[m], categories[c]});
                for (std::size_t k = 0; k < attrs; ++k) {
                    const auto& [attr, value] = product.spec[k];
                    if (k > 0 && rng.bernoulli(kDropRate)) continue;
                    offer.spec.emplace_back(mapping.at(attr), value);
                }
                if (rng.bernoulli(kMatchFraction))
                    matches.push_back({offer.offer_id, product.product_id});
                offers.push_back(std::move(offer));
            }
        }

    corpus::Corpus corpus(std::move(catalog), std::move(offers));
    corpus.set_matches(matches);
    GroundTruth truth = assemble_truth(corpus, std::move(synonyms), std::move(matches));
    return {std::move(corpus), std::move(truth)};
}

void write_ground_truth(const std::filesystem::path& path, const GroundTruth& truth) {
    jsonl::json j;
    j["correspondences"] = jsonl::json::array();
    for (const auto& tuple : truth.correspondences) {
        jsonl::json t;
        t["catalog"] = tuple.catalog_attribute;
        t["offer"] = tuple.offer_attribute;
        t["merchant"] = tuple.merchant;
        t["category"] = tuple.category;
        j["correspondences"].push_back(std::move(t));
    }
    j["synonyms"] = jsonl::json::array();
    for (const auto& [mc, mapping] : truth.synonyms) {
        jsonl::json entry;
        entry["merchant"] = mc.first;
        entry["category"] = mc.second;
        entry["attributes"] = jsonl::json::object();
        for (const auto& [attr, name] : mapping) entry["attributes"][attr] = name;
        j["synonyms"].push_back(std::move(entry));
    }
    j["matches"] = jsonl::json::array();
    for (const auto& match : truth.matches) {
        jsonl::json m;
        m["offer"] = match.offer_id;
        m["product"] = match.product_id;
        j["matches"].push_back(std::move(m));
    }
    j["planted_products"] = jsonl::json::array();
    for (const auto& product : truth.planted_products) {
        jsonl::json p;
        p["category"] = product.category;
        p["key"] = product.key;
        p["key_attribute"] = product.key_attribute;
        p["spec"] = jsonl::json::object();
        for (const auto& [attr, value] : product.spec) p["spec"][attr] = value;
        j["planted_products"].push_back(std::move(p));
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

GroundTruth load_ground_truth(const std::filesystem::path& path) {
    const jsonl::json j = read_json_file(path);
    for (const char* key : {"correspondences", "synonyms", "matches", "planted_products"})
        if (!j.contains(key) || !j.at(key).is_array())
            throw ValidationError("ground truth file missing array \"" + std::string(key) + "\"");

    GroundTruth truth;
    for (const auto& t : j.at("correspondences")) {
        matcher::CandidateTuple tuple;
        tuple.catalog_attribute = jsonl::get_string(t, "catalog", true);
        tuple.offer_attribute = jsonl::get_string(t, "offer", true);
        tuple.merchant = jsonl::get_string(t, "merchant", true);
        tuple.category = jsonl::get_string(t, "category", true);
        truth.correspondences.insert(std::move(tuple));
    }
    for (const auto& entry : j.at("synonyms")) {
        const std::string merchant = jsonl::get_string(entry, "merchant", true);
        const std::string category = jsonl::get_string(entry, "category", true);
        if (!entry.contains("attributes") || !entry.at("attributes").is_object())
            throw ValidationError("ground truth synonym entry lacks an attributes object");
        auto& mapping = truth.synonyms[{merchant, category}];
        for (const auto& [attr, name] : entry.at("attributes").items()) {
            if (!name.is_string())
                throw ValidationError("ground truth synonym for \"" + attr + "\" must be a string");
            mapping[attr] = name.get<std::string>();
        }
    }
    for (const auto& m : j.at("matches"))
        truth.matches.push_back(
            {jsonl::get_string(m, "offer", true), jsonl::get_string(m, "product", true)});
    for (const auto& p : j.at("planted_products")) {
        pipeline::SynthesizedProduct product;
        product.category = jsonl::get_string(p, "category", true);
        product.key = jsonl::get_string(p, "key", true);
        product.key_attribute = jsonl::get_string(p, "key_attribute", true);
        if (!p.contains("spec") || !p.at("spec").is_object())
            throw ValidationError("ground truth planted product lacks a spec object");
        for (const auto& [attr, value] : p.at("spec").items()) {
            if (!value.is_string())
                throw ValidationError("ground truth planted value for \"" + attr +
                                      "\" must be a string");
            product.spec.emplace_back(attr, value.get<std::string>());
        }
        truth.planted_products.push_back(std::move(product));
    }
    return truth;
}

std::vector<double> theta_grid() {
    std::vector<double> thetas;
    thetas.reserve(100);
    for (int i = 0; i < 100; ++i) thetas.push_back(i / 100.0);
    return thetas;
}

MethodCurve precision_coverage(const std::vector<matcher::Correspondence>& scored,
                               const GroundTruth& truth, const std::vector<double>& thetas) {
    struct Item {
        double score;
        bool correct;
    };
    std::vector<Item> items;
    items.reserve(scored.size());
    for (const auto& c : scored) {
        if (c.candidate.is_name_identity()) continue;
        items.push_back({c.score, truth.correspondences.count(c.candidate) > 0});
    }

    std::vector<double> grid = thetas;
    std::sort(grid.begin(), grid.end());

    MethodCurve curve;
    curve.points.reserve(grid.size());
    for (double theta : grid) {
        CurvePoint point;
        point.theta = theta;
        std::size_t correct = 0;
        for (const auto& item : items) {
            if (item.score <= theta) continue;
            ++point.coverage;
            if (item.correct) ++correct;
        }
        if (point.coverage > 0)
            point.precision = static_cast<double>(correct) / static_cast<double>(point.coverage);
        curve.points.push_back(point);
    }
    return curve;
}

std::optional<std::size_t> coverage_at_precision(const MethodCurve& curve, double precision) {
    std::optional<std::size_t> best;
    for (const auto& point : curve.points) {
        if (!point.precision || *point.precision < precision - 1e-12) continue;
        if (!best || point.coverage > *best) best = point.coverage;
    }
    return best;
}

double relative_recall(double c_a, double c_b, double p) {
    (void)p;
    if (!(c_b > 0.0)) throw DegenerateDataError("relative recall needs a nonzero base coverage");
    if (c_a < 0.0) throw ValidationError("coverage cannot be negative");
    return c_a / c_b;
}

std::vector<matcher::Correspondence> single_feature_scores(
    const std::vector<matcher::CandidateTuple>& candidates,
    const std::vector<distsim::FeatureVector>& features, const std::string& feature) {
    if (candidates.size() != features.size())
        throw ValidationError("candidate and feature counts differ");
    const auto& names = distsim::FeatureVector::names();
    std::size_t index = names.size();
    for (std::size_t i = 0; i < names.size(); ++i)
        if (feature == names[i]) index = i;
    if (index == names.size())
        throw ValidationError("unknown similarity feature \"" + feature + "\"");
    const bool divergence = feature.rfind("js_", 0) == 0;

    std::vector<matcher::Correspondence> scored;
    scored.reserve(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        double value = features[i].values()[index];
        double score = divergence ? 1.0 - value / distsim::kLn2 : value;
        score = std::min(1.0, std::max(0.0, score));
        scored.push_back({candidates[i], score});
    }
    return matcher::select_correspondences(std::move(scored), 0.0, true);
}

jsonl::json ProductScore::to_json() const {
    jsonl::json j;
    j["synthesized"] = synthesized;
    j["matched_key"] = matched_key;
    j["attributes_compared"] = attributes_compared;
    j["attributes_correct"] = attributes_correct;
    j["fully_correct"] = fully_correct;
    j["attribute_precision"] = attribute_precision;
    j["product_precision"] = product_precision;
    return j;
}

ProductScore score_products(const std::vector<pipeline::SynthesizedProduct>& products,
                            const GroundTruth& truth) {
    std::map<std::pair<std::string, std::string>, const pipeline::SynthesizedProduct*> planted;
    for (const auto& p : truth.planted_products) planted[{p.category, p.key}] = &p;

    ProductScore score;
    for (const auto& product : products) {
        ++score.synthesized;
        const auto it = planted.find({product.category, product.key});
        if (it == planted.end()) continue;
        ++score.matched_key;
        std::map<std::string, std::string> expected;
        for (const auto& [attr, value] : it->second->spec)
            expected[attr] = text::collapse_ws(value);
        bool all_correct = true;
        for (const auto& [attr, value] : product.spec) {
            ++score.attributes_compared;
            const auto want = expected.find(attr);
            if (want != expected.end() && want->second == text::collapse_ws(value))
                ++score.attributes_correct;
            else
                all_correct = false;
        }
        if (all_correct) ++score.fully_correct;
    }
    if (score.attributes_compared > 0)
        score.attribute_precision = static_cast<double>(score.attributes_correct) /
                                    static_cast<double>(score.attributes_compared);
    if (score.synthesized > 0)
        score.product_precision =
            static_cast<double>(score.fully_correct) / static_cast<double>(score.synthesized);
    return score;
}

EvalReport score_pipeline(
    const std::vector<std::pair<std::string, std::vector<matcher::Correspondence>>>& outputs,
    const GroundTruth& truth, const std::filesystem::path& out_dir,
    const ProductScore* products) {
    if (outputs.empty()) throw ValidationError("no method outputs to score");
    std::set<std::string> seen;
    for (const auto& [method, scored] : outputs) {
        (void)scored;
        if (!known_methods().count(method))
            throw ValidationError("unknown method label \"" + method + "\"");
        if (!seen.insert(method).second)
            throw ValidationError("duplicate method label \"" + method + "\"");
    }

    EvalReport report;
    report.reference = seen.count("ours") ? "ours" : outputs.front().first;

    const auto thetas = theta_grid();
    const double precision_grid[] = {0.7, 0.8, 0.9};

    std::filesystem::create_directories(out_dir / "curves");
    for (const auto& [method, scored] : outputs) {
        MethodCurve curve = precision_coverage(scored, truth, thetas);
        curve.method = method;

        MethodSummary summary;
        summary.method = method;
        summary.outputs = scored.size();
        for (const auto& c : scored)
            if (!c.candidate.is_name_identity()) ++summary.evaluated;
        for (double p : precision_grid)
            summary.coverage_at_precision[precision_label(p)] = coverage_at_precision(curve, p);

        const auto csv_path = out_dir / "curves" / (method + ".csv");
        std::ofstream csv(csv_path, std::ios::binary);
        if (!csv) throw ValidationError("cannot write " + csv_path.string());
        csv << "theta,coverage,precision\n";
        for (const auto& point : curve.points) {
            char line[96];
            if (point.precision)
                std::snprintf(line, sizeof(line), "%.2f,%zu,%.6f\n", point.theta, point.coverage,
                              *point.precision);
            else
                std::snprintf(line, sizeof(line), "%.2f,%zu,\n", point.theta, point.coverage);
            csv << line;
        }

        report.curves.push_back(std::move(curve));
        report.summaries.push_back(std::move(summary));
    }

    const MethodSummary* reference = nullptr;
    for (const auto& summary : report.summaries)
        if (summary.method == report.reference) reference = &summary;
    for (double p : precision_grid) {
        const std::string label = precision_label(p);
        auto& row = report.relative_recall[label];
        const auto ref_cov = reference->coverage_at_precision.at(label);
        for (const auto& summary : report.summaries) {
            if (summary.method == report.reference) continue;
            const auto method_cov = summary.coverage_at_precision.at(label);
            if (ref_cov && method_cov && *method_cov > 0)
                row[summary.method] = relative_recall(static_cast<double>(*ref_cov),
                                                      static_cast<double>(*method_cov), p);
            else
                row[summary.method] = std::nullopt;
        }
    }

    jsonl::json j;
    j["reference"] = report.reference;
    j["truth"] = jsonl::json::object();
    j["truth"]["correspondences"] = truth.correspondences.size();
    j["truth"]["cross_name"] = truth.cross_name_count();
    j["truth"]["identities"] = truth.correspondences.size() - truth.cross_name_count();
    j["truth"]["planted_products"] = truth.planted_products.size();
    j["methods"] = jsonl::json::object();
    for (const auto& summary : report.summaries) {
        jsonl::json m;
        m["outputs"] = summary.outputs;
        m["evaluated"] = summary.evaluated;
        m["curve_file"] = "curves/" + summary.method + ".csv";
        m["coverage_at_precision"] = jsonl::json::object();
        for (const auto& [label, cov] : summary.coverage_at_precision) {
            if (cov)
                m["coverage_at_precision"][label] = *cov;
            else
                m["coverage_at_precision"][label] = nullptr;
        }
        j["methods"][summary.method] = std::move(m);
    }
    j["relative_recall"] = jsonl::json::object();
    for (const auto& [label, row] : report.relative_recall) {
        jsonl::json r = jsonl::json::object();
        for (const auto& [method, ratio] : row) {
            if (ratio)
                r[method] = *ratio;
            else
                r[method] = nullptr;
        }
        j["relative_recall"][label] = std::move(r);
    }
    if (products != nullptr) j["products"] = products->to_json();

    std::ofstream out(out_dir / "report.json", std::ios::binary);
    if (!out) throw ValidationError("cannot write " + (out_dir / "report.json").string());
    out << j.dump(2) << '\n';
    return report;
}

}  // namespace prodsynth::eval
