#include "prodsynth/matcher.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <tuple>

#include "prodsynth/errors.hpp"
#include "prodsynth/jsonl.hpp"
#include "prodsynth/text.hpp"

namespace prodsynth::matcher {

bool CandidateTuple::is_name_identity() const {
    return text::same_name(catalog_attribute, offer_attribute);
}

std::vector<CandidateTuple> generate_candidates(const corpus::Corpus& corpus) {
    // Catalog attributes present in at least one matched product, per category.
    std::map<std::string, std::set<std::string>> catalog_attrs;
    for (const auto& match : corpus.matches()) {
        const corpus::Product* product = corpus.matched_product(match.offer_id);
        auto& attrs = catalog_attrs[product->category];
        for (const auto& [name, value] : product->spec) attrs.insert(name);
    }

    std::vector<CandidateTuple> candidates;
    for (const auto& [merchant, category] : corpus.matched_merchant_categories()) {
        std::set<std::string> offer_attrs;
        for (std::size_t idx : corpus.offer_indices_by_merchant_category(merchant, category)) {
            const corpus::Offer& offer = corpus.offer_at(idx);
            if (!corpus.offer_is_matched(offer.offer_id)) continue;
            for (const auto& [name, value] : offer.spec) offer_attrs.insert(name);
        }
        const auto& product_attrs = catalog_attrs[category];
        for (const auto& ap : product_attrs)
            for (const auto& ao : offer_attrs)
                candidates.push_back(CandidateTuple{ap, ao, merchant, category});
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    return candidates;
}

std::vector<distsim::FeatureVector> compute_features(const corpus::Corpus& corpus,
                                                     const std::vector<CandidateTuple>& candidates,
                                                     distsim::FeatureMode mode) {
    distsim::FeatureComputer computer(corpus, mode);
    std::vector<distsim::FeatureVector> features;
    features.reserve(candidates.size());
    for (const auto& c : candidates)
        features.push_back(
            computer.compute(c.catalog_attribute, c.offer_attribute, c.merchant, c.category));
    return features;
}

std::vector<LabeledExample> build_training_set(
    const std::vector<CandidateTuple>& candidates,
    const std::vector<distsim::FeatureVector>& features) {
    if (candidates.size() != features.size())
        throw ValidationError("candidate/feature count mismatch");

    // Catalog attributes that occur as a name identity, keyed by (M, C).
    std::map<std::pair<std::string, std::string>, std::set<std::string>> identity_attrs;
    for (const auto& c : candidates) {
        if (c.is_name_identity())
            identity_attrs[{c.merchant, c.category}].insert(
                text::normalized_name(c.catalog_attribute));
    }

    std::vector<LabeledExample> examples;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const auto& c = candidates[i];
        if (c.is_name_identity()) {
            examples.push_back({c, features[i], 1});
            continue;
        }
        auto it = identity_attrs.find({c.merchant, c.category});
        if (it != identity_attrs.end() &&
            it->second.count(text::normalized_name(c.catalog_attribute)))
            examples.push_back({c, features[i], 0});
    }
    return examples;
}

namespace {

double sigmoid(double s) { return 1.0 / (1.0 + std::exp(-s)); }

// ln(1 + e^x) without overflow.
double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

struct Standardized {
    std::vector<std::array<double, 6>> rows;
    std::vector<double> means;
    std::vector<double> stds;
};

Standardized standardize(const std::vector<LabeledExample>& examples) {
    constexpr std::size_t d = 6;
    const double n = static_cast<double>(examples.size());
    Standardized out;
    out.means.assign(d, 0.0);
    out.stds.assign(d, 0.0);
    for (const auto& ex : examples) {
        auto v = ex.features.values();
        for (std::size_t j = 0; j < d; ++j) out.means[j] += v[j];
    }
    for (auto& m : out.means) m /= n;
    for (const auto& ex : examples) {
        auto v = ex.features.values();
        for (std::size_t j = 0; j < d; ++j) {
            const double dev = v[j] - out.means[j];
            out.stds[j] += dev * dev;
        }
    }
    for (auto& s : out.stds) {
        s = std::sqrt(s / n);
        if (s <= 0.0) s = 1.0;
    }
    out.rows.reserve(examples.size());
    for (const auto& ex : examples) {
        auto v = ex.features.values();
        std::array<double, 6> z;
        for (std::size_t j = 0; j < d; ++j) z[j] = (v[j] - out.means[j]) / out.stds[j];
        out.rows.push_back(z);
    }
    return out;
}

// Mean log-likelihood minus (lambda/2)|w|^2; the objective being ascended.
double objective(const Standardized& data, const std::vector<int>& labels,
                 const std::vector<double>& w, double b, double lambda) {
    double ll = 0.0;
    for (std::size_t i = 0; i < data.rows.size(); ++i) {
        double s = b;
        for (std::size_t j = 0; j < 6; ++j) s += w[j] * data.rows[i][j];
        // y ln sigma(s) + (1-y) ln(1-sigma(s)) = y s - softplus(s)
        ll += labels[i] * s - softplus(s);
    }
    ll /= static_cast<double>(data.rows.size());
    double penalty = 0.0;
    for (double wj : w) penalty += wj * wj;
    return ll - 0.5 * lambda * penalty;
}

}  // namespace

LogisticModel train(const std::vector<LabeledExample>& examples, const TrainOptions& options) {
    if (examples.empty()) throw DegenerateDataError("training set is empty");
    std::vector<int> labels;
    labels.reserve(examples.size());
    std::size_t positives = 0;
    for (const auto& ex : examples) {
        labels.push_back(ex.label);
        positives += static_cast<std::size_t>(ex.label);
    }
    if (positives == 0 || positives == examples.size())
        throw DegenerateDataError("degenerate training set: only one class present");

    const Standardized data = standardize(examples);
    const double n = static_cast<double>(examples.size());
    const double lambda = options.lambda;

    std::vector<double> w(6, 0.0);
    double b = 0.0;

    for (std::size_t iter = 0; iter < options.max_iterations; ++iter) {
        std::vector<double> grad_w(6, 0.0);
        double grad_b = 0.0;
        for (std::size_t i = 0; i < data.rows.size(); ++i) {
            double s = b;
            for (std::size_t j = 0; j < 6; ++j) s += w[j] * data.rows[i][j];
            const double residual = static_cast<double>(labels[i]) - sigmoid(s);
            for (std::size_t j = 0; j < 6; ++j) grad_w[j] += residual * data.rows[i][j];
            grad_b += residual;
        }
        double grad_norm_sq = 0.0;
        double max_abs = 0.0;
        for (std::size_t j = 0; j < 6; ++j) {
            grad_w[j] = grad_w[j] / n - lambda * w[j];
            grad_norm_sq += grad_w[j] * grad_w[j];
            max_abs = std::max(max_abs, std::abs(grad_w[j]));
        }
        grad_b /= n;
        grad_norm_sq += grad_b * grad_b;
        max_abs = std::max(max_abs, std::abs(grad_b));
        if (max_abs < options.tolerance) break;

        // Backtracking line search along the gradient (Armijo, c = 1e-4).
        const double base = objective(data, labels, w, b, lambda);
        double step = 1.0;
        std::vector<double> w_next(6);
        double b_next = b;
        for (int halvings = 0; halvings < 60; ++halvings) {
            for (std::size_t j = 0; j < 6; ++j) w_next[j] = w[j] + step * grad_w[j];
            b_next = b + step * grad_b;
            if (objective(data, labels, w_next, b_next, lambda) >=
                base + 1e-4 * step * grad_norm_sq)
                break;
            step *= 0.5;
        }
        w = w_next;
        b = b_next;
    }

    LogisticModel model;
    const auto& names = distsim::FeatureVector::names();
    model.feature_names.assign(names.begin(), names.end());
    model.weights = std::move(w);
    model.bias = b;
    model.feature_means = data.means;
    model.feature_stds = data.stds;
    return model;
}

double LogisticModel::score(const std::array<double, 6>& features) const {
    double s = bias;
    for (std::size_t j = 0; j < 6; ++j)
        s += weights[j] * ((features[j] - feature_means[j]) / feature_stds[j]);
    return sigmoid(s);
}

Correspondence predict(const LogisticModel& model, const CandidateTuple& candidate,
                       const distsim::FeatureVector& features) {
    return Correspondence{candidate, model.score(features.values())};
}

std::vector<Correspondence> select_correspondences(std::vector<Correspondence> scored,
                                                   double threshold, bool resolve_conflicts) {
    std::vector<Correspondence> kept;
    for (auto& c : scored)
        if (c.score > threshold) kept.push_back(std::move(c));

    std::sort(kept.begin(), kept.end(), [](const Correspondence& a, const Correspondence& b) {
        return a.candidate < b.candidate;
    });

    if (!resolve_conflicts) return kept;

    // One catalog attribute per (offer attribute, merchant, category).
    std::map<std::tuple<std::string, std::string, std::string>, std::size_t> best;
    for (std::size_t i = 0; i < kept.size(); ++i) {
        const auto& c = kept[i].candidate;
        std::tuple<std::string, std::string, std::string> key{c.offer_attribute, c.merchant,
                                                              c.category};
        auto [it, inserted] = best.emplace(key, i);
        if (inserted) continue;
        const Correspondence& incumbent = kept[it->second];
        if (kept[i].score > incumbent.score ||
            (kept[i].score == incumbent.score &&
             c.catalog_attribute < incumbent.candidate.catalog_attribute))
            it->second = i;
    }
    std::set<std::size_t> winners;
    for (const auto& [key, idx] : best) winners.insert(idx);
    std::vector<Correspondence> resolved;
    resolved.reserve(winners.size());
    for (std::size_t idx : winners) resolved.push_back(std::move(kept[idx]));
    return resolved;
}

void save_model(const std::filesystem::path& path, const LogisticModel& model) {
    jsonl::json j;
    j["feature_names"] = model.feature_names;
    j["weights"] = model.weights;
    j["bias"] = model.bias;
    j["feature_means"] = model.feature_means;
    j["feature_stds"] = model.feature_stds;
    jsonl::Writer out(path);
    out.write(j);
}

LogisticModel load_model(const std::filesystem::path& path) {
    LogisticModel model;
    bool seen = false;
    jsonl::for_each_record(
        path,
        [&](const jsonl::json& j, std::size_t) {
            if (seen) throw ValidationError("model file holds more than one record");
            seen = true;
            for (const char* key : {"feature_names", "weights", "bias", "feature_means",
                                    "feature_stds"})
                if (!j.contains(key))
                    throw ValidationError(std::string("model file missing \"") + key + "\"");
            model.feature_names = j["feature_names"].get<std::vector<std::string>>();
            model.weights = j["weights"].get<std::vector<double>>();
            model.bias = j["bias"].get<double>();
            model.feature_means = j["feature_means"].get<std::vector<double>>();
            model.feature_stds = j["feature_stds"].get<std::vector<double>>();
        },
        [&](const std::string& why, std::size_t) -> bool {
            throw ValidationError("model file: " + why);
        });
    if (!seen) throw ValidationError("model file is empty");
    const std::size_t d = model.feature_names.size();
    if (model.weights.size() != d || model.feature_means.size() != d ||
        model.feature_stds.size() != d || d != 6)
        throw ValidationError("model file has inconsistent dimensions");
    for (double s : model.feature_stds)
        if (!(s > 0.0)) throw ValidationError("model file has a non-positive feature std");
    return model;
}

void write_correspondences(const std::filesystem::path& path,
                           const std::vector<Correspondence>& correspondences) {
    jsonl::Writer out(path);
    for (const auto& c : correspondences) {
        jsonl::json j;
        j["catalog"] = c.candidate.catalog_attribute;
        j["offer"] = c.candidate.offer_attribute;
        j["merchant"] = c.candidate.merchant;
        j["category"] = c.candidate.category;
        j["score"] = c.score;
        out.write(j);
    }
}

std::vector<Correspondence> load_correspondences(const std::filesystem::path& path) {
    std::vector<Correspondence> out;
    jsonl::for_each_record(
        path,
        [&](const jsonl::json& j, std::size_t line_no) {
            Correspondence c;
            c.candidate.catalog_attribute = jsonl::get_string(j, "catalog", true);
            c.candidate.offer_attribute = jsonl::get_string(j, "offer", true);
            c.candidate.merchant = jsonl::get_string(j, "merchant", true);
            c.candidate.category = jsonl::get_string(j, "category", true);
            if (!j.contains("score") || !j["score"].is_number())
                throw ValidationError("correspondence line " + std::to_string(line_no) +
                                      " lacks a numeric score");
            c.score = j["score"].get<double>();
            out.push_back(std::move(c));
        },
        [&](const std::string& why, std::size_t line_no) -> bool {
            throw ValidationError("correspondences line " + std::to_string(line_no) + ": " + why);
        });
    return out;
}

}  // namespace prodsynth::matcher
