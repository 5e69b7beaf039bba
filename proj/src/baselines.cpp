#include "prodsynth/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "prodsynth/distsim.hpp"
#include "prodsynth/errors.hpp"
#include "prodsynth/jsonl.hpp"

namespace prodsynth::baselines {

namespace {

constexpr double kSecondaryThreshold = 0.9;

// Cosine-normalized ln(tf+1)*idf weights per distinct token.
std::map<std::string, double> weight_map(const std::vector<std::string>& tokens,
                                         const TfidfStats& stats) {
    std::map<std::string, std::size_t> tf;
    for (const auto& token : tokens) ++tf[token];
    std::map<std::string, double> weights;
    double norm = 0.0;
    for (const auto& [token, count] : tf) {
        double w = std::log(1.0 + static_cast<double>(count)) * stats.idf(token);
        weights[token] = w;
        norm += w * w;
    }
    norm = std::sqrt(norm);
    if (norm > 0.0)
        for (auto& [token, w] : weights) w /= norm;
    return weights;
}

void sort_canonical(std::vector<matcher::Correspondence>& correspondences) {
    std::sort(correspondences.begin(), correspondences.end(),
              [](const matcher::Correspondence& a, const matcher::Correspondence& b) {
                  return a.candidate < b.candidate;
              });
}

}  // namespace

double jaro_winkler(const std::string& a, const std::string& b) {
    if (a == b) return 1.0;
    const std::size_t la = a.size(), lb = b.size();
    if (la == 0 || lb == 0) return 0.0;

    const std::size_t longest = std::max(la, lb);
    const std::size_t window = longest / 2 > 0 ? longest / 2 - 1 : 0;
    std::vector<char> matched_a(la, 0), matched_b(lb, 0);
    std::size_t matches = 0;
    for (std::size_t i = 0; i < la; ++i) {
        const std::size_t lo = i > window ? i - window : 0;
        const std::size_t hi = std::min(lb, i + window + 1);
        for (std::size_t j = lo; j < hi; ++j) {
            if (matched_b[j] || a[i] != b[j]) continue;
            matched_a[i] = matched_b[j] = 1;
            ++matches;
            break;
        }
    }
    if (matches == 0) return 0.0;

    std::size_t half_transpositions = 0;
    for (std::size_t i = 0, k = 0; i < la; ++i) {
        if (!matched_a[i]) continue;
        while (!matched_b[k]) ++k;
        if (a[i] != b[k]) ++half_transpositions;
        ++k;
    }
    const double m = static_cast<double>(matches);
    const double t = static_cast<double>(half_transpositions) / 2.0;
    const double jaro = (m / static_cast<double>(la) + m / static_cast<double>(lb) + (m - t) / m) / 3.0;

    std::size_t prefix = 0;
    while (prefix < 4 && prefix < la && prefix < lb && a[prefix] == b[prefix]) ++prefix;
    return jaro + static_cast<double>(prefix) * 0.1 * (1.0 - jaro);
}

double TfidfStats::idf(const std::string& token) const {
    auto it = document_frequency.find(token);
    std::size_t df = (it == document_frequency.end() || it->second == 0) ? 1 : it->second;
    const double n = static_cast<double>(std::max<std::size_t>(corpus_size, 1));
    return std::log(1.0 + n / static_cast<double>(df));
}

TfidfStats build_tfidf_stats(const std::vector<std::string>& values) {
    TfidfStats stats;
    stats.corpus_size = values.size();
    for (const auto& value : values) {
        auto tokens = distsim::tokenize(value);
        std::set<std::string> distinct(tokens.begin(), tokens.end());
        for (const auto& token : distinct) ++stats.document_frequency[token];
    }
    return stats;
}

double soft_tfidf(const std::string& a, const std::string& b, const TfidfStats& stats) {
    const auto tokens_a = distsim::tokenize(a);
    const auto tokens_b = distsim::tokenize(b);
    if (tokens_a.empty() && tokens_b.empty()) return 1.0;
    if (tokens_a.empty() || tokens_b.empty()) return 0.0;

    const auto weights_a = weight_map(tokens_a, stats);
    const auto weights_b = weight_map(tokens_b, stats);
    double sum = 0.0;
    for (const auto& [token_a, weight_a] : weights_a) {
        double best = 0.0;
        double partner_weight = 0.0;
        for (const auto& [token_b, weight_b] : weights_b) {
            const double sim = jaro_winkler(token_a, token_b);
            if (sim > best) {
                best = sim;
                partner_weight = weight_b;
            }
        }
        if (best > kSecondaryThreshold) sum += weight_a * partner_weight * best;
    }
    return std::min(sum, 1.0);
}

double SimilarityMatrix::at(const std::string& offer_attribute,
                            const std::string& catalog_attribute) const {
    const auto row = std::find(offer_attributes.begin(), offer_attributes.end(), offer_attribute);
    const auto col =
        std::find(catalog_attributes.begin(), catalog_attributes.end(), catalog_attribute);
    if (row == offer_attributes.end() || col == catalog_attributes.end())
        throw std::out_of_range("attribute pair not present in similarity matrix");
    return cells[static_cast<std::size_t>(row - offer_attributes.begin())]
                [static_cast<std::size_t>(col - catalog_attributes.begin())];
}

SimilarityMatrix dumas_merchant_matrix(const corpus::Corpus& corpus, const std::string& merchant,
                                       const std::string& category) {
    struct MatchedPair {
        const corpus::Offer* offer;
        const corpus::Product* product;
    };
    std::vector<MatchedPair> pairs;
    std::set<std::string> seen_products;
    std::vector<std::string> corpus_values;
    for (std::size_t idx : corpus.offer_indices_by_merchant_category(merchant, category)) {
        const auto& offer = corpus.offer_at(idx);
        const auto* product = corpus.matched_product(offer.offer_id);
        if (product == nullptr) continue;
        pairs.push_back({&offer, product});
        for (const auto& [attr, value] : offer.spec) corpus_values.push_back(value);
        if (seen_products.insert(product->product_id).second)
            for (const auto& [attr, value] : product->spec) corpus_values.push_back(value);
    }
    if (pairs.empty())
        throw DegenerateDataError("no matches for merchant '" + merchant + "' in category '" +
                                  category + "'");

    std::set<std::string> row_names, col_names;
    for (const auto& pair : pairs) {
        for (const auto& [attr, value] : pair.offer->spec) row_names.insert(attr);
        for (const auto& [attr, value] : pair.product->spec) col_names.insert(attr);
    }

    SimilarityMatrix matrix;
    matrix.merchant = merchant;
    matrix.category = category;
    matrix.offer_attributes.assign(row_names.begin(), row_names.end());
    matrix.catalog_attributes.assign(col_names.begin(), col_names.end());
    matrix.cells.assign(matrix.offer_attributes.size(),
                        std::vector<double>(matrix.catalog_attributes.size(), 0.0));

    std::map<std::string, std::size_t> row_of, col_of;
    for (std::size_t i = 0; i < matrix.offer_attributes.size(); ++i)
        row_of[matrix.offer_attributes[i]] = i;
    for (std::size_t j = 0; j < matrix.catalog_attributes.size(); ++j)
        col_of[matrix.catalog_attributes[j]] = j;

    const TfidfStats stats = build_tfidf_stats(corpus_values);
    for (const auto& pair : pairs)
        for (const auto& [offer_attr, offer_value] : pair.offer->spec)
            for (const auto& [product_attr, product_value] : pair.product->spec)
                matrix.cells[row_of[offer_attr]][col_of[product_attr]] +=
                    soft_tfidf(offer_value, product_value, stats);
    const double t = static_cast<double>(pairs.size());
    for (auto& row : matrix.cells)
        for (double& cell : row) cell /= t;
    return matrix;
}

std::vector<std::pair<std::size_t, std::size_t>> max_weight_assignment(
    const std::vector<std::vector<double>>& weights) {
    const std::size_t rows = weights.size();
    std::size_t cols = 0;
    for (const auto& row : weights) cols = std::max(cols, row.size());
    if (rows == 0 || cols == 0) return {};

    const std::size_t dim = std::max(rows, cols);
    std::vector<std::vector<double>> cost(dim + 1, std::vector<double>(dim + 1, 0.0));
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < weights[i].size(); ++j) cost[i + 1][j + 1] = -weights[i][j];

    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(dim + 1, 0.0), v(dim + 1, 0.0);
    std::vector<std::size_t> assigned_row(dim + 1, 0), way(dim + 1, 0);
    for (std::size_t i = 1; i <= dim; ++i) {
        assigned_row[0] = i;
        std::size_t j0 = 0;
        std::vector<double> minv(dim + 1, inf);
        std::vector<char> used(dim + 1, 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = assigned_row[j0];
            std::size_t j1 = 0;
            double delta = inf;
            for (std::size_t j = 1; j <= dim; ++j) {
                if (used[j]) continue;
                const double cur = cost[i0][j] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= dim; ++j) {
                if (used[j]) {
                    u[assigned_row[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (assigned_row[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            assigned_row[j0] = assigned_row[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t j = 1; j <= dim; ++j) {
        const std::size_t i = assigned_row[j];
        if (i == 0 || i > rows || j > cols) continue;
        if (j - 1 < weights[i - 1].size()) out.emplace_back(i - 1, j - 1);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<matcher::Correspondence> dumas_match(const SimilarityMatrix& matrix) {
    std::vector<matcher::Correspondence> out;
    for (const auto& [row, col] : max_weight_assignment(matrix.cells)) {
        const double weight = matrix.cells[row][col];
        if (weight <= 0.0) continue;
        matcher::Correspondence c;
        c.candidate.catalog_attribute = matrix.catalog_attributes[col];
        c.candidate.offer_attribute = matrix.offer_attributes[row];
        c.candidate.merchant = matrix.merchant;
        c.candidate.category = matrix.category;
        c.score = weight;
        out.push_back(std::move(c));
    }
    sort_canonical(out);
    return out;
}

std::vector<matcher::Correspondence> dumas_correspondences(const corpus::Corpus& corpus) {
    std::vector<matcher::Correspondence> out;
    for (const auto& [merchant, category] : corpus.matched_merchant_categories()) {
        auto found = dumas_match(dumas_merchant_matrix(corpus, merchant, category));
        out.insert(out.end(), std::make_move_iterator(found.begin()),
                   std::make_move_iterator(found.end()));
    }
    sort_canonical(out);
    return out;
}

NBModel nb_train(const corpus::Corpus& corpus, const std::string& category) {
    const auto& indices = corpus.product_indices_by_category(category);
    if (indices.empty())
        throw DegenerateDataError("category '" + category + "' has no products to train on");

    NBModel model;
    model.category = category;
    for (std::size_t idx : indices) {
        const auto& product = corpus.product_at(idx);
        for (const auto& [attr, value] : product.spec) {
            ++model.class_counts[attr];
            auto& counts = model.term_counts[attr];
            for (const auto& token : distsim::tokenize(value)) {
                ++counts[token];
                ++model.class_term_totals[attr];
                model.vocabulary.insert(token);
            }
        }
    }
    for (const auto& [attr, count] : model.class_counts) model.classes.push_back(attr);
    if (model.classes.empty())
        throw DegenerateDataError("category '" + category + "' has no attribute values");
    return model;
}

std::map<std::string, double> nb_posteriors(const NBModel& model, const std::string& value) {
    if (model.classes.empty()) return {};
    double product_total = 0.0;
    for (const auto& [attr, count] : model.class_counts)
        product_total += static_cast<double>(count);

    const auto tokens = distsim::tokenize(value);
    const double vocab = static_cast<double>(model.vocabulary.size());
    std::map<std::string, double> log_posts;
    double max_log = -std::numeric_limits<double>::infinity();
    for (const auto& attr : model.classes) {
        double lp = std::log(static_cast<double>(model.class_counts.at(attr)) / product_total);
        if (vocab > 0.0) {
            const auto counts_it = model.term_counts.find(attr);
            const auto total_it = model.class_term_totals.find(attr);
            const double denom =
                (total_it == model.class_term_totals.end() ? 0.0
                                                           : static_cast<double>(total_it->second)) +
                vocab;
            for (const auto& token : tokens) {
                double count = 0.0;
                if (counts_it != model.term_counts.end()) {
                    const auto it = counts_it->second.find(token);
                    if (it != counts_it->second.end()) count = static_cast<double>(it->second);
                }
                lp += std::log((count + 1.0) / denom);
            }
        }
        log_posts[attr] = lp;
        max_log = std::max(max_log, lp);
    }

    double z = 0.0;
    for (auto& [attr, lp] : log_posts) {
        lp = std::exp(lp - max_log);
        z += lp;
    }
    for (auto& [attr, lp] : log_posts) lp /= z;
    return log_posts;
}

double nb_score(const NBModel& model, const corpus::Corpus& corpus,
                const std::string& catalog_attribute, const std::string& offer_attribute,
                const std::string& merchant) {
    std::set<std::string> values;
    for (std::size_t idx : corpus.offer_indices_by_merchant_category(merchant, model.category))
        for (const auto& [attr, value] : corpus.offer_at(idx).spec)
            if (attr == offer_attribute) values.insert(value);
    if (values.empty()) return 0.0;

    double sum = 0.0;
    for (const auto& value : values) {
        const auto posts = nb_posteriors(model, value);
        const auto it = posts.find(catalog_attribute);
        if (it != posts.end()) sum += it->second;
    }
    return sum / static_cast<double>(values.size());
}

std::vector<matcher::Correspondence> nb_correspondences(const corpus::Corpus& corpus) {
    std::vector<matcher::Correspondence> out;
    for (const auto& schema : corpus.schemas()) {
        const std::string& category = schema.category;
        if (corpus.product_indices_by_category(category).empty()) continue;
        if (corpus.offer_indices_by_category(category).empty()) continue;
        const NBModel model = nb_train(corpus, category);
        if (model.classes.empty()) continue;

        std::set<std::string> merchants;
        for (std::size_t idx : corpus.offer_indices_by_category(category))
            merchants.insert(corpus.offer_at(idx).merchant);

        for (const auto& merchant : merchants) {
            std::map<std::string, std::set<std::string>> values_by_attr;
            for (std::size_t idx : corpus.offer_indices_by_merchant_category(merchant, category))
                for (const auto& [attr, value] : corpus.offer_at(idx).spec)
                    values_by_attr[attr].insert(value);
            if (values_by_attr.empty()) continue;

            std::map<std::string, std::map<std::string, double>> posterior_cache;
            // scores[class][offer attribute]
            std::map<std::string, std::map<std::string, double>> scores;
            for (const auto& [attr, values] : values_by_attr) {
                std::map<std::string, double> sums;
                for (const auto& value : values) {
                    auto cached = posterior_cache.find(value);
                    if (cached == posterior_cache.end())
                        cached = posterior_cache.emplace(value, nb_posteriors(model, value)).first;
                    for (const auto& [cls, p] : cached->second) sums[cls] += p;
                }
                for (const auto& [cls, total] : sums)
                    scores[cls][attr] = total / static_cast<double>(values.size());
            }

            for (const auto& cls : model.classes) {
                const auto& by_attr = scores.at(cls);
                std::string best_attr;
                double best = -1.0;
                bool tied = false;
                for (const auto& [attr, score] : by_attr) {
                    if (score > best) {
                        best = score;
                        best_attr = attr;
                        tied = false;
                    } else if (score == best) {
                        tied = true;
                    }
                }
                if (tied || best_attr.empty()) continue;
                matcher::Correspondence c;
                c.candidate.catalog_attribute = cls;
                c.candidate.offer_attribute = best_attr;
                c.candidate.merchant = merchant;
                c.candidate.category = category;
                c.score = best;
                out.push_back(std::move(c));
            }
        }
    }
    sort_canonical(out);
    return out;
}

void write_correspondences(const std::filesystem::path& path,
                           const std::vector<matcher::Correspondence>& correspondences,
                           const std::string& method) {
    if (method != "dumas" && method != "nb")
        throw ValidationError("unknown baseline method '" + method + "'");
    jsonl::Writer out(path);
    for (const auto& c : correspondences) {
        jsonl::json j;
        j["catalog"] = c.candidate.catalog_attribute;
        j["offer"] = c.candidate.offer_attribute;
        j["merchant"] = c.candidate.merchant;
        j["category"] = c.candidate.category;
        j["score"] = c.score;
        j["method"] = method;
        out.write(j);
    }
}

}  // namespace prodsynth::baselines
