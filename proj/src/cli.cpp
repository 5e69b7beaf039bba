#include "prodsynth/cli.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "prodsynth/baselines.hpp"
#include "prodsynth/corpus.hpp"
#include "prodsynth/errors.hpp"
#include "prodsynth/eval.hpp"
#include "prodsynth/extract.hpp"
#include "prodsynth/matcher.hpp"
#include "prodsynth/pipeline.hpp"

namespace prodsynth::cli {

namespace {

const std::vector<std::string>& default_eval_methods() {
    static const std::vector<std::string> methods = {"ours", "js_mc", "jaccard_mc", "nb", "dumas"};
    return methods;
}

const std::set<std::string>& supported_eval_methods() {
    static const std::set<std::string> methods = {
        "ours", "js_mc", "jaccard_mc", "nb", "dumas", "restricted", "unrestricted"};
    return methods;
}

void require_path(const std::filesystem::path& path, const char* what) {
    if (path.empty()) throw ValidationError(std::string("no ") + what + " path configured");
    if (!std::filesystem::exists(path))
        throw ValidationError(std::string(what) + " not found: " + path.string());
}

std::filesystem::path prepare_out(const RunConfig& config) {
    if (config.out.empty()) throw ValidationError("no output directory configured");
    std::filesystem::create_directories(config.out);
    return config.out;
}

void write_report(const std::filesystem::path& out, const std::string& name,
                  const jsonl::json& j) {
    const auto path = out / name;
    std::ofstream file(path, std::ios::binary);
    if (!file) throw ValidationError("cannot write " + path.string());
    file << j.dump(2) << '\n';
}

corpus::Corpus load_corpus(const RunConfig& config) {
    require_path(config.catalog, "catalog");
    require_path(config.offers, "offers");
    require_path(config.matches, "matches");
    auto catalog = corpus::load_catalog(config.catalog, config.strict);
    auto offers = corpus::load_offers(config.offers, config.strict);
    corpus::Corpus corpus(std::move(catalog), std::move(offers));
    corpus.set_matches(corpus::load_matches(config.matches, corpus, config.strict));
    return corpus;
}

std::vector<matcher::Correspondence> classifier_scores(
    const std::vector<matcher::CandidateTuple>& candidates,
    const std::vector<distsim::FeatureVector>& features) {
    const auto training = matcher::build_training_set(candidates, features);
    const auto model = matcher::train(training);
    std::vector<matcher::Correspondence> scored;
    scored.reserve(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i)
        scored.push_back(matcher::predict(model, candidates[i], features[i]));
    return matcher::select_correspondences(std::move(scored), 0.0, true);
}

}  // namespace

jsonl::json run_config_to_json(const RunConfig& config) {
    jsonl::json j;
    j["catalog"] = config.catalog.string();
    j["offers"] = config.offers.string();
    j["matches"] = config.matches.string();
    j["pages"] = config.pages.string();
    j["out"] = config.out.string();
    j["theta"] = config.theta;
    j["unrestricted"] = config.unrestricted;
    j["strict"] = config.strict;
    j["seed"] = config.seed;
    return j;
}

RunConfig run_config_from_json(const jsonl::json& j) {
    if (!j.is_object()) throw ValidationError("run config must be a JSON object");
    RunConfig config;
    const jsonl::json known = run_config_to_json(config);
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (!known.contains(key)) throw ValidationError("unknown run config field \"" + key + "\"");
    }
    auto path_field = [&](const char* key, std::filesystem::path fallback) {
        if (!j.contains(key)) return fallback;
        if (!j.at(key).is_string())
            throw ValidationError(std::string("run config field \"") + key +
                                  "\" must be a string");
        return std::filesystem::path(j.at(key).get<std::string>());
    };
    config.catalog = path_field("catalog", {});
    config.offers = path_field("offers", {});
    config.matches = path_field("matches", {});
    config.pages = path_field("pages", {});
    config.out = path_field("out", config.out);
    if (j.contains("theta")) {
        if (!j.at("theta").is_number())
            throw ValidationError("run config field \"theta\" must be numeric");
        config.theta = j.at("theta").get<double>();
    }
    if (j.contains("seed")) {
        if (!j.at("seed").is_number())
            throw ValidationError("run config field \"seed\" must be numeric");
        config.seed = j.at("seed").get<std::uint64_t>();
    }
    for (const char* key : {"unrestricted", "strict"}) {
        if (!j.contains(key)) continue;
        if (!j.at(key).is_boolean())
            throw ValidationError(std::string("run config field \"") + key +
                                  "\" must be a boolean");
        (key == std::string("strict") ? config.strict : config.unrestricted) =
            j.at(key).get<bool>();
    }
    if (config.theta < 0.0 || config.theta > 1.0)
        throw ValidationError("run config theta must lie in [0,1]");
    return config;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    jsonl::json j = jsonl::json::parse(buffer.str(), nullptr, false);
    if (j.is_discarded()) throw ValidationError("invalid JSON in " + path.string());
    return run_config_from_json(j);
}

void cmd_extract(const RunConfig& config) {
    require_path(config.offers, "offers");
    require_path(config.pages, "page store");
    const auto out = prepare_out(config);

    corpus::LoadStats load_stats;
    const auto offers = corpus::load_offers(config.offers, config.strict, &load_stats);
    corpus::LoadStats enrich_stats;
    const auto enriched = extract::enrich_offers(offers, config.pages, &enrich_stats);
    corpus::write_offers(out / "offers.enriched.jsonl", enriched);

    std::size_t gained = 0;
    for (std::size_t i = 0; i < offers.size(); ++i)
        gained += enriched[i].spec.size() > offers[i].spec.size() ? 1 : 0;

    jsonl::json report;
    report["offers_in"] = offers.size();
    report["offers_skipped_on_load"] = load_stats.skipped;
    report["offers_enriched"] = gained;
    report["pages_unreadable"] = enrich_stats.skipped;
    report["output"] = "offers.enriched.jsonl";
    write_report(out, "extract-report.json", report);
}

void cmd_learn(const RunConfig& config) {
    const auto out = prepare_out(config);
    const auto corpus = load_corpus(config);

    const auto candidates = matcher::generate_candidates(corpus);
    if (candidates.empty())
        throw DegenerateDataError("no candidate tuples: the corpus has no matched offers");
    const auto mode =
        config.unrestricted ? distsim::FeatureMode::Unrestricted
                            : distsim::FeatureMode::MatchRestricted;
    const auto features = matcher::compute_features(corpus, candidates, mode);
    const auto training = matcher::build_training_set(candidates, features);
    std::size_t positives = 0;
    for (const auto& example : training) positives += example.label == 1 ? 1 : 0;

    const auto model = matcher::train(training);
    std::vector<matcher::Correspondence> scored;
    scored.reserve(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i)
        scored.push_back(matcher::predict(model, candidates[i], features[i]));
    const auto selected = matcher::select_correspondences(scored, config.theta, true);

    matcher::save_model(out / "model.json", model);
    matcher::write_correspondences(out / "correspondences.jsonl", selected);

    jsonl::json report;
    report["candidates"] = candidates.size();
    report["labeled"] = training.size();
    report["positives"] = positives;
    report["negatives"] = training.size() - positives;
    report["predicted"] = scored.size();
    report["selected"] = selected.size();
    report["theta"] = config.theta;
    report["feature_mode"] = config.unrestricted ? "unrestricted" : "match_restricted";
    write_report(out, "learn-report.json", report);
}

void cmd_synthesize(const RunConfig& config) {
    require_path(config.catalog, "catalog");
    require_path(config.offers, "offers");
    const auto out = prepare_out(config);
    require_path(out / "correspondences.jsonl", "correspondences");

    const auto catalog = corpus::load_catalog(config.catalog, config.strict);
    const auto offers = corpus::load_offers(config.offers, config.strict);
    const auto correspondences = matcher::load_correspondences(out / "correspondences.jsonl");

    pipeline::PipelineCounters counters;
    const auto products = pipeline::synthesize(offers, correspondences, catalog.schemas, &counters);
    pipeline::write_products(out / "products.jsonl", products);

    jsonl::json report = counters.to_json();
    report["correspondences"] = correspondences.size();
    report["output"] = "products.jsonl";
    write_report(out, "synthesize-report.json", report);
}

void cmd_generate(const RunConfig& config) {
    const auto out = prepare_out(config);
    const eval::SynthConfig synth;
    const auto data = eval::generate_synthetic(synth, config.seed);

    corpus::Catalog catalog;
    catalog.schemas = data.corpus.schemas();
    catalog.products = data.corpus.products();
    corpus::write_catalog(out / "catalog.jsonl", catalog);
    corpus::write_offers(out / "offers.jsonl", data.corpus.offers());
    corpus::write_matches(out / "matches.jsonl", data.corpus.matches());
    eval::write_ground_truth(out / "truth.json", data.truth);
    eval::write_synth_config(out / "synth-config.json", synth);

    jsonl::json report;
    report["seed"] = config.seed;
    report["products"] = data.corpus.products().size();
    report["offers"] = data.corpus.offers().size();
    report["matches"] = data.corpus.matches().size();
    report["correspondences"] = data.truth.correspondences.size();
    report["cross_name"] = data.truth.cross_name_count();
    report["files"] = {"catalog.jsonl", "offers.jsonl", "matches.jsonl", "truth.json",
                       "synth-config.json"};
    write_report(out, "generate-report.json", report);
}

void cmd_eval(const RunConfig& config, const std::vector<std::string>& methods) {
    if (methods.empty()) throw ValidationError("no evaluation methods requested");
    for (const auto& method : methods)
        if (!supported_eval_methods().count(method))
            throw ValidationError("unknown evaluation method \"" + method + "\"");

    const auto out = prepare_out(config);
    const auto corpus = load_corpus(config);
    const auto truth = eval::load_ground_truth(out / "truth.json");

    const bool wants_restricted_features =
        std::any_of(methods.begin(), methods.end(), [&](const std::string& m) {
            return m == "js_mc" || m == "jaccard_mc" || m == "restricted" ||
                   (m == "ours" && !config.unrestricted);
        });
    const bool wants_unrestricted_features =
        std::any_of(methods.begin(), methods.end(), [&](const std::string& m) {
            return m == "unrestricted" || (m == "ours" && config.unrestricted);
        });

    std::vector<matcher::CandidateTuple> candidates;
    std::vector<distsim::FeatureVector> restricted_features, unrestricted_features;
    if (wants_restricted_features || wants_unrestricted_features) {
        candidates = matcher::generate_candidates(corpus);
        if (candidates.empty())
            throw DegenerateDataError("no candidate tuples: the corpus has no matched offers");
        if (wants_restricted_features)
            restricted_features = matcher::compute_features(
                corpus, candidates, distsim::FeatureMode::MatchRestricted);
        if (wants_unrestricted_features)
            unrestricted_features = matcher::compute_features(
                corpus, candidates, distsim::FeatureMode::Unrestricted);
    }

    std::vector<std::pair<std::string, std::vector<matcher::Correspondence>>> outputs;
    for (const auto& method : methods) {
        if (method == "ours") {
            const auto& features =
                config.unrestricted ? unrestricted_features : restricted_features;
            outputs.emplace_back(method, classifier_scores(candidates, features));
        } else if (method == "restricted") {
            outputs.emplace_back(method, classifier_scores(candidates, restricted_features));
        } else if (method == "unrestricted") {
            outputs.emplace_back(method, classifier_scores(candidates, unrestricted_features));
        } else if (method == "js_mc" || method == "jaccard_mc") {
            outputs.emplace_back(
                method, eval::single_feature_scores(candidates, restricted_features, method));
        } else if (method == "nb") {
            outputs.emplace_back(method, baselines::nb_correspondences(corpus));
        } else {
            outputs.emplace_back(method, baselines::dumas_correspondences(corpus));
        }
    }

    eval::ProductScore product_score;
    bool products_scored = false;
    if (std::filesystem::exists(out / "products.jsonl")) {
        product_score = eval::score_products(pipeline::load_products(out / "products.jsonl"), truth);
        products_scored = true;
    }

    eval::score_pipeline(outputs, truth, out, products_scored ? &product_score : nullptr);

    jsonl::json report;
    report["methods"] = methods;
    report["candidates"] = candidates.size();
    report["products_scored"] = products_scored;
    report["report"] = "report.json";
    report["curves_dir"] = "curves";
    write_report(out, "eval-report.json", report);
}

int run_cli(const std::vector<std::string>& args, std::ostream& err) {
    CLI::App app{"Catalog product synthesis from merchant offers", "prodsynth"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    double theta = 0.0;
    std::uint64_t seed = 0;
    bool strict = false, unrestricted = false;
    std::vector<std::string> methods;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON run config");
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--theta", theta, "correspondence score threshold");
        sub->add_option("--seed", seed, "synthetic corpus seed");
        sub->add_flag("--strict", strict, "reject malformed records instead of skipping");
        sub->add_flag("--unrestricted", unrestricted,
                      "compute features over all offers and products");
    };

    add_common(app.add_subcommand("extract", "harvest stored pages into offer specs"));
    add_common(app.add_subcommand("learn", "train the matcher and select correspondences"));
    add_common(app.add_subcommand("synthesize", "reconcile, cluster, and fuse offers"));
    add_common(app.add_subcommand("generate", "write a seeded synthetic corpus"));
    auto* eval_sub = app.add_subcommand("eval", "score methods against planted truth");
    add_common(eval_sub);
    eval_sub->add_option("--method", methods, "method to score (repeatable)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            err << app.help();
            return 0;
        }
        err << "error: " << e.what() << '\n';
        return 2;
    }

    try {
        CLI::App* sub = app.get_subcommands().at(0);
        RunConfig config;
        if (!config_path.empty()) config = load_run_config(config_path);
        if (!out_dir.empty()) config.out = out_dir;
        if (sub->count("--theta") > 0) config.theta = theta;
        if (sub->count("--seed") > 0) config.seed = seed;
        if (strict) config.strict = true;
        if (unrestricted) config.unrestricted = true;
        if (config.theta < 0.0 || config.theta > 1.0)
            throw ValidationError("theta must lie in [0,1]");

        if (app.got_subcommand("extract")) cmd_extract(config);
        else if (app.got_subcommand("learn")) cmd_learn(config);
        else if (app.got_subcommand("synthesize")) cmd_synthesize(config);
        else if (app.got_subcommand("generate")) cmd_generate(config);
        else cmd_eval(config, methods.empty() ? default_eval_methods() : methods);
        return 0;
    } catch (const DegenerateDataError& e) {
        err << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
}

}  // namespace prodsynth::cli
