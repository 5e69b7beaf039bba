#include "prodsynth/corpus.hpp"

#include <string>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "prodsynth/errors.hpp"

using namespace prodsynth;
using namespace prodsynth::corpus;

TEST_CASE("hard-drive fixture loads with full indexing") {
    auto corpus = testutil::load_fixture_corpus("hdd");

    CHECK(corpus.schemas().size() == 1);
    CHECK(corpus.products().size() == 6);
    CHECK(corpus.offers().size() == 4);
    CHECK(corpus.matches().size() == 4);

    const CatalogSchema* schema = corpus.schema("hard-drives");
    REQUIRE(schema != nullptr);
    CHECK(schema->attributes == std::vector<std::string>{"Brand", "Model", "Speed", "Interface"});
    CHECK(schema->key_attributes == std::vector<std::string>{"Model"});
    CHECK(corpus.schema("laptops") == nullptr);

    const Product* product = corpus.product("hd3");
    REQUIRE(product != nullptr);
    CHECK(product->category == "hard-drives");
    CHECK(product->spec[0] == AttrValue{"Brand", "Western Digital"});
    CHECK(corpus.product("nope") == nullptr);

    const Offer* offer = corpus.offer("off2");
    REQUIRE(offer != nullptr);
    CHECK(offer->merchant == "driveshack");
    CHECK(offer->title == "WD RaptorHDD");
    CHECK(offer->spec == Spec{{"RPM", "7200"}, {"Int. Type", "IDE 133 mb/s"}});

    const Product* matched = corpus.matched_product("off2");
    REQUIRE(matched != nullptr);
    CHECK(matched->product_id == "hd3");
    CHECK(corpus.offer_is_matched("off1"));
    CHECK_FALSE(corpus.offer_is_matched("no-such-offer"));

    auto offers_of_hd4 = corpus.matching_offers("hd4");
    REQUIRE(offers_of_hd4.size() == 1);
    CHECK(offers_of_hd4[0]->offer_id == "off3");
    CHECK(corpus.matching_offers("hd6").empty());

    CHECK(corpus.product_indices_by_category("hard-drives").size() == 6);
    CHECK(corpus.product_indices_by_category("cameras").empty());
    CHECK(corpus.offer_indices_by_category("hard-drives").size() == 4);
    CHECK(corpus.offer_indices_by_merchant("driveshack").size() == 4);
    CHECK(corpus.offer_indices_by_merchant("amazon").empty());
    CHECK(corpus.offer_indices_by_merchant_category("driveshack", "hard-drives").size() == 4);
    CHECK(corpus.offer_indices_by_merchant_category("driveshack", "cameras").empty());

    auto mcs = corpus.matched_merchant_categories();
    REQUIRE(mcs.size() == 1);
    CHECK(mcs[0] == std::pair<std::string, std::string>{"driveshack", "hard-drives"});
}

TEST_CASE("catalog, offers, and matches round-trip through their files") {
    auto original = testutil::load_fixture_corpus("hdd");
    testutil::TempDir dir;

    Catalog catalog;
    catalog.schemas = original.schemas();
    catalog.products = original.products();
    write_catalog(dir.path() / "catalog.jsonl", catalog);
    write_offers(dir.path() / "offers.jsonl", original.offers());
    write_matches(dir.path() / "matches.jsonl", original.matches());

    LoadStats stats;
    auto catalog2 = load_catalog(dir.path() / "catalog.jsonl", true, &stats);
    auto offers2 = load_offers(dir.path() / "offers.jsonl", true, &stats);
    CHECK(catalog2.schemas.size() == 1);
    CHECK(catalog2.schemas[0].attributes == original.schemas()[0].attributes);
    CHECK(catalog2.schemas[0].key_attributes == original.schemas()[0].key_attributes);
    REQUIRE(catalog2.products.size() == 6);
    for (std::size_t i = 0; i < 6; ++i) {
        CHECK(catalog2.products[i].product_id == original.products()[i].product_id);
        CHECK(catalog2.products[i].spec == original.products()[i].spec);
    }
    REQUIRE(offers2.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(offers2[i].offer_id == original.offers()[i].offer_id);
        CHECK(offers2[i].title == original.offers()[i].title);
        CHECK(offers2[i].spec == original.offers()[i].spec);
        CHECK_FALSE(offers2[i].price.has_value());
    }

    Corpus corpus2(std::move(catalog2), std::move(offers2));
    auto matches2 = load_matches(dir.path() / "matches.jsonl", corpus2, true, &stats);
    REQUIRE(matches2.size() == 4);
    CHECK(matches2[0].offer_id == "off1");
    CHECK(matches2[0].product_id == "hd1");
    CHECK(stats.skipped == 0);
}

TEST_CASE("offer json keeps a stable key order and optional fields") {
    Offer offer;
    offer.offer_id = "o9";
    offer.merchant = "shop";
    offer.category = "cameras";
    offer.title = "A camera";
    offer.price = "199.99";
    offer.currency = "USD";
    offer.url = "http://example.com/o9";
    offer.image_url = "http://example.com/o9.jpg";
    offer.spec = {{"Resolution", "12 MP"}};

    auto j = offer_to_json(offer);
    std::vector<std::string> keys;
    for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
    CHECK(keys == std::vector<std::string>{"id", "merchant", "category", "title", "price",
                                           "currency", "url", "image", "spec"});

    Offer back = offer_from_json(j);
    CHECK(back.offer_id == offer.offer_id);
    CHECK(back.price == offer.price);
    CHECK(back.currency == offer.currency);
    CHECK(back.url == offer.url);
    CHECK(back.image_url == offer.image_url);
    CHECK(back.spec == offer.spec);

    Offer bare;
    bare.offer_id = "o1";
    bare.merchant = "m";
    bare.category = "c";
    auto jb = offer_to_json(bare);
    CHECK_FALSE(jb.contains("price"));
    CHECK_FALSE(jb.contains("url"));
    CHECK(offer_from_json(jb).price == std::nullopt);
}

TEST_CASE("lenient loading skips malformed lines, strict loading aborts") {
    testutil::TempDir dir;
    auto path = dir.write_file("offers.jsonl",
                               R"({"id":"a","merchant":"m","category":"c"})"
                               "\n"
                               "this is not json\n"
                               R"({"id":"","merchant":"m","category":"c"})"
                               "\n"
                               R"({"id":"b","category":"c"})"
                               "\n"
                               "\n"
                               R"({"id":"a","merchant":"m","category":"c"})"
                               "\n"
                               R"({"id":"c","merchant":"m2","category":"c"})"
                               "\n");

    LoadStats stats;
    auto offers = load_offers(path, false, &stats);
    REQUIRE(offers.size() == 2);
    CHECK(offers[0].offer_id == "a");
    CHECK(offers[1].offer_id == "c");
    CHECK(stats.records_read == 6);  // blank line not counted
    CHECK(stats.accepted == 2);
    CHECK(stats.skipped == 4);
    CHECK(stats.warnings.size() == 4);

    CHECK_THROWS_AS(load_offers(path, true, nullptr), ValidationError);
}

TEST_CASE("catalog cross-record validation aborts in either mode") {
    testutil::TempDir dir;

    auto orphan = dir.write_file("orphan.jsonl",
                                 R"({"kind":"schema","category":"c1","attributes":["A"]})"
                                 "\n"
                                 R"({"kind":"product","id":"p1","category":"c2","spec":[["A","1"]]})"
                                 "\n");
    CHECK_THROWS_AS(load_catalog(orphan, false, nullptr), ValidationError);

    auto dup = dir.write_file("dup.jsonl",
                              R"({"kind":"schema","category":"c1","attributes":["A"]})"
                              "\n"
                              R"({"kind":"schema","category":"c1","attributes":["B"]})"
                              "\n");
    CHECK_THROWS_AS(load_catalog(dup, false, nullptr), ValidationError);

    auto badkey = dir.write_file("badkey.jsonl",
                                 R"({"kind":"schema","category":"c1","attributes":["A"],"keys":["Z"]})"
                                 "\n");
    CHECK_THROWS_AS(load_catalog(badkey, false, nullptr), ValidationError);

    auto badattr =
        dir.write_file("badattr.jsonl",
                       R"({"kind":"schema","category":"c1","attributes":["A"]})"
                       "\n"
                       R"({"kind":"product","id":"p1","category":"c1","spec":[["B","1"]]})"
                       "\n");
    CHECK_THROWS_AS(load_catalog(badattr, false, nullptr), ValidationError);
}

TEST_CASE("omitted keys fall back to the stock key attributes present in the schema") {
    testutil::TempDir dir;
    auto path = dir.write_file(
        "catalog.jsonl",
        R"({"kind":"schema","category":"c1","attributes":["Model Part Number","Color","UPC"]})"
        "\n"
        R"({"kind":"schema","category":"c2","attributes":["Color"]})"
        "\n"
        R"({"kind":"schema","category":"c3","attributes":["UPC"],"keys":[]})"
        "\n");
    auto catalog = load_catalog(path, true, nullptr);
    REQUIRE(catalog.schemas.size() == 3);
    CHECK(catalog.schemas[0].key_attributes ==
          std::vector<std::string>{"Model Part Number", "UPC"});
    CHECK(catalog.schemas[1].key_attributes.empty());
    CHECK(catalog.schemas[2].key_attributes.empty());  // explicit empty list wins
}

TEST_CASE("match validation rejects dangling and conflicting records") {
    testutil::TempDir dir;
    dir.write_file("catalog.jsonl",
                   R"({"kind":"schema","category":"c1","attributes":["A"]})"
                   "\n"
                   R"({"kind":"schema","category":"c2","attributes":["A"]})"
                   "\n"
                   R"({"kind":"product","id":"p1","category":"c1","spec":[["A","1"]]})"
                   "\n"
                   R"({"kind":"product","id":"p2","category":"c2","spec":[["A","2"]]})"
                   "\n");
    dir.write_file("offers.jsonl",
                   R"({"id":"o1","merchant":"m","category":"c1"})"
                   "\n"
                   R"({"id":"o2","merchant":"m","category":"c1"})"
                   "\n");

    auto make_corpus = [&] {
        LoadStats stats;
        auto catalog = load_catalog(dir.path() / "catalog.jsonl", true, &stats);
        auto offers = load_offers(dir.path() / "offers.jsonl", true, &stats);
        return Corpus(std::move(catalog), std::move(offers));
    };

    auto corpus = make_corpus();
    auto check_throws = [&](const char* name, const std::string& content) {
        auto path = dir.write_file(name, content);
        CHECK_THROWS_AS(load_matches(path, corpus, false, nullptr), ValidationError);
    };
    check_throws("dangling-offer.jsonl", R"({"offer":"ghost","product":"p1"})"
                                         "\n");
    check_throws("dangling-product.jsonl", R"({"offer":"o1","product":"ghost"})"
                                           "\n");
    check_throws("cross-category.jsonl", R"({"offer":"o1","product":"p2"})"
                                         "\n");
    check_throws("double-match.jsonl", R"({"offer":"o1","product":"p1"})"
                                       "\n"
                                       R"({"offer":"o1","product":"p1"})"
                                       "\n");

    auto good = dir.write_file("good.jsonl", R"({"offer":"o1","product":"p1"})"
                                             "\n");
    auto matches = load_matches(good, corpus, true, nullptr);
    corpus.set_matches(std::move(matches));
    CHECK(corpus.offer_is_matched("o1"));
    CHECK_FALSE(corpus.offer_is_matched("o2"));
    CHECK_THROWS_AS(corpus.set_matches({}), ValidationError);
}
