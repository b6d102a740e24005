#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <string>

#include "veristyle/lexicons.hpp"
#include "veristyle/textproc.hpp"

using namespace veristyle;

namespace {

std::string write_fixture(const std::string& name, const std::string& content) {
    const auto dir = std::filesystem::path(VERISTYLE_BUILD_DIR) / "fixtures";
    std::filesystem::create_directories(dir);
    const auto path = dir / name;
    std::ofstream out(path);
    out << content;
    return path.string();
}

const char* kTinyDic =
    "%\n"
    "1\ti\n"
    "2\twe\n"
    "%\n"
    "i\t1\n"
    "we\t2\n"
    "us\t2\n";

}

TEST_CASE("load_category_lexicon parses the dic convention") {
    const auto path = write_fixture("tiny.dic", kTinyDic);
    const auto lex = lex::load_category_lexicon(path);
    CHECK(lex.categories == std::vector<std::string>{"i", "we"});
    CHECK(lex.pattern_count() == 3);
}

TEST_CASE("load_category_lexicon rejects unknown category ids") {
    const auto path = write_fixture("badid.dic",
                                    "%\n1\ti\n2\twe\n%\n"
                                    "i\t1\n"
                                    "strange\t99\n");
    CHECK_THROWS_AS(lex::load_category_lexicon(path), UnknownCategoryId);
}

TEST_CASE("load_category_lexicon rejects malformed headers") {
    const auto no_header = write_fixture("nohdr.dic", "i\t1\n");
    CHECK_THROWS_AS(lex::load_category_lexicon(no_header), MalformedHeader);
    const auto unclosed = write_fixture("unclosed.dic", "%\n1\ti\n");
    CHECK_THROWS_AS(lex::load_category_lexicon(unclosed), MalformedHeader);
    const auto mid_star = write_fixture("midstar.dic", "%\n1\ti\n%\nfru*str\t1\n");
    CHECK_THROWS_AS(lex::load_category_lexicon(mid_star), MalformedHeader);
}

TEST_CASE("duplicate patterns merge category sets") {
    const auto path = write_fixture("dup.dic",
                                    "%\n1\ta\n2\tb\n%\n"
                                    "word\t1\n"
                                    "word\t2\n");
    const auto lex = lex::load_category_lexicon(path);
    const auto* ids = lex.match("word");
    REQUIRE(ids != nullptr);
    CHECK(ids->size() == 2);
}

TEST_CASE("wildcard prefixes match and exact entries win") {
    const auto path = write_fixture("wild.dic",
                                    "%\n1\tanger\n2\tcalm\n%\n"
                                    "frustr*\t1\n"
                                    "frust*\t2\n"
                                    "frustration\t2\n");
    const auto lex = lex::load_category_lexicon(path);
    // longest wildcard wins
    const auto* hit = lex.match("frustrated");
    REQUIRE(hit != nullptr);
    REQUIRE(hit->size() == 1);
    CHECK(*hit->begin() == 0);  // anger
    // exact overrides any wildcard
    const auto* exact = lex.match("frustration");
    REQUIRE(exact != nullptr);
    REQUIRE(exact->size() == 1);
    CHECK(*exact->begin() == 1);  // calm
    CHECK(lex.match("zzz") == nullptr);
}

TEST_CASE("category_percentages arithmetic") {
    const auto path = write_fixture("pct.dic", kTinyDic);
    const auto lex = lex::load_category_lexicon(path);

    const auto t = text::tokenize("I we ran");
    const auto pcts = lex::category_percentages(t, lex);
    CHECK(pcts.at("i") == Catch::Approx(100.0 / 3.0));
    CHECK(pcts.at("we") == Catch::Approx(100.0 / 3.0));

    const auto zero = lex::category_percentages(text::tokenize("nothing matches here"), lex);
    CHECK(zero.at("i") == 0.0);
    CHECK(zero.at("we") == 0.0);

    CHECK_THROWS_AS(lex::category_percentages(text::tokenize(""), lex), EmptyText);
}

TEST_CASE("one token can hit multiple categories at 100 percent") {
    const auto path = write_fixture("multi.dic",
                                    "%\n1\tppron\n2\tpronoun\n%\n"
                                    "i\t1\t2\n");
    const auto lex = lex::load_category_lexicon(path);
    const auto pcts = lex::category_percentages(text::tokenize("I"), lex);
    CHECK(pcts.at("ppron") == Catch::Approx(100.0));
    CHECK(pcts.at("pronoun") == Catch::Approx(100.0));
}

TEST_CASE("category percentages stay within bounds on sample text") {
    const auto lex = lex::load_category_lexicon(std::string(VERISTYLE_RESOURCE_DIR) +
                                                "/demo_categories.dic");
    const char* docs[] = {
        "I was so frustrated when he crashed my car on Monday.",
        "We went to the hospital and the doctor said it was fine.",
        "They will never know why I lied about the ticket.",
    };
    for (const auto* doc : docs) {
        const auto pcts = lex::category_percentages(text::tokenize(doc), lex);
        for (const auto& [name, value] : pcts) {
            CHECK(value >= 0.0);
            CHECK(value <= 100.0);
        }
    }
    // the demo dictionary declares the full Table 2 / Table 5 category set
    for (const char* required :
         {"i", "we", "shehe", "they", "you", "Social", "socrefs", "socbehav", "comm", "ppron",
          "pronoun", "male", "memory", "Cognition", "differ", "tentat", "number", "emo_anger",
          "emo_sad", "tone_pos", "tone_neg", "Affect", "attention", "visual", "auditory",
          "feeling", "space", "motion", "time", "power", "conflict", "focuspast", "focuspresent",
          "focusfuture", "Clout", "Analytic", "Authentic"})
        CHECK(lex.category_index(required).has_value());
}

TEST_CASE("demo dictionary wildcard example") {
    const auto lex = lex::load_category_lexicon(std::string(VERISTYLE_RESOURCE_DIR) +
                                                "/demo_categories.dic");
    const auto pcts = lex::category_percentages(text::tokenize("frustrated"), lex);
    CHECK(pcts.at("emo_anger") == Catch::Approx(100.0));
}

TEST_CASE("concreteness lexicon") {
    const auto path = write_fixture("conc.csv", "word,score\na,2.0\nb,4.0\ncovered,3.5\n");
    const auto lex = lex::load_concreteness(path);

    const auto both = lex::concreteness_mean({"a", "b"}, lex);
    REQUIRE(both.has_value());
    CHECK(*both == Catch::Approx(3.0));

    CHECK_FALSE(lex::concreteness_mean({"missing", "words"}, lex).has_value());

    const auto mixed = lex::concreteness_mean({"covered", "uncovered"}, lex);
    REQUIRE(mixed.has_value());
    CHECK(*mixed == Catch::Approx(3.5));

    const auto bad = write_fixture("badconc.csv", "word,score\nx,9.5\n");
    CHECK_THROWS_AS(lex::load_concreteness(bad), Error);
}

TEST_CASE("ner unique counts") {
    const auto gaz = lex::load_gazetteer(std::string(VERISTYLE_RESOURCE_DIR) + "/gazetteer.json");

    const auto mary = lex::ner_unique_counts("Mary met Mary on Monday", gaz);
    CHECK(mary.at(lex::EntityCategory::People) == 1);
    CHECK(mary.at(lex::EntityCategory::Temporal) == 1);

    const auto pct = lex::ner_unique_counts("20% of 20%", gaz);
    CHECK(pct.at(lex::EntityCategory::Quantity) == 1);

    // hand-enumerated against the shipped gazetteer: spatial = airport, tokyo;
    // temporal = 2:30 pm; quantity = first ("time" is not a gazetteer literal)
    const auto mixed = lex::ner_unique_counts("airport near Tokyo at 2:30 PM, first time", gaz);
    CHECK(mixed.at(lex::EntityCategory::Spatial) == 2);
    CHECK(mixed.at(lex::EntityCategory::Temporal) == 1);
    CHECK(mixed.at(lex::EntityCategory::Quantity) == 1);
}

TEST_CASE("ner counts are invariant to sentence repetition") {
    const auto gaz = lex::load_gazetteer(std::string(VERISTYLE_RESOURCE_DIR) + "/gazetteer.json");
    const std::string sentence = "Paul paid 50 dollars at the airport on Friday.";
    const auto once = lex::ner_unique_counts(sentence, gaz);
    const auto thrice = lex::ner_unique_counts(sentence + " " + sentence + " " + sentence, gaz);
    CHECK(once == thrice);
}

TEST_CASE("ner currency and ordinal patterns") {
    const auto gaz = lex::load_gazetteer(std::string(VERISTYLE_RESOURCE_DIR) + "/gazetteer.json");
    const auto counts =
        lex::ner_unique_counts("He paid 5 $ for the 3rd ticket, about 100 meters away.", gaz);
    // 5 $ (currency), 3rd (ordinal), 100 (number) are distinct surface forms
    CHECK(counts.at(lex::EntityCategory::Quantity) == 3);
}
