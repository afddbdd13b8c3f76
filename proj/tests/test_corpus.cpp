// Apache License, Version 2.0, refer to LICENSE.txt

#include <algorithm>

#include "doctest.h"
#include "nid/corpus.hpp"
#include "nid/error.hpp"
#include "nid/rng.hpp"
#include "test_util.hpp"

using namespace nid;

namespace {

std::string rec(const std::string& id, const std::string& date, const std::string& text) {
  return R"({"id": ")" + id + R"(", "date": ")" + date + R"(", "source": "S", "text": ")" + text + "\"}\n";
}

Document doc(const std::string& text) { return {"x", *Date::parse("2020-01-01"), "S", text}; }

std::vector<std::string> tokens_of(const std::string& text, const StopwordSet& stop = {}) {
  return normalize(doc(text), stop).tokens;
}

}  // namespace

TEST_CASE("ingest sorts by date") {
  auto docs = parse_corpus(rec("a", "2020-03-02", "x") + rec("b", "2019-12-01", "y") + rec("c", "2020-01-15", "z"));
  REQUIRE(docs.size() == 3);
  CHECK(docs[0].date.iso() == "2019-12-01");
  CHECK(docs[1].date.iso() == "2020-01-15");
  CHECK(docs[2].date.iso() == "2020-03-02");
}

TEST_CASE("ingest breaks same-day ties by id") {
  auto docs = parse_corpus(rec("b", "2020-01-01", "x") + rec("a", "2020-01-01", "y"));
  CHECK(docs[0].id == "a");
  CHECK(docs[1].id == "b");
}

TEST_CASE("ingest of an empty file is an empty list") {
  test::TempDir dir("corpus");
  test::write_text(dir / "empty.jsonl", "");
  CHECK(ingest(dir / "empty.jsonl").empty());
  CHECK(parse_corpus("\n  \n").empty());
}

TEST_CASE("ingest reads the fixture and joins title and body") {
  auto docs = ingest(test::kFixtures / "tiny_corpus.jsonl");
  REQUIRE(docs.size() == 3);
  CHECK(docs[0].id == "p1");
  CHECK(docs[1].text == "Ny virus i Kina Myndighederne i Wuhan melder om 41 smittede");
}

TEST_CASE("ingest errors") {
  SUBCASE("duplicate id cites the id") {
    std::string text = rec("a0", "2020-01-01", "x") + rec("a1", "2020-01-01", "x") + rec("a2", "2020-01-01", "x") +
                       rec("a3", "2020-01-01", "x") + rec("a1", "2020-01-02", "x");
    try {
      parse_corpus(text);
      FAIL("expected an error");
    } catch (const Error& e) {
      std::string msg = e.what();
      CHECK(msg.find("'a1'") != std::string::npos);
      CHECK(msg.find("lines 2 and 5") != std::string::npos);
    }
  }
  SUBCASE("malformed line names the line number") {
    try {
      parse_corpus(rec("a", "2020-01-01", "x") + "\n{not json\n");
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_corpus(R"({"id": "a", "date": "2020-01-01", "text": "x"})"), Error);
  }
  SUBCASE("unparseable date names the record") {
    try {
      parse_corpus(rec("bad-date", "2020-02-30", "x"));
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("bad-date") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_corpus(rec("d", "2020/01/01", "x")), Error);
  }
  SUBCASE("blank text is rejected") { CHECK_THROWS_AS(parse_corpus(rec("e", "2020-01-01", "   ")), Error); }
  SUBCASE("missing file") { CHECK_THROWS_AS(ingest("/nonexistent/corpus.jsonl"), Error); }
}

TEST_CASE("normalize applies casefolding, numeral and stopword removal") {
  CHECK(tokens_of("The 2 Viruses SPREAD fast", {"the", "fast"}) == std::vector<std::string>{"viruses", "spread"});
  CHECK(tokens_of("123 456").empty());
  CHECK(tokens_of("og i jeg det", {"og", "i", "jeg", "det"}).empty());
}

TEST_CASE("numeral rule") {
  CHECK(is_numeral("2020"));
  CHECK(is_numeral("1.000"));
  CHECK(is_numeral("12:30"));
  CHECK(is_numeral("1,5"));
  CHECK(is_numeral("2019-12-01"));
  CHECK_FALSE(is_numeral("covid-19"));
  CHECK_FALSE(is_numeral("3d"));
  CHECK_FALSE(is_numeral("-"));
  CHECK(tokens_of("Mødet kl. 12:30 med 1.000 deltagere") ==
        std::vector<std::string>{"mødet", "kl", "med", "deltagere"});
}

TEST_CASE("casefold handles Danish letters") {
  CHECK(casefold("ÆØÅ Smitte") == "æøå smitte");
  CHECK(casefold("×") == "×");
  CHECK(tokens_of("NEDLUKNINGEN, «Politiken»!") == std::vector<std::string>{"nedlukningen", "«politiken»"});
}

TEST_CASE("lemmatizer hook is applied after filtering") {
  NormalizeOpts opts;
  opts.lemmatize = map_lemmatizer(load_lemma_map(test::kFixtures / "lemmas_da.tsv"));
  auto stop = load_stopwords(test::kFixtures / "stopwords_da.txt");
  auto t = normalize(doc("Smitten og restriktionerne i Danmark"), stop, opts);
  CHECK(t.tokens == std::vector<std::string>{"smitte", "restriktion", "danmark"});
}

TEST_CASE("stopword file loading") {
  auto stop = load_stopwords(test::kFixtures / "stopwords_da.txt");
  CHECK(stop.count("og"));
  CHECK(stop.count("på"));
  CHECK_FALSE(stop.count("# Small Danish function-word list used by the test fixtures."));
}

TEST_CASE("build_vocabulary") {
  std::vector<TokenizedDoc> docs = {{"1", {}, "S", {"a", "b", "a"}}, {"2", {}, "S", {"a"}}};
  CHECK(build_vocabulary(docs, 2).terms() == std::vector<std::string>{"a"});
  auto all = build_vocabulary(docs, 1);
  CHECK(all.terms() == std::vector<std::string>{"a", "b"});
  CHECK(all.find("b") == 1);
  CHECK(all.find("zzz") == -1);
  std::vector<TokenizedDoc> empty = {{"1", {}, "S", {}}, {"2", {}, "S", {}}};
  CHECK_THROWS_WITH_AS(build_vocabulary(empty, 1), "empty vocabulary", Error);
  CHECK_THROWS_AS(build_vocabulary(docs, 0), Error);
}

namespace {

std::vector<Document> random_corpus(std::uint64_t seed, int n) {
  Rng rng(seed);
  const std::vector<std::string> words = {"Virus", "lockdown", "2020", "Æbler", "og", "1.000", "Covid-19",
                                          "\"citat\"", "smitte,", "Ø", "tab\tbed", "x"};
  std::vector<Document> docs;
  for (int i = 0; i < n; ++i) {
    std::string text;
    const int len = 1 + static_cast<int>(rng() % 12);
    for (int k = 0; k < len; ++k) text += (k ? " " : "") + words[rng() % words.size()];
    docs.push_back({"id" + std::to_string(rng() % 100000) + "_" + std::to_string(i),
                    Date::from_days(18200 + static_cast<long>(rng() % 40)), "src" + std::to_string(rng() % 3), text});
  }
  return docs;
}

}  // namespace

TEST_CASE("property: ingest and emit round-trip") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto docs = random_corpus(seed, 30);
    sort_documents(docs);
    CHECK(parse_corpus(emit_corpus(docs)) == docs);
  }
}

TEST_CASE("property: line order never changes ingest output") {
  auto docs = random_corpus(7, 40);
  auto expected = parse_corpus(emit_corpus(docs));
  Rng rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    for (std::size_t i = docs.size() - 1; i > 0; --i) std::swap(docs[i], docs[rng() % (i + 1)]);
    CHECK(parse_corpus(emit_corpus(docs)) == expected);
  }
}

TEST_CASE("property: normalize is idempotent") {
  StopwordSet stop = {"og", "lockdown"};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    for (const auto& d : random_corpus(seed, 10)) {
      auto once = normalize(d, stop);
      std::string joined;
      for (const auto& t : once.tokens) joined += t + " ";
      Document again = d;
      again.text = joined;
      CHECK(normalize(again, stop).tokens == once.tokens);
    }
  }
}
