#include "vforge/corpus.hpp"
#include "vforge/errors.hpp"
#include "vforge/util.hpp"

#include "support/paths.hpp"

#include <doctest.h>

using namespace vforge;
namespace fs = std::filesystem;

TEST_CASE("load_corpus loads the fixture problems sorted by id") {
  const Corpus corpus = load_corpus(test::fixtures_dir() / "corpus");
  REQUIRE(corpus.size() == 3);
  CHECK(corpus[0].id == "uva-10055");
  CHECK(corpus[1].id == "uva-11172");
  CHECK(corpus[2].id == "uva-11934");

  const Problem& relational = corpus[1];
  CHECK(relational.title == "Relational Operator");
  CHECK(relational.signature.has_value());
  REQUIRE(relational.tests.size() == 3);
  CHECK(relational.tests[0].input == "10 20");
  CHECK(relational.tests[0].expected_output == "<");
  CHECK(relational.tests[1].input == "20 10");
  CHECK(relational.tests[1].expected_output == ">");
  CHECK(relational.tests[2].input == "10 10");
  CHECK(relational.tests[2].expected_output == "=");
  CHECK(relational.tests[2].label == "equal values");

  CHECK_FALSE(corpus[0].signature.has_value());  // contextless-only problem
}

TEST_CASE("load_corpus identity case: one well-formed file") {
  const fs::path dir = test::fresh_dir("corpus-one");
  fs::copy_file(test::fixtures_dir() / "corpus" / "uva-11172.json",
                dir / "uva-11172.json");
  const Corpus corpus = load_corpus(dir);
  REQUIRE(corpus.size() == 1);
  CHECK(corpus[0].id == "uva-11172");
}

TEST_CASE("load_corpus rejects duplicate ids") {
  const fs::path dir = test::fresh_dir("corpus-dup");
  fs::copy_file(test::fixtures_dir() / "corpus" / "uva-11172.json",
                dir / "uva-11172.json");
  fs::copy_file(test::fixtures_dir() / "corpus" / "uva-11172.json",
                dir / "zz-copy.json");
  CHECK_THROWS_AS(load_corpus(dir), DuplicateIdError);
}

TEST_CASE("load_corpus rejects a file whose name does not match its id") {
  const fs::path dir = test::fresh_dir("corpus-name");
  fs::copy_file(test::fixtures_dir() / "corpus" / "uva-11172.json",
                dir / "other.json");
  CHECK_THROWS_AS(load_corpus(dir), MalformedProblemError);
}

TEST_CASE("load_corpus errors") {
  CHECK_THROWS_AS(load_corpus(test::fixtures_dir() / "no-such-dir"),
                  MissingPathError);

  const fs::path dir = test::fresh_dir("corpus-bad");
  write_file(dir / "uva-1.json", "{not json");
  CHECK_THROWS_AS(load_corpus(dir), MalformedProblemError);

  const fs::path dir2 = test::fresh_dir("corpus-empty-desc");
  write_file(dir2 / "uva-2.json",
             R"({"id":"uva-2","title":"t","description":"","tests":[]})");
  CHECK_THROWS_AS(load_corpus(dir2), MalformedProblemError);
}

TEST_CASE("load_corpus is deterministic") {
  const Corpus a = load_corpus(test::fixtures_dir() / "corpus");
  const Corpus b = load_corpus(test::fixtures_dir() / "corpus");
  CHECK(a == b);
}

TEST_CASE("problem round-trips through JSON") {
  for (const Problem& problem : load_corpus(test::fixtures_dir() / "corpus")) {
    const Problem again = problem_from_json(problem_to_json(problem), "roundtrip");
    CHECK(again == problem);
  }
}

TEST_CASE("validate_problem") {
  Problem good;
  good.id = "uva-1";
  good.description = "Compute a thing.";
  good.signature = "method Thing(a: int) returns (r: int)";
  good.tests = {{"1", "2", ""}};
  CHECK(validate_problem(good).empty());

  SUBCASE("empty description") {
    Problem p = good;
    p.description.clear();
    const ValidationReport report = validate_problem(p);
    REQUIRE(report.size() == 1);
    CHECK(report[0].field == "description");
  }
  SUBCASE("signature without a method/function token") {
    Problem p = good;
    p.signature = "mthod Foo(";
    const ValidationReport report = validate_problem(p);
    REQUIRE(report.size() == 1);
    CHECK(report[0].field == "signature");
  }
  SUBCASE("function token is accepted") {
    Problem p = good;
    p.signature = "function Foo(x: int): int";
    CHECK(validate_problem(p).empty());
  }
  SUBCASE("missing tests are flagged") {
    Problem p = good;
    p.tests.clear();
    const ValidationReport report = validate_problem(p);
    REQUIRE(report.size() == 1);
    CHECK(report[0].field == "tests");
  }
  SUBCASE("missing signature is legal") {
    Problem p = good;
    p.signature.reset();
    CHECK(validate_problem(p).empty());
  }
}
