#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "deduct/lint.hpp"
#include "deduct/syntax.hpp"

using namespace deduct;

namespace {

// Full quadratic table, filled cell by cell from the textbook recurrence.
// Kept separate from the production rolling-row version on purpose.
int table_distance(const std::string& a, const std::string& b) {
  std::vector<std::vector<int>> d(a.size() + 1, std::vector<int>(b.size() + 1));
  for (size_t i = 0; i <= a.size(); ++i) d[i][0] = (int)i;
  for (size_t j = 0; j <= b.size(); ++j) d[0][j] = (int)j;
  for (size_t i = 1; i <= a.size(); ++i)
    for (size_t j = 1; j <= b.size(); ++j)
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1,
                          d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
  return d[a.size()][b.size()];
}

Problem problem(const std::vector<std::string>& premises, const std::string& conclusion) {
  Problem p;
  int i = 0;
  for (const auto& text : premises) {
    auto f = parse_formula(text, SyntaxId::FOL);
    REQUIRE_MESSAGE(f.ok(), text);
    p.premises.push_back({"p" + std::to_string(i++), *f, ""});
  }
  auto c = parse_formula(conclusion, SyntaxId::FOL);
  REQUIRE_MESSAGE(c.ok(), conclusion);
  p.conclusion = *c;
  return p;
}

std::vector<std::string> rendered(const std::vector<Warning>& ws) {
  std::vector<std::string> out;
  for (const auto& w : ws) out.push_back(render(w));
  return out;
}

}  // namespace

TEST_CASE("edit_distance worked examples") {
  CHECK(edit_distance("abc", "abc") == 0);
  CHECK(edit_distance("kitten", "sitting") == 3);
  CHECK(edit_distance("drinkWater", "drinksWater") == 1);
  CHECK(edit_distance("", "abc") == 3);
  CHECK(edit_distance("abc", "") == 3);
}

TEST_CASE("edit_distance matches the full-table computation") {
  std::mt19937 rng(12);
  const std::string alphabet = "abcx";
  for (int i = 0; i < 500; ++i) {
    auto word = [&] {
      std::string s;
      int n = (int)(rng() % 9);
      for (int j = 0; j < n; ++j) s += alphabet[rng() % alphabet.size()];
      return s;
    };
    std::string a = word(), b = word();
    CHECK(edit_distance(a, b) == table_distance(a, b));
  }
}

TEST_CASE("edit_distance metric properties") {
  std::mt19937 rng(77);
  auto word = [&] {
    std::string s;
    int n = (int)(rng() % 7);
    for (int j = 0; j < n; ++j) s += (char)('a' + rng() % 3);
    return s;
  };
  for (int i = 0; i < 200; ++i) {
    std::string a = word(), b = word(), c = word();
    CHECK(edit_distance(a, b) == edit_distance(b, a));
    CHECK((edit_distance(a, b) == 0) == (a == b));
    CHECK(edit_distance(a, c) <= edit_distance(a, b) + edit_distance(b, c));
  }
}

TEST_CASE("lint fixture: nine cases, three per heuristic") {
  // QueryOnlySymbol positive: predicate and individual absent from premises
  auto w = lint(problem({"∀x (man(x) → mortal(x))", "man(socrates)"}, "immortal(plato)"));
  REQUIRE(w.size() == 2);
  CHECK(render(w[0]) ==
        "WARN QueryOnlySymbol: immortal — predicate 'immortal' appears in the conclusion but in "
        "no premise");
  CHECK(render(w[1]) ==
        "WARN QueryOnlySymbol: plato — individual 'plato' appears in the conclusion but in no "
        "premise");

  // QueryOnlySymbol negative: every conclusion symbol occurs in some premise
  CHECK(lint(problem({"∀x (man(x) → mortal(x))", "man(socrates)"}, "mortal(socrates)")).empty());

  // QueryOnlySymbol boundary: symbol appears in a premise only inside a function argument
  CHECK(lint(problem({"wise(motherOf(socrates))"}, "wise(socrates)")).empty());

  // ArityMismatch positive: same predicate at two arities
  auto a = lint(problem({"knows(alice)", "knows(alice, bob)"}, "knows(alice)"));
  REQUIRE(a.size() == 1);
  CHECK(render(a[0]) == "WARN ArityMismatch: knows — 'knows' is used with arities 1, 2");

  // ArityMismatch negative: consistent arity everywhere
  CHECK(lint(problem({"knows(alice, bob)", "knows(bob, alice)"}, "knows(alice, alice)")).empty());

  // ArityMismatch boundary: the clash is between a premise and the conclusion
  auto b = lint(problem({"knows(alice, bob)"}, "knows(alice)"));
  REQUIRE(b.size() == 1);
  CHECK(b[0].kind == Warning::Kind::ArityMismatch);

  // SimilarNames positive: one-edit predicate pair
  auto s = lint(problem({"∀x (drinkWater(x) → hydrated(x))", "drinksWater(socrates)"},
                        "hydrated(socrates)"));
  REQUIRE(s.size() == 1);
  CHECK(s[0].kind == Warning::Kind::SimilarNames);
  CHECK(s[0].subjects == std::vector<std::string>{"drinkWater", "drinksWater"});
  CHECK(render(s[0]) ==
        "WARN SimilarNames: drinkWater, drinksWater — 'drinkWater' and 'drinksWater' are "
        "predicate names at edit distance 1");

  // SimilarNames negative: short names are exempt even at distance 1
  CHECK(lint(problem({"p(a)", "q(a)"}, "p(a)")).empty());

  // SimilarNames boundary: cross-category shadowing reports distance 0
  auto x = lint(problem({"wise(plato)", "plato(socrates)"}, "wise(socrates)"));
  REQUIRE(x.size() == 1);
  CHECK(x[0].kind == Warning::Kind::SimilarNames);
  CHECK(render(x[0]) ==
        "WARN SimilarNames: plato, plato — 'plato' is used as both a predicate and an individual");
}

TEST_CASE("case-insensitive comparison lowers names first") {
  auto w = lint(problem({"DrinkWater(socrates)", "drinkwater(socrates)"}, "DrinkWater(socrates)"));
  CHECK(w.empty());  // same name up to case, not a near-miss
  auto s = lint(problem({"DrinkWater(socrates)", "drinksWater(socrates)"}, "DrinkWater(socrates)"));
  REQUIRE(s.size() == 1);
  CHECK(s[0].kind == Warning::Kind::SimilarNames);

  LintConfig sensitive;
  sensitive.case_insensitive = false;
  auto cs = lint(problem({"drinkWater(socrates)", "drinkwater(socrates)"}, "drinkWater(socrates)"),
                 sensitive);
  REQUIRE(cs.size() == 1);  // distance-1 pair once case counts
  CHECK(lint(problem({"drinkWater(socrates)", "drinkwater(socrates)"}, "drinkWater(socrates)"))
            .empty());
}

TEST_CASE("threshold is configurable") {
  LintConfig loose;
  loose.similar_threshold = 2;
  auto w = lint(problem({"drinkWater(a)", "drankWaters(a)"}, "drinkWater(a)"), loose);
  REQUIRE(w.size() == 1);
  CHECK(w[0].detail.find("edit distance 2") != std::string::npos);
  CHECK(lint(problem({"drinkWater(a)", "drankWaters(a)"}, "drinkWater(a)")).empty());
}

TEST_CASE("lint output is invariant under premise reordering") {
  std::vector<std::string> premises = {"knows(alice)", "knows(alice, bob)",
                                       "drinkWater(socrates)", "drinksWater(socrates)"};
  Problem base = problem(premises, "immortal(plato)");
  auto expected = rendered(lint(base));
  CHECK_FALSE(expected.empty());
  std::sort(premises.begin(), premises.end());
  do {
    Problem p = problem(premises, "immortal(plato)");
    CHECK(rendered(lint(p)) == expected);
  } while (std::next_permutation(premises.begin(), premises.end()));
}

TEST_CASE("warnings sort by kind then first subject") {
  auto w = lint(problem({"knows(alice)", "knows(alice, bob)", "drinkWater(a)", "drinksWater(a)"},
                        "immortal(plato)"));
  REQUIRE(w.size() == 4);
  CHECK(w[0].kind == Warning::Kind::QueryOnlySymbol);
  CHECK(w[0].subjects.front() == "immortal");
  CHECK(w[1].kind == Warning::Kind::QueryOnlySymbol);
  CHECK(w[1].subjects.front() == "plato");
  CHECK(w[2].kind == Warning::Kind::ArityMismatch);
  CHECK(w[3].kind == Warning::Kind::SimilarNames);
}
