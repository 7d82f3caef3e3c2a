#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <string>

#include "deduct/syntax.hpp"
#include "testutil.hpp"

using namespace deduct;

namespace {

FormulaPtr parse_ok(const std::string& text, SyntaxId syntax) {
  auto r = parse_formula(text, syntax);
  if (!r.ok()) FAIL("parse failed: ", r.error->message, " in: ", text);
  return *r;
}

template <typename T>
std::string err_msg(const deduct::Expected<T>& r) {
  return r.error ? r.error->message : std::string();
}

}  // namespace

TEST_CASE("syntax names round-trip") {
  for (SyntaxId s : {SyntaxId::FOL, SyntaxId::RFOL, SyntaxId::TPTP})
    CHECK(syntax_from_name(syntax_name(s)) == s);
  CHECK(syntax_from_name("TPTP") == SyntaxId::TPTP);
  CHECK(syntax_from_name("r-fol") == SyntaxId::RFOL);
  CHECK_FALSE(syntax_from_name("prolog").has_value());
}

TEST_CASE("the same sentence parses alpha-equal across all three grammars") {
  FormulaPtr fol = parse_ok("∀x (drinkWater(x) → hydrated(x))", SyntaxId::FOL);
  FormulaPtr rfol = parse_ok("∀?x (drinkWater(?x) → hydrated(?x))", SyntaxId::RFOL);
  FormulaPtr tptp = parse_ok("![X]:drinkWater(X) => hydrated(X)", SyntaxId::TPTP);
  CHECK(alpha_equal(fol, rfol));
  CHECK(alpha_equal(fol, tptp));
}

TEST_CASE("canonical printing goldens") {
  FormulaPtr f = parse_ok("forall x. drinkWater(x) -> hydrated(x)", SyntaxId::FOL);
  CHECK(print_formula(f, SyntaxId::FOL) == "∀x (drinkWater(x) → hydrated(x))");
  CHECK(print_formula(f, SyntaxId::RFOL) == "∀?x (drinkWater(?x) → hydrated(?x))");
  CHECK(print_formula(f, SyntaxId::TPTP) == "![X]:drinkWater(X) => hydrated(X)");
}

TEST_CASE("ascii aliases are accepted everywhere") {
  FormulaPtr want = parse_ok("∀x ((p(x) ∧ q(x)) → (r(x) ∨ ¬s(x)))", SyntaxId::FOL);
  FormulaPtr ascii = parse_ok("forall x. (p(x) & q(x)) -> (r(x) | ~s(x))", SyntaxId::FOL);
  CHECK(alpha_equal(want, ascii));
  CHECK(alpha_equal(parse_ok("p() <~> q()", SyntaxId::FOL), parse_ok("p() xor q()", SyntaxId::FOL)));
  CHECK(alpha_equal(parse_ok("p() <-> q()", SyntaxId::FOL), parse_ok("p() <=> q()", SyntaxId::FOL)));
  CHECK(alpha_equal(parse_ok("p() ⟹ q()", SyntaxId::FOL), parse_ok("p() => q()", SyntaxId::FOL)));
}

TEST_CASE("precedence: not > and > or/xor > implies/iff, arrows right-assoc") {
  FormulaPtr f = parse_ok("¬p() ∧ q() ∨ r() → s() → t()", SyntaxId::FOL);
  // ((¬p ∧ q) ∨ r) → (s → t)
  FormulaPtr want = implies(disj(conj(neg(atom("p")), atom("q")), atom("r")),
                            implies(atom("s"), atom("t")));
  CHECK(struct_equal(f, want));
}

TEST_CASE("quantifier scope extends maximally right") {
  FormulaPtr bare = parse_ok("∀x p(x) → q(x)", SyntaxId::FOL);
  FormulaPtr parens = parse_ok("∀x (p(x) → q(x))", SyntaxId::FOL);
  CHECK(alpha_equal(bare, parens));
  CHECK(free_variables(bare).empty());
}

TEST_CASE("FOL binds identifiers case-insensitively, nearest binder wins") {
  FormulaPtr f = parse_ok("∀X p(x)", SyntaxId::FOL);
  CHECK(free_variables(f).empty());
  // an exact match anywhere beats a nearer case-insensitive one
  FormulaPtr g = parse_ok("∀x ∀X p(x)", SyntaxId::FOL);
  CHECK(g->lhs->lhs->args[0] == Term::var("x"));
  // with no exact match, the nearest case-insensitive binder wins
  FormulaPtr h = parse_ok("∀y ∀Y p(Y, y)", SyntaxId::FOL);
  CHECK(h->lhs->lhs->args[0] == Term::var("Y"));
  CHECK(h->lhs->lhs->args[1] == Term::var("y"));
}

TEST_CASE("RFOL: only ?-prefixed identifiers are variables") {
  FormulaPtr f = parse_ok("∀?x p(?x, x)", SyntaxId::RFOL);
  CHECK(f->lhs->args[0] == Term::var("x"));
  CHECK(f->lhs->args[1] == Term::constant("x"));
}

TEST_CASE("TPTP: case determines variables, quoted names escape") {
  FormulaPtr f = parse_ok("![X]:('Rich'(X) => knows(X,'Bob'))", SyntaxId::TPTP);
  CHECK(f->lhs->lhs->pred == "Rich");
  CHECK(f->lhs->rhs->args[1] == Term::constant("Bob"));
  CHECK(print_formula(f, SyntaxId::TPTP) == "![X]:'Rich'(X) => knows(X,'Bob')");
}

TEST_CASE("TPTP fof units carry label and role") {
  auto r = parse_formula("fof(a0,axiom,man(socrates)).", SyntaxId::TPTP);
  REQUIRE(r.ok());
  CHECK((*r)->pred == "man");
  auto bad = parse_formula("fof(a0,hypothesis,man(socrates)).", SyntaxId::TPTP);
  REQUIRE_FALSE(bad.ok());
  CHECK(bad.error->message == "unsupported fof role 'hypothesis'");
}

TEST_CASE("diagnostics use the mismatched input shape") {
  auto r = parse_formula("man ∧ mortal(Socrates)", SyntaxId::FOL);
  REQUIRE_FALSE(r.ok());
  CHECK(r.error->message == "mismatched input '∧' expecting '('");
  CHECK(r.error->line == 1);
  CHECK(r.error->column == 5);

  auto missing = parse_formula("p(a", SyntaxId::FOL);
  REQUIRE_FALSE(missing.ok());
  CHECK(missing.error->message == "mismatched input '<EOF>' expecting ')'");

  auto trailing = parse_formula("p(a) q(b)", SyntaxId::FOL);
  REQUIRE_FALSE(trailing.ok());
  CHECK(trailing.error->message == "mismatched input 'q' expecting 'end of input'");

  auto stray = parse_formula("p(a) § q(b)", SyntaxId::FOL);
  REQUIRE_FALSE(stray.ok());
  CHECK(stray.error->message == "unexpected character '§'");
}

TEST_CASE("columns count code points, not bytes") {
  auto r = parse_formula("¬¬∧", SyntaxId::FOL);
  REQUIRE_FALSE(r.ok());
  CHECK(r.error->column == 3);
}

TEST_CASE("functions require at least one argument") {
  auto r = parse_formula("p(f())", SyntaxId::FOL);
  REQUIRE_FALSE(r.ok());
  CHECK(r.error->message == "function 'f' requires at least one argument");
}

TEST_CASE("round trip: print then reparse is alpha-identity") {
  testutil::Gen gen(31337);
  for (SyntaxId syntax : {SyntaxId::FOL, SyntaxId::RFOL, SyntaxId::TPTP}) {
    for (int i = 0; i < 200; ++i) {
      FormulaPtr f = close_universally(gen.formula(1 + gen.pick(5)));
      std::string text = print_formula(f, syntax);
      auto back = parse_formula(text, syntax);
      REQUIRE_MESSAGE(back.ok(), text, " -> ", err_msg(back));
      CHECK_MESSAGE(alpha_equal(f, *back), text);
    }
  }
}

TEST_CASE("translation commutes: any print/parse path preserves the formula") {
  testutil::Gen gen(555);
  SyntaxId all[] = {SyntaxId::FOL, SyntaxId::RFOL, SyntaxId::TPTP};
  for (int i = 0; i < 60; ++i) {
    FormulaPtr f = close_universally(gen.formula(1 + gen.pick(4)));
    for (SyntaxId a : all) {
      auto via_a = parse_formula(print_formula(f, a), a);
      REQUIRE(via_a.ok());
      for (SyntaxId b : all) {
        auto via_ab = parse_formula(print_formula(*via_a, b), b);
        REQUIRE(via_ab.ok());
        CHECK(alpha_equal(f, *via_ab));
      }
    }
  }
}

TEST_CASE("FOL printer renames binders shadowed by constant names") {
  // all socrates. p(socrates, Socrates-the-constant) cannot print the binder
  // as-is: FOL reparsing would capture the constant.
  FormulaPtr f = forall("socrates", atom("p", {Term::var("socrates"), Term::constant("Socrates")}));
  std::string text = print_formula(f, SyntaxId::FOL);
  auto back = parse_formula(text, SyntaxId::FOL);
  REQUIRE(back.ok());
  CHECK(alpha_equal(f, *back));
}

TEST_CASE("parser survives arbitrary input without crashing") {
  std::mt19937 rng(2024);
  std::string glyphs = "pqxya()[],.:?!&|~<>=-∀∃¬∧∨⊕→↔ '\n\t";
  for (int i = 0; i < 500; ++i) {
    std::string text;
    int n = std::uniform_int_distribution<int>(0, 80)(rng);
    for (int j = 0; j < n; ++j) {
      if (rng() % 8 == 0) {
        text += static_cast<char>(rng() % 256);
      } else {
        size_t k = rng() % glyphs.size();
        text += glyphs[k];
      }
    }
    for (SyntaxId s : {SyntaxId::FOL, SyntaxId::RFOL, SyntaxId::TPTP}) {
      auto r = parse_formula(text, s);
      if (!r.ok()) CHECK_FALSE(r.error->message.empty());
    }
  }
}

TEST_CASE("template documents parse into problems") {
  std::string raw =
      "Some preamble the model produced.\n"
      "Predicates:\n"
      "man(x) ::: x is a man\n"
      "mortal(x) ::: x is mortal\n"
      "Premises:\n"
      "∀x (man(x) → mortal(x)) ::: all men are mortal\n"
      "man(socrates) ::: Socrates is a man\n"
      "Conclusion:\n"
      "mortal(socrates) ::: Socrates is mortal\n"
      "----\n"
      "trailing chatter\n";
  SourceDoc doc = make_source_doc(raw, SyntaxId::FOL);
  CHECK(doc.shape == DocShape::Template);
  auto r = parse_problem(doc);
  REQUIRE_MESSAGE(r.ok(), err_msg(r));
  CHECK(r->premises.size() == 2);
  CHECK(r->premises[0].label == "p0");
  CHECK(r->premises[0].gloss == "all men are mortal");
  CHECK(r->premises[1].label == "p1");
  CHECK(r->conclusion_gloss == "Socrates is mortal");
  CHECK(r->declared_predicates.size() == 2);
  CHECK(r->declared_predicates[0].name == "man");
  CHECK(r->declared_predicates[0].arity == 1);

  // rendering and reparsing preserves the problem
  for (SyntaxId s : {SyntaxId::FOL, SyntaxId::RFOL, SyntaxId::TPTP}) {
    std::string printed = print_problem(*r, s);
    auto back = parse_problem(make_source_doc(printed, s));
    REQUIRE_MESSAGE(back.ok(), printed);
    CHECK(back->premises.size() == 2);
    CHECK(alpha_equal(r->conclusion, back->conclusion));
    CHECK(alpha_equal(r->premises[0].formula, back->premises[0].formula));
  }
}

TEST_CASE("template parse errors report absolute line numbers") {
  std::string raw =
      "Premises:\n"
      "man(socrates)\n"
      "man ∧ mortal(socrates)\n"
      "Conclusion:\n"
      "mortal(socrates)\n";
  auto r = parse_problem(make_source_doc(raw, SyntaxId::FOL));
  REQUIRE_FALSE(r.ok());
  CHECK(r.error->line == 3);
  CHECK(r.error->message == "mismatched input '∧' expecting '('");
}

TEST_CASE("a document without the template headers is bare") {
  SourceDoc doc = make_source_doc("p(a)\nq(b)\n", SyntaxId::FOL);
  CHECK(doc.shape == DocShape::Bare);
  auto r = parse_problem(doc);
  REQUIRE_FALSE(r.ok());

  SourceDoc missing = make_source_doc("Premises:\np(a)\n", SyntaxId::FOL);
  auto m = parse_problem(missing);
  REQUIRE_FALSE(m.ok());
  CHECK(m.error->message == "missing section 'Conclusion:'");
}

TEST_CASE("bare TPTP documents parse as fof unit lists") {
  std::string raw =
      "% comment\n"
      "fof(a0,axiom,![X]:(man(X) => mortal(X))).\n"
      "fof(a1,axiom,man(socrates)).\n"
      "fof(goal,conjecture,mortal(socrates)).\n";
  auto r = parse_problem(make_source_doc(raw, SyntaxId::TPTP));
  REQUIRE_MESSAGE(r.ok(), err_msg(r));
  CHECK(r->premises.size() == 2);
  CHECK(r->premises[0].label == "a0");
  CHECK(r->conclusion->pred == "mortal");

  auto two = parse_problem(make_source_doc(raw + "fof(g2,conjecture,man(socrates)).\n", SyntaxId::TPTP));
  REQUIRE_FALSE(two.ok());
  CHECK(two.error->message == "multiple conjectures");
}

TEST_CASE("print_tptp_file mangles labels that are not lower words") {
  Problem p;
  p.premises.push_back({"P0", atom("man", {Term::constant("socrates")}), ""});
  p.premises.push_back({"p0", forall("x", implies(atom("man", {Term::var("x")}),
                                                  atom("mortal", {Term::var("x")}))),
                        ""});
  p.conclusion = atom("mortal", {Term::constant("socrates")});
  std::vector<std::pair<std::string, std::string>> map;
  std::string text = print_tptp_file(p, {}, &map);
  REQUIRE(map.size() == 2);
  CHECK(map[0] == std::pair<std::string, std::string>{"P0", "p0"});
  CHECK(map[1] == std::pair<std::string, std::string>{"p0", "p0_2"});
  auto back = parse_problem(make_source_doc(text, SyntaxId::TPTP));
  REQUIRE_MESSAGE(back.ok(), text);
}

TEST_CASE("strict parens mode produces reparseable fully wrapped files") {
  testutil::Gen gen(777);
  for (int i = 0; i < 100; ++i) {
    Problem p;
    p.premises.push_back({"a0", close_universally(gen.formula(1 + gen.pick(4))), ""});
    p.conclusion = close_universally(gen.formula(1 + gen.pick(3)));
    std::string text = print_tptp_file(p, {.strict_parens = true});
    auto back = parse_problem(make_source_doc(text, SyntaxId::TPTP));
    REQUIRE_MESSAGE(back.ok(), text);
    CHECK(alpha_equal(back->premises[0].formula, p.premises[0].formula));
    CHECK(alpha_equal(back->conclusion, p.conclusion));
  }
}

TEST_CASE("translate converts bare documents line by line") {
  SourceDoc doc = make_source_doc("∀x (p(x) → q(x)) ::: note\np(a)\n", SyntaxId::FOL);
  auto r = translate(doc, SyntaxId::TPTP);
  REQUIRE_MESSAGE(r.ok(), err_msg(r));
  CHECK(*r ==
        "fof(a0,axiom,![X]:p(X) => q(X)). ::: note\n"
        "fof(a1,axiom,p(a)).\n");

  auto to_rfol = translate(doc, SyntaxId::RFOL);
  REQUIRE(to_rfol.ok());
  CHECK(*to_rfol == "∀?x (p(?x) → q(?x)) ::: note\np(a)\n");
}

TEST_CASE("translate converts template documents via the problem layer") {
  std::string raw =
      "Premises:\n"
      "∀x (man(x) → mortal(x))\n"
      "man(socrates)\n"
      "Conclusion:\n"
      "mortal(socrates)\n";
  auto r = translate(make_source_doc(raw, SyntaxId::FOL), SyntaxId::TPTP);
  REQUIRE_MESSAGE(r.ok(), err_msg(r));
  CHECK(*r ==
        "Premises:\n"
        "fof(p0,axiom,![X]:man(X) => mortal(X)).\n"
        "fof(p1,axiom,man(socrates)).\n"
        "Conclusion:\n"
        "fof(goal,conjecture,mortal(socrates)).\n");
}
