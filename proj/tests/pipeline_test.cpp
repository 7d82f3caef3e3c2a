#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <set>

#include "deduct/harness.hpp"
#include "deduct/pipeline.hpp"
#include "doctest.h"

using namespace deduct;

namespace {

std::string fixture(const std::string& name) {
  return std::string(DEDUCT_SOURCE_DIR) + "/tests/fixtures/" + name;
}

PerturbedSample passthrough(const Sample& s) {
  PerturbedSample p;
  p.base_id = s.id;
  p.variant = "O";
  p.context = s.context;
  p.question = s.question;
  p.label = s.label;
  p.rule = s.rule;
  p.gold_problem = s.gold_problem;
  return p;
}

std::vector<PerturbedSample> load_o_variant(const std::string& path) {
  std::vector<PerturbedSample> out;
  for (const auto& s : load_dataset(path)) out.push_back(passthrough(s));
  return out;
}

PerturbedSample tiny_sample() {
  Sample s;
  s.id = "tiny";
  s.context = {"If it rains, the street is wet.", "It rains."};
  s.question = "Is the street wet?";
  s.label = "yes";
  return passthrough(s);
}

struct ThrowingBackend : Backend {
  BackendResponse complete(const BackendRequest& req) override {
    throw BackendUnavailable("down for '" + req.sample_id + "'");
  }
};

}  // namespace

TEST_CASE("format and recovery names round-trip") {
  for (Format f : {Format::Direct, Format::CoT, Format::Formal})
    CHECK(format_from_name(format_name(f)) == f);
  for (Recovery r : {Recovery::NoRecovery, Recovery::ErrorType, Recovery::ErrorMessage,
                     Recovery::Warning})
    CHECK(recovery_from_name(recovery_name(r)) == r);
  CHECK(!format_from_name("poetry").has_value());
  CHECK(!recovery_from_name("retry").has_value());
}

TEST_CASE("build_prompt renders the template for each format") {
  PerturbedSample s = tiny_sample();
  RunConfig cfg;

  cfg.format = Format::Direct;
  std::string direct = build_prompt(s, cfg);
  CHECK(direct.find("Answer the question ONLY in 'yes' or 'no'") != std::string::npos);
  CHECK(direct.find("Context: If it rains, the street is wet. It rains.") != std::string::npos);
  CHECK(direct.find("Question: Is the street wet?") != std::string::npos);

  cfg.format = Format::CoT;
  std::string cot = build_prompt(s, cfg);
  CHECK(cot.find("Reasoning steps: [generate step-by-step") != std::string::npos);
  CHECK(cot.find("think step-by-step") != std::string::npos);

  cfg.format = Format::Formal;
  cfg.syntax = SyntaxId::FOL;
  std::string formal = build_prompt(s, cfg);
  CHECK(formal.find("The grammar of the first-order logic formular is defined as follows")
        != std::string::npos);
  CHECK(formal.find("1) logical conjunction of expr1 and expr2: expr1 ∧ expr2")
        != std::string::npos);
  CHECK(formal.find("8) logical existential quantification: ∃x") != std::string::npos);
  CHECK(formal.find("∀x (WalksInRain(x) → GetWet(x))") != std::string::npos);
  CHECK(formal.find("Problem: If it rains, the street is wet. It rains.") != std::string::npos);

  cfg.syntax = SyntaxId::TPTP;
  std::string tptp = build_prompt(s, cfg);
  CHECK(tptp.find("7) logical universal quantification: ![X]:") != std::string::npos);
  CHECK(tptp.find("![X]:'WalksInRain'(X) => 'GetWet'(X)") != std::string::npos);

  cfg.syntax = SyntaxId::RFOL;
  std::string rfol = build_prompt(s, cfg);
  CHECK(rfol.find("7) logical universal quantification: ∀?x") != std::string::npos);
  CHECK(rfol.find("∀?x (WalksInRain(?x) → GetWet(?x))") != std::string::npos);

  // deterministic
  CHECK(build_prompt(s, cfg) == rfol);
}

TEST_CASE("extract_answer follows the two extraction rules") {
  CHECK(extract_answer("Yes, that follows.", Format::Direct) == "yes");
  CHECK(extract_answer("NO", Format::Direct) == "no");
  CHECK(extract_answer("no, wait, yes", Format::Direct) == "no");  // first match wins
  CHECK(!extract_answer("maybe", Format::Direct).has_value());
  CHECK(!extract_answer("", Format::Direct).has_value());

  CHECK(extract_answer("Reasoning steps: 1. rain.\nAnswer: Yes", Format::CoT) == "yes");
  CHECK(extract_answer("answer:   no", Format::CoT) == "no");
  CHECK(extract_answer("Answer: no\nAnswer: yes", Format::CoT) == "yes");  // last marker
  CHECK(!extract_answer("The answer is unclear.", Format::CoT).has_value());
  CHECK(!extract_answer("yes but no marker", Format::CoT).has_value());
}

TEST_CASE("extract_problem pulls the template sections from a response") {
  std::string response =
      "Sure, here is the formalisation you asked for.\n"
      "Predicates:\n"
      "GoesToOffice(x) ::: x goes to the office.\n"
      "GoesHome(x) ::: x goes home.\n"
      "Premises:\n"
      "∀x (GoesToOffice(x) ∨ GoesHome(x)) ::: Either someone goes to the office or home.\n"
      "¬GoesToOffice(jill) ::: Jill does not go to the office.\n"
      "Conclusion:\n"
      "GoesHome(jill) ::: Jill goes home.\n";
  auto r = extract_problem(response, SyntaxId::FOL);
  REQUIRE(r.ok());
  CHECK(r->premises.size() == 2);
  CHECK(print_formula(r->conclusion, SyntaxId::FOL) == "GoesHome(jill)");
  CHECK(r->conclusion_gloss == "Jill goes home.");
  CHECK(r->declared_predicates.size() == 2);

  auto missing = extract_problem("Premises:\np(a)\n", SyntaxId::FOL);
  REQUIRE(!missing.ok());
  CHECK(missing.error->message.find("missing section") != std::string::npos);

  auto none = extract_problem("I could not formalise this problem.", SyntaxId::FOL);
  REQUIRE(!none.ok());
  CHECK(none.error->message.find("missing section") != std::string::npos);

  auto bad = extract_problem("Premises:\np(a) →\nConclusion:\np(a)\n", SyntaxId::FOL);
  REQUIRE(!bad.ok());
  CHECK(bad.error->message.find("mismatched input") != std::string::npos);
}

TEST_CASE("run_sample handles informal formats") {
  PerturbedSample s = tiny_sample();
  RunConfig cfg;
  cfg.format = Format::Direct;
  cfg.fallback_seed = 7;

  MockBackend good(MockScript{{"tiny", {"Answer: Yes"}}});
  SampleResult r = run_sample(s, cfg, good);
  CHECK(r.predicted == "yes");
  CHECK(r.parse_status == ParseStatus::NotApplicable);
  CHECK(!r.used_fallback);
  CHECK(r.refinement_rounds == 0);
  REQUIRE(r.transcript.size() == 1);
  CHECK(r.transcript[0].response == "Answer: Yes");

  MockBackend garbled(MockScript{{"tiny", {"zxqvtl"}}});
  SampleResult f1 = run_sample(s, cfg, garbled);
  CHECK(f1.used_fallback);
  CHECK((f1.predicted == "yes" || f1.predicted == "no"));
  MockBackend garbled2(MockScript{{"tiny", {"zxqvtl"}}});
  SampleResult f2 = run_sample(s, cfg, garbled2);
  CHECK(f1.predicted == f2.predicted);  // seeded fallback
}

TEST_CASE("the recovery ladder on the scripted fixture") {
  auto samples = load_o_variant(fixture("recovery_dataset.jsonl"));
  REQUIRE(samples.size() == 4);

  auto execution_rate = [&](Recovery recovery) {
    RunConfig cfg;
    cfg.format = Format::Formal;
    cfg.syntax = SyntaxId::FOL;
    cfg.recovery = recovery;
    MockBackend backend = MockBackend::from_json_file(fixture("recovery_mock.json"));
    auto results = run_all(samples, cfg, backend, {.parallelism = 1});
    size_t parsed = 0;
    for (const auto& r : results) {
      CHECK(r.refinement_rounds <= cfg.max_refinements);
      if (r.parse_status == ParseStatus::Parsed) ++parsed;
    }
    return static_cast<double>(parsed) / static_cast<double>(results.size());
  };

  CHECK(execution_rate(Recovery::NoRecovery) == doctest::Approx(0.5));
  CHECK(execution_rate(Recovery::ErrorType) == doctest::Approx(1.0));
  CHECK(execution_rate(Recovery::ErrorMessage) == doctest::Approx(1.0));
  CHECK(execution_rate(Recovery::Warning) == doctest::Approx(1.0));
}

TEST_CASE("recovery feedback carries the configured diagnostic") {
  auto samples = load_o_variant(fixture("recovery_dataset.jsonl"));
  RunConfig cfg;
  cfg.format = Format::Formal;
  cfg.recovery = Recovery::ErrorMessage;
  MockBackend backend = MockBackend::from_json_file(fixture("recovery_mock.json"));
  SampleResult r = run_sample(samples[0], cfg, backend);  // r0 is broken-then-good
  CHECK(r.parse_status == ParseStatus::Parsed);
  CHECK(r.refinement_rounds == 1);
  REQUIRE(r.transcript.size() == 2);
  CHECK(r.transcript[0].diagnostic.find("mismatched input") != std::string::npos);
  CHECK(r.transcript[1].request.find("Feedback: " + r.transcript[0].diagnostic)
        != std::string::npos);
  CHECK(r.transcript[1].request.find(
            "Please output the corrected formalisation in the same format.")
        != std::string::npos);

  cfg.recovery = Recovery::ErrorType;
  MockBackend backend2 = MockBackend::from_json_file(fixture("recovery_mock.json"));
  SampleResult r2 = run_sample(samples[0], cfg, backend2);
  CHECK(r2.transcript[0].diagnostic == "parsing error");

  cfg.recovery = Recovery::NoRecovery;
  MockBackend backend3 = MockBackend::from_json_file(fixture("recovery_mock.json"));
  SampleResult r3 = run_sample(samples[0], cfg, backend3);
  CHECK(r3.parse_status == ParseStatus::Failed);
  CHECK(r3.used_fallback);
  CHECK(r3.refinement_rounds == 0);
  CHECK(r3.transcript.size() == 1);
}

TEST_CASE("the warning strategy refines once on warnings and never falls back") {
  PerturbedSample s = tiny_sample();
  // conclusion predicate missing from the premises: QueryOnlySymbol warning
  std::string warned =
      "Premises:\nRains(sky) ::: it rains.\nConclusion:\nWet(street) ::: wet.\n";
  std::string clean =
      "Premises:\nWet(street) ::: wet.\nConclusion:\nWet(street) ::: wet.\n";

  RunConfig cfg;
  cfg.format = Format::Formal;
  cfg.recovery = Recovery::Warning;

  MockBackend improves(MockScript{{"tiny", {warned, clean}}});
  SampleResult r = run_sample(s, cfg, improves);
  CHECK(r.parse_status == ParseStatus::Parsed);
  CHECK(r.refinement_rounds == 1);
  CHECK(r.warnings.empty());
  CHECK(r.transcript[0].diagnostic.find("WARN QueryOnlySymbol") != std::string::npos);

  // a broken retry keeps the first successful parse instead of falling back
  MockBackend regresses(MockScript{{"tiny", {warned, "Premises:\n(((\nConclusion:\nq(a)\n"}}});
  SampleResult kept = run_sample(s, cfg, regresses);
  CHECK(kept.parse_status == ParseStatus::Parsed);
  CHECK(!kept.used_fallback);
  CHECK(!kept.warnings.empty());

  // warnings trigger at most one extra round
  MockBackend stubborn(MockScript{{"tiny", {warned, warned}}});
  SampleResult twice = run_sample(s, cfg, stubborn);
  CHECK(twice.parse_status == ParseStatus::Parsed);
  CHECK(twice.refinement_rounds == 1);
  CHECK(twice.transcript.size() == 2);
}

TEST_CASE("mock backend errors") {
  MockBackend backend(MockScript{{"a", {"one"}}});
  CHECK(backend.complete({"a", 0, "p", 1.0}).text == "one");
  CHECK_THROWS_AS(backend.complete({"a", 1, "p", 1.0}), ScriptExhausted);
  CHECK_THROWS_AS(backend.complete({"b", 0, "p", 1.0}), ScriptExhausted);
  CHECK_THROWS_AS(MockBackend::from_json_file("/nonexistent.json"), std::invalid_argument);
}

TEST_CASE("gold oracle run is an identity on the unperturbed fixtures") {
  auto samples = load_o_variant(fixture("perturb40.jsonl"));
  REQUIRE(samples.size() == 40);

  RunConfig cfg;
  cfg.format = Format::Formal;
  cfg.syntax = SyntaxId::FOL;
  OracleBackend oracle(samples, cfg);
  auto results = run_all(samples, cfg, oracle, {.parallelism = 4});
  Metrics m = evaluate(results, samples);
  CHECK(m.overall.accuracy == doctest::Approx(1.0));
  CHECK(m.overall.execution_rate == doctest::Approx(1.0));

  RunConfig direct;
  direct.format = Format::Direct;
  OracleBackend oracle2(samples, direct);
  auto direct_results = run_all(samples, direct, oracle2, {.parallelism = 4});
  Metrics dm = evaluate(direct_results, samples);
  CHECK(dm.overall.accuracy == doctest::Approx(1.0));
}

TEST_CASE("the oracle emits the configured syntax") {
  auto samples = load_o_variant(fixture("perturb40.jsonl"));
  for (SyntaxId syntax : {SyntaxId::RFOL, SyntaxId::TPTP}) {
    RunConfig cfg;
    cfg.format = Format::Formal;
    cfg.syntax = syntax;
    OracleBackend oracle(samples, cfg);
    std::string text = oracle.complete({samples[0].base_id, 0, "", 1.0}).text;
    auto parsed = extract_problem(text, syntax);
    REQUIRE(parsed.ok());
    CHECK(alpha_equal_problem(*parsed, *samples[0].gold_problem));
  }
}

TEST_CASE("run_all is ordered, parallel-safe, and resumable") {
  auto samples = load_o_variant(fixture("perturb40.jsonl"));
  RunConfig cfg;
  cfg.format = Format::Formal;
  OracleBackend oracle(samples, cfg);

  std::string path = "/tmp/deduct_test_results.jsonl";
  std::remove(path.c_str());
  auto results = run_all(samples, cfg, oracle, {.parallelism = 4, .results_path = path});
  REQUIRE(results.size() == samples.size());
  for (size_t i = 0; i < samples.size(); ++i) CHECK(results[i].id == samples[i].base_id);

  // results landed in input order on disk
  auto persisted = load_results(path);
  REQUIRE(persisted.size() == samples.size());
  for (size_t i = 0; i < samples.size(); ++i) CHECK(persisted[i].id == samples[i].base_id);

  // a resumed run never touches the backend again
  ThrowingBackend down;
  auto resumed = run_all(samples, cfg, down, {.parallelism = 4, .results_path = path});
  REQUIRE(resumed.size() == samples.size());
  for (size_t i = 0; i < samples.size(); ++i) {
    CHECK(resumed[i].id == results[i].id);
    CHECK(resumed[i].predicted == results[i].predicted);
  }
  std::remove(path.c_str());
}

TEST_CASE("backend outages abort the run") {
  auto samples = load_o_variant(fixture("recovery_dataset.jsonl"));
  RunConfig cfg;
  cfg.format = Format::Direct;
  ThrowingBackend down;
  CHECK_THROWS_AS(run_all(samples, cfg, down, {.parallelism = 2}), BackendUnavailable);
}

TEST_CASE("fallback answers are reproducible and order-independent") {
  auto samples = load_o_variant(fixture("recovery_dataset.jsonl"));
  RunConfig cfg;
  cfg.format = Format::Direct;
  cfg.fallback_seed = 99;

  std::map<std::string, std::vector<std::string>> silence;
  for (const auto& s : samples) silence[s.base_id] = {"hmm"};

  MockBackend a(silence), b(silence);
  auto forward = run_all(samples, cfg, a, {.parallelism = 1});
  std::vector<PerturbedSample> reversed(samples.rbegin(), samples.rend());
  auto backward = run_all(reversed, cfg, b, {.parallelism = 4});
  for (const auto& r : forward) {
    auto it = std::find_if(backward.begin(), backward.end(),
                           [&](const SampleResult& x) { return x.id == r.id; });
    REQUIRE(it != backward.end());
    CHECK(it->predicted == r.predicted);
    CHECK(r.used_fallback);
  }
}
