#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "deduct/ast.hpp"

namespace deduct {

enum class RuleTag {
  BidirectionalDilemma,
  ConstructiveDilemma,
  DisjunctiveSyllogism,
  ExistentialGeneralization,
  HypotheticalSyllogism,
  ModusPonens,
  ModusTollens,
  UniversalInstantiation,
  DestructiveDilemma,  // recognized but has no counterfactual schema
};

const char* rule_name(RuleTag r);
std::optional<RuleTag> rule_from_name(const std::string& name);

// A recorded manual edit: replace context[sentence][begin, end) with text.
struct NegationSpan {
  size_t sentence = 0;
  size_t begin = 0;
  size_t end = 0;
  std::string replacement;
};

struct Sample {
  std::string id;
  std::vector<std::string> context;
  std::string question;
  std::string label;  // "yes" or "no"
  RuleTag rule = RuleTag::ModusPonens;
  std::optional<Problem> gold_problem;
  std::optional<std::vector<NegationSpan>> negation_spans;
};

enum class CorpusKind { Encyclopedic, Logical, Tautological };

const char* corpus_kind_name(CorpusKind k);
std::optional<CorpusKind> corpus_kind_from_name(const std::string& name);

struct NoiseCorpus {
  CorpusKind kind = CorpusKind::Encyclopedic;
  std::vector<std::string> sentences;
};

// Loads a newline-delimited sentence file. The tautological corpus is pinned
// to the 22 shipped sentences and refuses anything else.
NoiseCorpus load_corpus(const std::string& path, CorpusKind kind);

struct PerturbedSample {
  std::string base_id;
  std::string variant;  // O, E, L, T, O_C, E_C, L_C, T_C
  std::vector<std::string> context;
  std::string question;
  std::string label;
  uint64_t seed = 0;
  std::vector<size_t> injected_ids;  // corpus indices, in prepend order
  bool negated = false;
  std::optional<Problem> gold_problem;
  RuleTag rule = RuleTag::ModusPonens;
};

struct CorpusTooSmall : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UnsupportedRule : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SpanOutOfRange : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct MissingAnnotation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// FNV-1a over the base seed and the sample id, for per-sample determinism.
uint64_t derive_seed(uint64_t base, const std::string& id);

// k distinct corpus sentences prepended before the context, label unchanged.
PerturbedSample inject_noise(const Sample& s, const NoiseCorpus& corpus, int k, uint64_t seed);

struct SchemaPair {
  Problem original;
  Problem negated;
  bool label_flip = true;
};

// The counterfactual schema table: both entailments over predicate variables
// p, q, r, s and the constant a, provable as-is by the built-in prover.
SchemaPair negate_schema(RuleTag rule);

// Replays the recorded negation spans and rewrites the gold problem's
// premises per the rule schema; label flips, the question is untouched.
PerturbedSample apply_counterfactual(const Sample& s);

struct SuiteConfig {
  uint64_t base_seed = 0;
  int k = 4;
  std::map<std::string, NoiseCorpus> corpora;  // keys E, L, T
};

struct Suite {
  std::map<std::string, std::vector<PerturbedSample>> variants;
  std::map<std::string, uint64_t> seeds;
  int k = 4;
};

// O plus the seven perturbed variants. Noise variants keep the original
// label distribution; the counterfactual set picks one sample per unique
// (rule, context) pair, alternating labels so the flipped set stays balanced.
Suite build_suite(const std::vector<Sample>& dataset, const SuiteConfig& cfg);

}  // namespace deduct
