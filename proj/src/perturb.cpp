#include "deduct/perturb.hpp"

#include <algorithm>
#include <fstream>
#include <random>

#include "deduct/syntax.hpp"

namespace deduct {

namespace {

struct RuleName {
  RuleTag tag;
  const char* name;
};

constexpr RuleName kRules[] = {
    {RuleTag::BidirectionalDilemma, "bidirectional_dilemma"},
    {RuleTag::ConstructiveDilemma, "constructive_dilemma"},
    {RuleTag::DisjunctiveSyllogism, "disjunctive_syllogism"},
    {RuleTag::ExistentialGeneralization, "existential_generalization"},
    {RuleTag::HypotheticalSyllogism, "hypothetical_syllogism"},
    {RuleTag::ModusPonens, "modus_ponens"},
    {RuleTag::ModusTollens, "modus_tollens"},
    {RuleTag::UniversalInstantiation, "universal_instantiation"},
    {RuleTag::DestructiveDilemma, "destructive_dilemma"},
};

const char* kTautologies[] = {
    "False is not true.",
    "True is not false.",
    "Not false is true.",
    "Not true is false.",
    "False and true is not true.",
    "False and not true is false.",
    "False and not false is false.",
    "Not true and true is false.",
    "Not true and false is false.",
    "True and false is not true.",
    "True and true is not false.",
    "True and not false is true.",
    "Not false and true is true.",
    "Not false and false is false.",
    "True or not true is true.",
    "True or true is true.",
    "False or not false is true.",
    "False or not true is false.",
    "Not true or false is not true.",
    "Not true or true is true.",
    "Not false or false is true.",
    "Not false or true is not false.",
};

FormulaPtr fol(const std::string& text) {
  auto r = parse_formula(text, SyntaxId::FOL);
  if (!r.ok()) throw std::logic_error("bad schema formula: " + text);
  return *r;
}

Problem schema(std::vector<std::string> premises, const std::string& conclusion) {
  Problem p;
  int i = 0;
  for (const auto& text : premises) p.premises.push_back({"p" + std::to_string(i++), fol(text), ""});
  p.conclusion = fol(conclusion);
  return p;
}

FormulaPtr toggle(const FormulaPtr& f) {
  return f->kind == Formula::Kind::Not ? f->lhs : neg(f);
}

// Rewrites the body under a (possibly empty) quantifier prefix; fn returns
// nullptr when the body does not match the rule's premise shape.
FormulaPtr under_quantifiers(const FormulaPtr& f, FormulaPtr (*fn)(const FormulaPtr&)) {
  if (is_quantifier(f->kind)) {
    FormulaPtr body = under_quantifiers(f->lhs, fn);
    if (!body) return nullptr;
    return f->kind == Formula::Kind::Forall ? forall(f->var, body) : exists(f->var, body);
  }
  return fn(f);
}

FormulaPtr negate_consequent(const FormulaPtr& f) {
  if (f->kind != Formula::Kind::Implies) return nullptr;
  return implies(f->lhs, toggle(f->rhs));
}

FormulaPtr negate_antecedent(const FormulaPtr& f) {
  if (f->kind != Formula::Kind::Implies) return nullptr;
  return implies(toggle(f->lhs), f->rhs);
}

FormulaPtr negate_second_disjunct(const FormulaPtr& f) {
  if (f->kind != Formula::Kind::Or) return nullptr;
  return disj(f->lhs, toggle(f->rhs));
}

FormulaPtr negate_fact(const FormulaPtr& f) {
  if (f->kind != Formula::Kind::Atom && f->kind != Formula::Kind::Not) return nullptr;
  return toggle(f);
}

FormulaPtr negate_body(const FormulaPtr& f) { return toggle(f); }

// The context edit each rule performs on the gold premises: which premise
// shape to look for and how to negate inside it.
FormulaPtr (*premise_rewrite(RuleTag rule))(const FormulaPtr&) {
  switch (rule) {
    case RuleTag::BidirectionalDilemma:
    case RuleTag::ConstructiveDilemma:
    case RuleTag::ModusPonens:
      return negate_consequent;
    case RuleTag::HypotheticalSyllogism:
    case RuleTag::ModusTollens:
      return negate_antecedent;
    case RuleTag::DisjunctiveSyllogism:
      return negate_second_disjunct;
    case RuleTag::ExistentialGeneralization:
      return negate_fact;
    case RuleTag::UniversalInstantiation:
      return negate_body;
    case RuleTag::DestructiveDilemma:
      break;
  }
  throw UnsupportedRule("no counterfactual schema for rule '" + std::string(rule_name(rule)) +
                        "'");
}

Problem rewrite_gold(const Problem& gold, RuleTag rule) {
  auto fn = premise_rewrite(rule);
  Problem out = gold;
  bool ui = rule == RuleTag::UniversalInstantiation;
  for (auto& prem : out.premises) {
    if (ui && prem.formula->kind != Formula::Kind::Forall) continue;
    FormulaPtr rewritten = under_quantifiers(prem.formula, fn);
    if (!rewritten) continue;
    prem.formula = rewritten;
    return out;
  }
  throw MissingAnnotation("gold problem has no premise matching rule '" +
                          std::string(rule_name(rule)) + "'");
}

}  // namespace

const char* rule_name(RuleTag r) {
  for (const auto& e : kRules)
    if (e.tag == r) return e.name;
  return "unknown";
}

std::optional<RuleTag> rule_from_name(const std::string& name) {
  for (const auto& e : kRules)
    if (name == e.name) return e.tag;
  return std::nullopt;
}

const char* corpus_kind_name(CorpusKind k) {
  switch (k) {
    case CorpusKind::Encyclopedic: return "encyclopedic";
    case CorpusKind::Logical: return "logical";
    case CorpusKind::Tautological: return "tautological";
  }
  return "encyclopedic";
}

std::optional<CorpusKind> corpus_kind_from_name(const std::string& name) {
  if (name == "encyclopedic") return CorpusKind::Encyclopedic;
  if (name == "logical") return CorpusKind::Logical;
  if (name == "tautological") return CorpusKind::Tautological;
  return std::nullopt;
}

NoiseCorpus load_corpus(const std::string& path, CorpusKind kind) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open corpus file: " + path);
  NoiseCorpus corpus;
  corpus.kind = kind;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty()) continue;
    if (line.back() != '.')
      throw std::invalid_argument("corpus sentence missing final period: " + line);
    corpus.sentences.push_back(line);
  }
  if (corpus.sentences.empty()) throw std::invalid_argument("empty corpus file: " + path);
  if (kind == CorpusKind::Tautological) {
    bool ok = corpus.sentences.size() == std::size(kTautologies);
    for (size_t i = 0; ok && i < corpus.sentences.size(); ++i)
      ok = corpus.sentences[i] == kTautologies[i];
    if (!ok)
      throw std::invalid_argument("tautological corpus does not match the 22 shipped sentences");
  }
  return corpus;
}

uint64_t derive_seed(uint64_t base, const std::string& id) {
  uint64_t h = 14695981039346656037ull;
  auto mix = [&h](unsigned char byte) {
    h ^= byte;
    h *= 1099511628211ull;
  };
  for (int i = 0; i < 8; ++i) mix(static_cast<unsigned char>(base >> (8 * i)));
  for (unsigned char c : id) mix(c);
  return h;
}

PerturbedSample inject_noise(const Sample& s, const NoiseCorpus& corpus, int k, uint64_t seed) {
  if (k != 1 && k != 2 && k != 4) throw std::invalid_argument("k must be 1, 2 or 4");
  if (corpus.sentences.size() < static_cast<size_t>(k))
    throw CorpusTooSmall("corpus has " + std::to_string(corpus.sentences.size()) +
                         " sentences, need " + std::to_string(k));

  std::mt19937_64 rng(seed);
  std::vector<size_t> indices(corpus.sentences.size());
  for (size_t i = 0; i < indices.size(); ++i) indices[i] = i;
  PerturbedSample out;
  for (int i = 0; i < k; ++i) {
    size_t j = i + rng() % (indices.size() - i);
    std::swap(indices[i], indices[j]);
    out.injected_ids.push_back(indices[i]);
  }

  out.base_id = s.id;
  out.seed = seed;
  out.question = s.question;
  out.label = s.label;
  out.rule = s.rule;
  out.gold_problem = s.gold_problem;
  for (size_t id : out.injected_ids) out.context.push_back(corpus.sentences[id]);
  out.context.insert(out.context.end(), s.context.begin(), s.context.end());
  return out;
}

SchemaPair negate_schema(RuleTag rule) {
  switch (rule) {
    case RuleTag::BidirectionalDilemma:
      return {schema({"∀x (p(x) → q(x))", "∀x (r(x) → s(x))", "p(a) ∨ ¬s(a)"}, "q(a) ∨ ¬r(a)"),
              schema({"∀x (p(x) → ¬q(x))", "∀x (r(x) → s(x))", "p(a) ∨ ¬s(a)"},
                     "¬q(a) ∨ ¬r(a)")};
    case RuleTag::ConstructiveDilemma:
      return {schema({"∀x (p(x) → q(x))", "∀x (r(x) → s(x))", "p(a) ∨ r(a)"}, "q(a) ∨ s(a)"),
              schema({"∀x (p(x) → ¬q(x))", "∀x (r(x) → s(x))", "p(a) ∨ r(a)"}, "¬q(a) ∨ s(a)")};
    case RuleTag::DisjunctiveSyllogism:
      // the negated conclusion is ¬q(a): with premise p ∨ ¬q and ¬p(a) that
      // is what follows (the source table prints q(a), which nothing entails)
      return {schema({"∀x (p(x) ∨ q(x))", "¬p(a)"}, "q(a)"),
              schema({"∀x (p(x) ∨ ¬q(x))", "¬p(a)"}, "¬q(a)")};
    case RuleTag::ExistentialGeneralization:
      return {schema({"p(a)"}, "∃x p(x)"), schema({"¬p(a)"}, "∃x ¬p(x)")};
    case RuleTag::HypotheticalSyllogism:
      return {schema({"∀x (p(x) → q(x))", "∀x (q(x) → r(x))"}, "p(a) → r(a)"),
              schema({"∀x (¬p(x) → q(x))", "∀x (q(x) → r(x))"}, "¬p(a) → r(a)")};
    case RuleTag::ModusPonens:
      return {schema({"∀x (p(x) → q(x))", "p(a)"}, "q(a)"),
              schema({"∀x (p(x) → ¬q(x))", "p(a)"}, "¬q(a)")};
    case RuleTag::ModusTollens:
      return {schema({"∀x (p(x) → q(x))", "¬q(a)"}, "¬p(a)"),
              schema({"∀x (¬p(x) → q(x))", "¬q(a)"}, "p(a)")};
    case RuleTag::UniversalInstantiation:
      return {schema({"∀x p(x)"}, "p(a)"), schema({"∀x ¬p(x)"}, "¬p(a)")};
    case RuleTag::DestructiveDilemma:
      break;
  }
  throw UnsupportedRule("no counterfactual schema for rule '" + std::string(rule_name(rule)) +
                        "'");
}

PerturbedSample apply_counterfactual(const Sample& s) {
  if (!s.negation_spans)
    throw MissingAnnotation("sample '" + s.id + "' carries no negation spans");
  premise_rewrite(s.rule);  // rejects rules outside the schema table

  PerturbedSample out;
  out.base_id = s.id;
  out.context = s.context;
  out.question = s.question;
  out.negated = true;
  out.rule = s.rule;
  out.label = s.label == "yes" ? "no" : "yes";

  // apply edits back to front so earlier spans keep their offsets
  std::vector<NegationSpan> spans = *s.negation_spans;
  std::stable_sort(spans.begin(), spans.end(), [](const NegationSpan& a, const NegationSpan& b) {
    if (a.sentence != b.sentence) return a.sentence > b.sentence;
    return a.begin > b.begin;
  });
  for (const auto& span : spans) {
    if (span.sentence >= out.context.size())
      throw SpanOutOfRange("sentence index " + std::to_string(span.sentence) + " out of range");
    std::string& sentence = out.context[span.sentence];
    if (span.begin > span.end || span.end > sentence.size())
      throw SpanOutOfRange("span [" + std::to_string(span.begin) + ", " +
                           std::to_string(span.end) + ") out of range");
    sentence = sentence.substr(0, span.begin) + span.replacement + sentence.substr(span.end);
  }

  if (s.gold_problem) out.gold_problem = rewrite_gold(*s.gold_problem, s.rule);
  return out;
}

Suite build_suite(const std::vector<Sample>& dataset, const SuiteConfig& cfg) {
  Suite suite;
  suite.k = cfg.k;
  const char* noise_variants[] = {"E", "L", "T"};
  for (const char* v :
       {"O", "E", "L", "T", "O_C", "E_C", "L_C", "T_C"})
    suite.seeds[v] = derive_seed(cfg.base_seed, v);

  for (const auto& s : dataset) {
    PerturbedSample o;
    o.base_id = s.id;
    o.variant = "O";
    o.context = s.context;
    o.question = s.question;
    o.label = s.label;
    o.rule = s.rule;
    o.gold_problem = s.gold_problem;
    suite.variants["O"].push_back(std::move(o));
  }

  for (const char* v : noise_variants) {
    auto corpus = cfg.corpora.find(v);
    if (corpus == cfg.corpora.end())
      throw std::invalid_argument(std::string("no corpus configured for variant ") + v);
    for (const auto& s : dataset) {
      PerturbedSample p = inject_noise(s, corpus->second, cfg.k, derive_seed(suite.seeds[v], s.id));
      p.variant = v;
      suite.variants[v].push_back(std::move(p));
    }
  }

  // one counterfactual per unique (rule, context), alternating the original
  // label inside each rule so the flipped suite comes out balanced
  std::vector<std::vector<const Sample*>> groups;
  std::map<std::string, size_t> group_index;
  for (const auto& s : dataset) {
    if (!s.negation_spans || s.rule == RuleTag::DestructiveDilemma) continue;
    std::string key = std::string(rule_name(s.rule)) + "\x1f";
    for (const auto& sentence : s.context) key += sentence + "\x1f";
    auto [it, fresh] = group_index.emplace(key, groups.size());
    if (fresh) groups.emplace_back();
    groups[it->second].push_back(&s);
  }
  std::map<RuleTag, int> alternation;
  std::vector<const Sample*> chosen;
  for (const auto& group : groups) {
    const char* want = (alternation[group.front()->rule]++ % 2 == 0) ? "yes" : "no";
    const Sample* pick = group.front();
    for (const Sample* cand : group)
      if (cand->label == want) {
        pick = cand;
        break;
      }
    chosen.push_back(pick);
  }

  for (const Sample* s : chosen) {
    PerturbedSample c = apply_counterfactual(*s);
    c.variant = "O_C";
    suite.variants["O_C"].push_back(c);
    for (const char* v : noise_variants) {
      std::string cv = std::string(v) + "_C";
      Sample flipped;
      flipped.id = s->id;
      flipped.context = c.context;
      flipped.question = c.question;
      flipped.label = c.label;
      flipped.rule = c.rule;
      flipped.gold_problem = c.gold_problem;
      PerturbedSample p = inject_noise(flipped, cfg.corpora.at(v), cfg.k,
                                       derive_seed(suite.seeds[cv], s->id));
      p.variant = cv;
      p.negated = true;
      suite.variants[cv].push_back(std::move(p));
    }
  }

  for (const char* v : {"O", "E", "L", "T", "O_C", "E_C", "L_C", "T_C"})
    suite.variants.try_emplace(v);  // empty datasets still list every variant
  return suite;
}

}  // namespace deduct
