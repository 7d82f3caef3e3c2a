#include "deduct/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace deduct {

namespace {

using nlohmann::json;

constexpr int kSchemaVersion = 1;
const char* kVariantOrder[] = {"O", "E", "L", "T", "O_C", "E_C", "L_C", "T_C"};

void check_version(const json& j, int line) {
  auto it = j.find("schema_version");
  if (it == j.end()) return;
  if (!it->is_number_integer() || it->get<int>() != kSchemaVersion)
    throw SchemaError(line, "unsupported schema_version " + it->dump());
}

std::string require_string(const json& j, const char* key, int line) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string())
    throw SchemaError(line, std::string("missing or non-string field '") + key + "'");
  return it->get<std::string>();
}

FormulaPtr parse_fol(const std::string& text, int line, const char* what) {
  auto r = parse_formula(text, SyntaxId::FOL);
  if (!r.ok())
    throw SchemaError(line, std::string("bad ") + what + " formula '" + text +
                                "': " + r.error->message);
  return *r;
}

json problem_to_json(const Problem& p) {
  json premises = json::array();
  for (const auto& prem : p.premises)
    premises.push_back({{"label", prem.label},
                        {"formula", print_formula(prem.formula, SyntaxId::FOL)},
                        {"gloss", prem.gloss}});
  json decls = json::array();
  for (const auto& d : p.declared_predicates)
    decls.push_back({{"name", d.name}, {"arity", d.arity}, {"gloss", d.gloss}});
  return {{"premises", premises},
          {"conclusion", print_formula(p.conclusion, SyntaxId::FOL)},
          {"conclusion_gloss", p.conclusion_gloss},
          {"predicates", decls}};
}

Problem problem_from_json(const json& j, int line) {
  if (!j.is_object()) throw SchemaError(line, "gold_problem must be an object");
  Problem p;
  auto prems = j.find("premises");
  if (prems == j.end() || !prems->is_array())
    throw SchemaError(line, "gold_problem.premises must be an array");
  for (const auto& prem : *prems) {
    Premise out;
    out.label = require_string(prem, "label", line);
    out.formula = parse_fol(require_string(prem, "formula", line), line, "premise");
    out.gloss = prem.value("gloss", "");
    p.premises.push_back(std::move(out));
  }
  p.conclusion = parse_fol(require_string(j, "conclusion", line), line, "conclusion");
  p.conclusion_gloss = j.value("conclusion_gloss", "");
  for (const auto& d : j.value("predicates", json::array()))
    p.declared_predicates.push_back(
        {require_string(d, "name", line), d.value("arity", 0), d.value("gloss", "")});
  try {
    validate_problem(p);
  } catch (const std::invalid_argument& e) {
    throw SchemaError(line, std::string("invalid gold_problem: ") + e.what());
  }
  return p;
}

json parse_line(const std::string& line, int line_number) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded()) throw SchemaError(line_number, "invalid JSON");
  if (!j.is_object()) throw SchemaError(line_number, "expected a JSON object");
  return j;
}

const char* parse_status_name(ParseStatus s) {
  switch (s) {
    case ParseStatus::NotApplicable: return "not_applicable";
    case ParseStatus::Parsed: return "parsed";
    case ParseStatus::Failed: return "failed";
  }
  return "not_applicable";
}

ParseStatus parse_status_from_name(const std::string& name, int line) {
  if (name == "not_applicable") return ParseStatus::NotApplicable;
  if (name == "parsed") return ParseStatus::Parsed;
  if (name == "failed") return ParseStatus::Failed;
  throw SchemaError(line, "unknown parse_status '" + name + "'");
}

Warning::Kind warning_kind_from_name(const std::string& name, int line) {
  if (name == "QueryOnlySymbol") return Warning::Kind::QueryOnlySymbol;
  if (name == "ArityMismatch") return Warning::Kind::ArityMismatch;
  if (name == "SimilarNames") return Warning::Kind::SimilarNames;
  throw SchemaError(line, "unknown warning kind '" + name + "'");
}

// an answer counts as executed when a logical form (or informal answer)
// was actually extracted rather than guessed
bool result_parsed(const SampleResult& r) {
  if (r.parse_status == ParseStatus::Parsed) return true;
  return r.parse_status == ParseStatus::NotApplicable && !r.used_fallback;
}

std::string round2(double v) {
  double r = std::floor(v * 100.0 + 0.5) / 100.0;
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(2);
  out << r;
  return out.str();
}

void fill_rates(VariantMetrics& m) {
  if (m.n > 0) {
    m.accuracy = static_cast<double>(m.correct) / static_cast<double>(m.n);
    m.execution_rate = static_cast<double>(m.parsed) / static_cast<double>(m.n);
  }
  if (m.parsed > 0)
    m.valid_accuracy = static_cast<double>(m.correct_parsed) / static_cast<double>(m.parsed);
}

json variant_to_json(const VariantMetrics& m) {
  json j = {{"variant", m.variant},
            {"n", m.n},
            {"correct", m.correct},
            {"parsed", m.parsed},
            {"correct_parsed", m.correct_parsed},
            {"accuracy", m.accuracy},
            {"execution_rate", m.execution_rate}};
  j["valid_accuracy"] = m.valid_accuracy ? json(*m.valid_accuracy) : json(nullptr);
  return j;
}

template <typename Fn>
void for_each_jsonl_line(const std::string& path, Fn fn) {
  std::ifstream in(path);
  if (!in) throw SchemaError(0, "cannot open file: " + path);
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty()) continue;
    fn(line, line_number);
  }
}

}  // namespace

std::string sample_to_json(const Sample& s) {
  json j = {{"schema_version", kSchemaVersion},
            {"id", s.id},
            {"context", s.context},
            {"question", s.question},
            {"label", s.label},
            {"rule", rule_name(s.rule)}};
  if (s.gold_problem) j["gold_problem"] = problem_to_json(*s.gold_problem);
  if (s.negation_spans) {
    json spans = json::array();
    for (const auto& span : *s.negation_spans)
      spans.push_back({{"sentence", span.sentence},
                       {"begin", span.begin},
                       {"end", span.end},
                       {"replacement", span.replacement}});
    j["negation_spans"] = spans;
  }
  return j.dump();
}

Sample sample_from_json(const std::string& line, int line_number) {
  json j = parse_line(line, line_number);
  check_version(j, line_number);
  Sample s;
  s.id = require_string(j, "id", line_number);
  if (s.id.empty()) throw SchemaError(line_number, "empty sample id");
  auto ctx = j.find("context");
  if (ctx == j.end() || !ctx->is_array())
    throw SchemaError(line_number, "missing or non-array field 'context'");
  for (const auto& sentence : *ctx) {
    if (!sentence.is_string())
      throw SchemaError(line_number, "context entries must be strings");
    s.context.push_back(sentence.get<std::string>());
  }
  s.question = require_string(j, "question", line_number);
  s.label = require_string(j, "label", line_number);
  if (s.label != "yes" && s.label != "no")
    throw SchemaError(line_number, "label must be 'yes' or 'no', got '" + s.label + "'");
  std::string rule = require_string(j, "rule", line_number);
  auto tag = rule_from_name(rule);
  if (!tag) throw SchemaError(line_number, "unknown rule '" + rule + "'");
  s.rule = *tag;
  if (j.contains("gold_problem")) s.gold_problem = problem_from_json(j["gold_problem"], line_number);
  if (j.contains("negation_spans")) {
    if (!j["negation_spans"].is_array())
      throw SchemaError(line_number, "negation_spans must be an array");
    std::vector<NegationSpan> spans;
    for (const auto& span : j["negation_spans"]) {
      if (!span.is_object() || !span.contains("sentence") || !span.contains("begin") ||
          !span.contains("end") || !span.contains("replacement"))
        throw SchemaError(line_number, "negation span needs sentence/begin/end/replacement");
      spans.push_back({span["sentence"].get<size_t>(), span["begin"].get<size_t>(),
                       span["end"].get<size_t>(), span["replacement"].get<std::string>()});
    }
    s.negation_spans = std::move(spans);
  }
  return s;
}

std::vector<Sample> load_dataset(const std::string& path) {
  std::vector<Sample> out;
  std::set<std::string> seen;
  for_each_jsonl_line(path, [&](const std::string& line, int line_number) {
    Sample s = sample_from_json(line, line_number);
    if (!seen.insert(s.id).second)
      throw SchemaError(line_number, "duplicate sample id '" + s.id + "'");
    out.push_back(std::move(s));
  });
  return out;
}

std::string perturbed_to_json(const PerturbedSample& p) {
  json j = {{"schema_version", kSchemaVersion},
            {"id", p.base_id},
            {"variant", p.variant},
            {"context", p.context},
            {"question", p.question},
            {"label", p.label},
            {"seed", p.seed},
            {"injected_ids", p.injected_ids},
            {"negated", p.negated},
            {"rule", rule_name(p.rule)}};
  if (p.gold_problem) j["gold_problem"] = problem_to_json(*p.gold_problem);
  return j.dump();
}

PerturbedSample perturbed_from_json(const std::string& line, int line_number) {
  json j = parse_line(line, line_number);
  check_version(j, line_number);
  PerturbedSample p;
  p.base_id = require_string(j, "id", line_number);
  p.variant = require_string(j, "variant", line_number);
  auto ctx = j.find("context");
  if (ctx == j.end() || !ctx->is_array())
    throw SchemaError(line_number, "missing or non-array field 'context'");
  for (const auto& sentence : *ctx) p.context.push_back(sentence.get<std::string>());
  p.question = require_string(j, "question", line_number);
  p.label = require_string(j, "label", line_number);
  p.seed = j.value("seed", 0ull);
  for (const auto& id : j.value("injected_ids", json::array()))
    p.injected_ids.push_back(id.get<size_t>());
  p.negated = j.value("negated", false);
  auto tag = rule_from_name(j.value("rule", "modus_ponens"));
  if (!tag) throw SchemaError(line_number, "unknown rule");
  p.rule = *tag;
  if (j.contains("gold_problem")) p.gold_problem = problem_from_json(j["gold_problem"], line_number);
  return p;
}

std::vector<PerturbedSample> load_perturbed(const std::string& path) {
  std::vector<PerturbedSample> out;
  for_each_jsonl_line(path, [&](const std::string& line, int line_number) {
    out.push_back(perturbed_from_json(line, line_number));
  });
  return out;
}

std::string result_to_json(const SampleResult& r, bool elide_transcript) {
  json warnings = json::array();
  for (const auto& w : r.warnings)
    warnings.push_back({{"kind", warning_kind_name(w.kind)},
                        {"subjects", w.subjects},
                        {"detail", w.detail}});
  json transcript = json::array();
  if (!elide_transcript)
    for (const auto& t : r.transcript)
      transcript.push_back(
          {{"request", t.request}, {"response", t.response}, {"diagnostic", t.diagnostic}});
  json j = {{"schema_version", kSchemaVersion},
            {"id", r.id},
            {"variant", r.variant},
            {"predicted", r.predicted},
            {"parse_status", parse_status_name(r.parse_status)},
            {"used_fallback", r.used_fallback},
            {"refinement_rounds", r.refinement_rounds},
            {"warnings", warnings},
            {"transcript", transcript}};
  return j.dump();
}

SampleResult result_from_json(const std::string& line, int line_number) {
  json j = parse_line(line, line_number);
  check_version(j, line_number);
  SampleResult r;
  r.id = require_string(j, "id", line_number);
  r.variant = j.value("variant", "");
  r.predicted = require_string(j, "predicted", line_number);
  r.parse_status = parse_status_from_name(require_string(j, "parse_status", line_number),
                                          line_number);
  r.used_fallback = j.value("used_fallback", false);
  r.refinement_rounds = j.value("refinement_rounds", 0);
  for (const auto& w : j.value("warnings", json::array())) {
    Warning warning;
    warning.kind = warning_kind_from_name(w.value("kind", ""), line_number);
    for (const auto& subject : w.value("subjects", json::array()))
      warning.subjects.push_back(subject.get<std::string>());
    warning.detail = w.value("detail", "");
    r.warnings.push_back(std::move(warning));
  }
  for (const auto& t : j.value("transcript", json::array()))
    r.transcript.push_back(
        {t.value("request", ""), t.value("response", ""), t.value("diagnostic", "")});
  return r;
}

std::vector<SampleResult> load_results(const std::string& path) {
  std::vector<SampleResult> out;
  for_each_jsonl_line(path, [&](const std::string& line, int line_number) {
    out.push_back(result_from_json(line, line_number));
  });
  return out;
}

Metrics evaluate(const std::vector<SampleResult>& results,
                 const std::vector<PerturbedSample>& gold) {
  std::map<std::string, const PerturbedSample*> by_key;
  for (const auto& g : gold) by_key[g.base_id + "\x1f" + g.variant] = &g;

  std::map<std::string, VariantMetrics> rows;
  Metrics m;
  m.overall.variant = "overall";
  for (const auto& r : results) {
    auto it = by_key.find(r.id + "\x1f" + r.variant);
    if (it == by_key.end())
      throw MissingGold("no gold sample for result '" + r.id + "' variant '" + r.variant + "'");
    bool correct = r.predicted == it->second->label;
    bool parsed = result_parsed(r);
    auto [row, fresh] = rows.try_emplace(r.variant);
    if (fresh) row->second.variant = r.variant;
    for (VariantMetrics* v : {&m.overall, &row->second}) {
      ++v->n;
      if (correct) ++v->correct;
      if (parsed) ++v->parsed;
      if (correct && parsed) ++v->correct_parsed;
    }
  }
  fill_rates(m.overall);
  for (const char* v : kVariantOrder) {
    auto it = rows.find(v);
    if (it == rows.end()) continue;
    fill_rates(it->second);
    m.per_variant.push_back(it->second);
    rows.erase(it);
  }
  for (auto& [name, row] : rows) {  // variants outside the standard eight
    fill_rates(row);
    m.per_variant.push_back(row);
  }
  return m;
}

std::optional<ReportFormat> report_format_from_name(const std::string& name) {
  if (name == "markdown" || name == "md") return ReportFormat::Markdown;
  if (name == "csv") return ReportFormat::Csv;
  if (name == "json") return ReportFormat::Json;
  return std::nullopt;
}

std::string report(const Metrics& m, ReportFormat format) {
  if (format == ReportFormat::Json) {
    json j = {{"schema_version", kSchemaVersion}, {"overall", variant_to_json(m.overall)}};
    json rows = json::array();
    for (const auto& v : m.per_variant) rows.push_back(variant_to_json(v));
    j["per_variant"] = rows;
    return j.dump(2) + "\n";
  }

  auto valid = [&](const VariantMetrics& v, const char* missing) {
    return v.valid_accuracy ? round2(*v.valid_accuracy) : std::string(missing);
  };

  if (format == ReportFormat::Csv) {
    std::string out = "variant,n,accuracy,execution_rate,valid_accuracy\n";
    for (const auto& v : m.per_variant)
      out += v.variant + "," + std::to_string(v.n) + "," + round2(v.accuracy) + "," +
             round2(v.execution_rate) + "," + valid(v, "") + "\n";
    out += "overall," + std::to_string(m.overall.n) + "," + round2(m.overall.accuracy) + "," +
           round2(m.overall.execution_rate) + "," + valid(m.overall, "") + "\n";
    return out;
  }

  std::string header = "| metric |";
  std::string rule = "| --- |";
  for (const auto& v : m.per_variant) {
    header += " " + v.variant + " |";
    rule += " --- |";
  }
  header += " overall |";
  rule += " --- |";
  std::string out = header + "\n" + rule + "\n";
  auto row = [&](const std::string& name, auto get) {
    out += "| " + name + " |";
    for (const auto& v : m.per_variant) out += " " + get(v) + " |";
    out += " " + get(m.overall) + " |\n";
  };
  row("n", [](const VariantMetrics& v) { return std::to_string(v.n); });
  row("accuracy", [&](const VariantMetrics& v) { return round2(v.accuracy); });
  row("execution_rate", [&](const VariantMetrics& v) { return round2(v.execution_rate); });
  row("valid_accuracy", [&](const VariantMetrics& v) { return valid(v, "—"); });
  return out;
}

std::vector<Sample> convert_logicbench(const std::string& json_text) {
  json doc = json::parse(json_text);
  std::vector<Sample> out;

  std::string axiom = doc.is_object() ? doc.value("axiom", "") : "";
  auto tag = rule_from_name(axiom);
  RuleTag rule = tag ? *tag : RuleTag::ModusPonens;

  const json* samples = nullptr;
  if (doc.is_array()) samples = &doc;
  else if (doc.contains("samples")) samples = &doc["samples"];
  else if (doc.contains("data_samples")) samples = &doc["data_samples"];
  if (!samples || !samples->is_array())
    throw SchemaError(0, "no samples array in LogicBench file");

  int i = 0;
  for (const auto& entry : *samples) {
    std::string context = entry.value("context", "");
    int j = 0;
    for (const auto& qa : entry.value("qa_pairs", json::array())) {
      Sample s;
      s.id = (axiom.empty() ? "sample" : axiom) + "_" + std::to_string(i) + "_" +
             std::to_string(j);
      s.context = {context};
      s.question = qa.value("question", "");
      std::string answer = qa.value("answer", "");
      for (auto& c : answer) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      s.label = answer == "yes" ? "yes" : "no";
      s.rule = rule;
      out.push_back(std::move(s));
      ++j;
    }
    ++i;
  }
  return out;
}

}  // namespace deduct
