#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "deduct/harness.hpp"
#include "deduct/lint.hpp"
#include "deduct/perturb.hpp"
#include "deduct/pipeline.hpp"
#include "deduct/prover.hpp"
#include "deduct/syntax.hpp"
#include "json.hpp"

namespace {

using namespace deduct;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

SyntaxId parse_syntax(const std::string& name) {
  auto s = syntax_from_name(name);
  if (!s) throw std::runtime_error("unknown syntax '" + name + "'");
  return *s;
}

Problem load_problem(const std::string& path, SyntaxId syntax) {
  SourceDoc doc = make_source_doc(read_file(path), syntax);
  auto parsed = parse_problem(doc);
  if (!parsed.ok())
    throw std::runtime_error("line " + std::to_string(parsed.error->line) + ", column " +
                             std::to_string(parsed.error->column) + ": " +
                             parsed.error->message);
  return *parsed;
}

void write_or_print(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot write file: " + out_path);
  out << text;
}

int cmd_parse(const std::string& file, const std::string& syntax_name) {
  SyntaxId syntax = parse_syntax(syntax_name);
  Problem p = load_problem(file, syntax);
  std::cout << print_problem(p, syntax);
  return 0;
}

int cmd_translate(const std::string& file, const std::string& from, const std::string& to) {
  SourceDoc doc = make_source_doc(read_file(file), parse_syntax(from));
  auto result = translate(doc, parse_syntax(to));
  if (!result.ok()) throw std::runtime_error(result.error->message);
  std::cout << *result;
  return 0;
}

int cmd_lint(const std::string& file, const std::string& syntax_name) {
  Problem p = load_problem(file, parse_syntax(syntax_name));
  for (const auto& w : lint(p)) std::cout << render(w) << "\n";
  return 0;
}

int cmd_prove(const std::string& file, const std::string& syntax_name,
              const std::string& external, double max_seconds, size_t max_clauses,
              bool show_proof) {
  Problem p = load_problem(file, parse_syntax(syntax_name));
  ProverBudget budget{max_clauses, max_seconds};
  if (!external.empty()) {
    ProofOutcome outcome = prove_external(p, external, budget);
    std::cout << (outcome.entailed() ? "yes" : "no") << "\n";
    return 0;
  }
  Decision d = decide(p, budget);
  std::cout << d.answer << "\n";
  if (show_proof)
    for (const auto& line : d.outcome.proof) std::cerr << line << "\n";
  return 0;
}

int cmd_perturb(const std::string& dataset_path, const std::string& variant, int k,
                uint64_t seed, const std::string& corpus_path, const std::string& out_path) {
  auto dataset = load_dataset(dataset_path);
  bool counterfactual = variant.size() > 2 && variant.substr(1) == "_C";
  std::string noise_kind = counterfactual ? variant.substr(0, 1) : variant;

  NoiseCorpus corpus;
  if (noise_kind != "O") {
    CorpusKind kind;
    if (noise_kind == "E") kind = CorpusKind::Encyclopedic;
    else if (noise_kind == "L") kind = CorpusKind::Logical;
    else if (noise_kind == "T") kind = CorpusKind::Tautological;
    else throw std::runtime_error("unknown variant '" + variant + "'");
    if (corpus_path.empty())
      throw std::runtime_error("variant " + variant + " needs --corpus");
    corpus = load_corpus(corpus_path, kind);
  } else if (variant != "O" && variant != "O_C") {
    throw std::runtime_error("unknown variant '" + variant + "'");
  }

  uint64_t variant_seed = derive_seed(seed, variant);
  std::string out;
  for (const auto& s : dataset) {
    PerturbedSample p;
    if (variant == "O") {
      p.base_id = s.id;
      p.context = s.context;
      p.question = s.question;
      p.label = s.label;
      p.rule = s.rule;
      p.gold_problem = s.gold_problem;
    } else if (!counterfactual) {
      p = inject_noise(s, corpus, k, derive_seed(variant_seed, s.id));
    } else {
      if (!s.negation_spans) continue;  // unannotated samples have no counterfactual
      PerturbedSample flipped = apply_counterfactual(s);
      if (variant == "O_C") {
        p = flipped;
      } else {
        Sample base;
        base.id = s.id;
        base.context = flipped.context;
        base.question = flipped.question;
        base.label = flipped.label;
        base.rule = flipped.rule;
        base.gold_problem = flipped.gold_problem;
        p = inject_noise(base, corpus, k, derive_seed(variant_seed, s.id));
        p.negated = true;
      }
    }
    p.variant = variant;
    out += perturbed_to_json(p) + "\n";
  }
  write_or_print(out_path, out);
  return 0;
}

int cmd_run(const std::string& config_path) {
  nlohmann::json cfg = nlohmann::json::parse(read_file(config_path));
  if (cfg.value("schema_version", 1) != 1)
    throw std::runtime_error("unsupported config schema_version");

  RunConfig run;
  if (auto f = format_from_name(cfg.value("format", "formal"))) run.format = *f;
  else throw std::runtime_error("unknown format in config");
  run.syntax = parse_syntax(cfg.value("syntax", "fol"));
  if (auto r = recovery_from_name(cfg.value("recovery", "none"))) run.recovery = *r;
  else throw std::runtime_error("unknown recovery in config");
  run.max_refinements = cfg.value("max_refinements", 3);
  run.temperature = cfg.value("temperature", 1.0);
  run.fallback_seed = cfg.value("fallback_seed", 0ull);
  run.backend = cfg.value("backend", "mock");
  run.prover_budget.max_clauses = cfg.value("max_clauses", run.prover_budget.max_clauses);
  run.prover_budget.max_seconds = cfg.value("max_seconds", run.prover_budget.max_seconds);

  auto samples = load_perturbed(cfg.at("samples").get<std::string>());

  RunOptions opts;
  opts.parallelism = cfg.value("parallelism", 4);
  opts.results_path = cfg.value("results", "");
  opts.elide_transcript = cfg.value("elide_transcript", false);

  std::unique_ptr<Backend> backend;
  if (run.backend == "mock") {
    backend = std::make_unique<MockBackend>(
        MockBackend::from_json_file(cfg.at("mock_script").get<std::string>()));
  } else if (run.backend == "oracle") {
    backend = std::make_unique<OracleBackend>(samples, run);
  } else if (run.backend == "http") {
    backend = std::make_unique<HttpBackend>(HttpBackend::from_env());
  } else {
    throw std::runtime_error("unknown backend '" + run.backend + "'");
  }

  auto results = run_all(samples, run, *backend, opts);
  if (opts.results_path.empty())
    for (const auto& r : results) std::cout << result_to_json(r, opts.elide_transcript) << "\n";
  else
    std::cerr << results.size() << " results written to " << opts.results_path << "\n";
  return 0;
}

int cmd_report(const std::string& results_path, const std::string& gold_path,
               const std::string& format_name) {
  auto format = report_format_from_name(format_name);
  if (!format) throw std::runtime_error("unknown report format '" + format_name + "'");
  Metrics m = evaluate(load_results(results_path), load_perturbed(gold_path));
  std::cout << report(m, *format);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"first-order logic deduction workbench"};
  app.require_subcommand(1);

  std::string file, syntax = "fol", from = "fol", to = "tptp";
  auto* parse_cmd = app.add_subcommand("parse", "parse a problem file and re-render it");
  parse_cmd->add_option("file", file)->required();
  parse_cmd->add_option("--syntax", syntax);

  auto* translate_cmd = app.add_subcommand("translate", "translate between syntaxes");
  translate_cmd->add_option("file", file)->required();
  translate_cmd->add_option("--from", from);
  translate_cmd->add_option("--to", to);

  auto* lint_cmd = app.add_subcommand("lint", "report heuristic warnings");
  lint_cmd->add_option("file", file)->required();
  lint_cmd->add_option("--syntax", syntax);

  std::string external;
  double max_seconds = 10.0;
  size_t max_clauses = 100000;
  bool show_proof = false;
  auto* prove_cmd = app.add_subcommand("prove", "decide entailment by refutation");
  prove_cmd->add_option("file", file)->required();
  prove_cmd->add_option("--syntax", syntax);
  prove_cmd->add_option("--external", external, "external TPTP prover command");
  prove_cmd->add_option("--max-seconds", max_seconds);
  prove_cmd->add_option("--max-clauses", max_clauses);
  prove_cmd->add_flag("--proof", show_proof, "print the derivation to stderr");

  std::string variant = "O", corpus, out_path;
  int k = 4;
  uint64_t seed = 0;
  auto* perturb_cmd = app.add_subcommand("perturb", "generate a perturbed dataset variant");
  perturb_cmd->add_option("file", file)->required();
  perturb_cmd->add_option("--variant", variant, "O, E, L, T, O_C, E_C, L_C or T_C");
  perturb_cmd->add_option("--k", k);
  perturb_cmd->add_option("--seed", seed);
  perturb_cmd->add_option("--corpus", corpus, "noise corpus file");
  perturb_cmd->add_option("--out", out_path);

  std::string config;
  auto* run_cmd = app.add_subcommand("run", "run a pipeline configuration");
  run_cmd->add_option("--config", config)->required();

  std::string results, gold, report_fmt = "markdown";
  auto* report_cmd = app.add_subcommand("report", "compute metrics from a results file");
  report_cmd->add_option("--results", results)->required();
  report_cmd->add_option("--gold", gold)->required();
  report_cmd->add_option("--format", report_fmt, "markdown, csv or json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (parse_cmd->parsed()) return cmd_parse(file, syntax);
    if (translate_cmd->parsed()) return cmd_translate(file, from, to);
    if (lint_cmd->parsed()) return cmd_lint(file, syntax);
    if (prove_cmd->parsed())
      return cmd_prove(file, syntax, external, max_seconds, max_clauses, show_proof);
    if (perturb_cmd->parsed()) return cmd_perturb(file, variant, k, seed, corpus, out_path);
    if (run_cmd->parsed()) return cmd_run(config);
    if (report_cmd->parsed()) return cmd_report(results, gold, report_fmt);
  } catch (const deduct::SchemaError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
