#include "deduct/pipeline.hpp"

#include <atomic>
#include <cctype>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "deduct/harness.hpp"
#include "httplib.h"
#include "json.hpp"

namespace deduct {

namespace {

const char* kDirectPrompt = R"(Given the context and question, answer the question and consider that not necessarily the whole context is relevant. Answer the question ONLY in 'yes' or 'no'. Please use the below format:
Context: [text with logical rules]
Question: [question based on context]
Answer: Yes/No
----
)";

const char* kCotPrompt = R"(Task Description: Given the context and question, think step-by-step logically to answer the question and consider that not necessarily the whole context is relevant. Answer the question ONLY in 'yes' or 'no'. Please use the below format:
Context: [text with logical rules]
Question: [question based on context]
Reasoning steps: [generate step-by-step
reasoning]
Answer: Yes/No
----
)";

const char* kFormalTask = R"(Task Description: Given a problem description and a question. The task is to parse the problem and the question into first-order logic formulars. Follow exactly the given structure and consider that not necessarily the whole context is relevant.
)";

struct InformalExample {
  const char* context;
  const char* question;
  const char* reasoning;
  const char* answer;
};

const InformalExample kInformalExamples[] = {
    {"If someone walks in the rain, they will get wet. Conversely, if someone exercises a "
     "lot, they will get fit. Leaders of a country for life are either a king or a queen. It "
     "is known that at least one of the following statements is true: (1) either John walks "
     "in the rain and (2) he will not get fit. It is possible that solely (1) is true, or "
     "solely (2) is true, or even both are true simultaneously.",
     "Can we say at least one of the following must always be true? (a) he will get wet and "
     "(b) he does not exercises a lot?",
     "1. John walks in the rain or he will not get fit 2. If John walks in the rain he will "
     "get wet. 3. If John will not get fit he cannot exercise a lot.",
     "Yes"},
    {"If a person leaves late, they will miss their train. In this particular situation, "
     "James left late.",
     "Does this entail that he will not miss his train?",
     "1. James left late 2. James left late, he will miss his train. 3. John misses his "
     "train contradicts that he will not miss his train.",
     "No"},
    {"It is known that one of the following options is true: someone goes to the office or "
     "someone goes home. However, Jill does not go to the office. If some pet in the office "
     "barks, then it is not dead.",
     "Does this imply that Jill goes home?",
     "1. Jill goes to the office or she goes home. 2. If Jill does not go to the office she "
     "must go home instead.",
     "Yes"},
};

std::string informal_examples(bool with_reasoning) {
  std::string out;
  for (const auto& e : kInformalExamples) {
    out += std::string("Context: ") + e.context + "\n";
    out += std::string("Question: ") + e.question + "\n";
    if (with_reasoning) out += std::string("Reasoning steps: ") + e.reasoning + "\n";
    out += std::string("Answer: ") + e.answer + "\n----\n";
  }
  return out;
}

std::string grammar_block(SyntaxId syntax) {
  struct Ops {
    const char *conj, *disj, *xord, *negd, *impl, *iffd, *fa, *ex;
  };
  Ops ops = {"∧", "∨", "⊕", "¬", "→", "↔", "∀x", "∃x"};
  switch (syntax) {
    case SyntaxId::FOL: ops = {"∧", "∨", "⊕", "¬", "→", "↔", "∀x", "∃x"}; break;
    case SyntaxId::RFOL: ops = {"∧", "∨", "⊕", "¬", "→", "↔", "∀?x", "∃?x"}; break;
    case SyntaxId::TPTP: ops = {"&", "|", "<~>", "~", "=>", "<=>", "![X]:", "?[X]:"}; break;
  }
  std::string out = "The grammar of the first-order logic formular is defined as follows:\n";
  out += std::string("1) logical conjunction of expr1 and expr2: expr1 ") + ops.conj + " expr2\n";
  out += std::string("2) logical disjunction of expr1 and expr2: expr1 ") + ops.disj + " expr2\n";
  out += std::string("3) logical exclusive disjunction of expr1 and expr2: expr1 ") + ops.xord +
         " expr2\n";
  out += std::string("4) logical negation of expr1: ") + ops.negd + "expr1\n";
  out += std::string("5) expr1 implies expr2: expr1 ") + ops.impl + " expr2\n";
  out += std::string("6) expr1 if and only if expr2: expr1 ") + ops.iffd + " expr2\n";
  out += std::string("7) logical universal quantification: ") + ops.fa + "\n";
  out += std::string("8) logical existential quantification: ") + ops.ex + "\n";
  return out;
}

FormulaPtr fol(const std::string& text) {
  auto r = parse_formula(text, SyntaxId::FOL);
  if (!r.ok()) throw std::logic_error("bad example formula: " + text);
  return *r;
}

struct FormalExample {
  const char* context;
  const char* question;
  Problem problem;
};

std::vector<FormalExample> formal_examples() {
  std::vector<FormalExample> out;
  {
    Problem p;
    p.declared_predicates = {{"WalksInRain", 1, "x walks in the rain."},
                             {"GetWet", 1, "x gets wet."},
                             {"ExercisesALot", 1, "x exercises a lot."},
                             {"GetFit", 1, "x gets fit."}};
    p.premises = {{"p0", fol("∀x (WalksInRain(x) → GetWet(x))"),
                   "If someone walks in the rain, they will get wet."},
                  {"p1", fol("∀x (ExercisesALot(x) → GetFit(x))"),
                   "If someone exercises a lot, they will get fit."},
                  {"p2", fol("WalksInRain(john) ∨ ¬GetFit(john)"),
                   "John walks in the rain or he will not get fit."}};
    p.conclusion = fol("GetWet(john) ∧ ¬ExercisesALot(john)");
    p.conclusion_gloss = "John will get wet or he does not exercises a lot.";
    out.push_back({kInformalExamples[0].context, kInformalExamples[0].question, std::move(p)});
  }
  {
    Problem p;
    p.declared_predicates = {{"LeaveLate", 1, "x leaves late."},
                             {"MissTrain", 1, "x misses their train."}};
    p.premises = {{"p0", fol("∀x (LeaveLate(x) → MissTrain(x))"),
                   "If a person leaves late, they will miss their train."},
                  {"p1", fol("LeaveLate(james)"), "James leavs late."}};
    p.conclusion = fol("¬MissTrain(james)");
    p.conclusion_gloss = "James does not miss his train.";
    out.push_back({kInformalExamples[1].context, kInformalExamples[1].question, std::move(p)});
  }
  {
    Problem p;
    p.declared_predicates = {{"GoesToOffice", 1, "x goes to the office."},
                             {"GoesHome", 1, "x goes home."}};
    p.premises = {{"p0", fol("∀x (GoesToOffice(x) ∨ GoesHome(x))"),
                   "Either someone goes to the office or someone goes home."},
                  {"p1", fol("¬GoesToOffice(jill)"), "Jill does not go to the office."}};
    p.conclusion = fol("GoesHome(jill)");
    p.conclusion_gloss = "Jill goes home.";
    out.push_back({kInformalExamples[2].context, kInformalExamples[2].question, std::move(p)});
  }
  return out;
}

std::string join_context(const std::vector<std::string>& context) {
  std::string out;
  for (const auto& s : context) {
    if (!out.empty()) out += " ";
    out += s;
  }
  return out;
}

std::string fallback_answer(uint64_t base_seed, const std::string& id) {
  std::mt19937_64 rng(derive_seed(base_seed, id));
  return rng() % 2 == 0 ? "yes" : "no";
}

std::string refinement_prompt(const std::string& original_prompt, const std::string& prior_output,
                              const std::string& feedback) {
  return original_prompt + "\n" + prior_output + "\nFeedback: " + feedback +
         "\nPlease output the corrected formalisation in the same format.";
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

// matches yes/no at position i of the lowered text
std::optional<std::string> yes_no_at(const std::string& lowered, size_t i) {
  if (lowered.compare(i, 3, "yes") == 0) return "yes";
  if (lowered.compare(i, 2, "no") == 0) return "no";
  return std::nullopt;
}

}  // namespace

const char* format_name(Format f) {
  switch (f) {
    case Format::Direct: return "direct";
    case Format::CoT: return "cot";
    case Format::Formal: return "formal";
  }
  return "formal";
}

std::optional<Format> format_from_name(const std::string& name) {
  std::string n = lower(name);
  if (n == "direct") return Format::Direct;
  if (n == "cot") return Format::CoT;
  if (n == "formal") return Format::Formal;
  return std::nullopt;
}

const char* recovery_name(Recovery r) {
  switch (r) {
    case Recovery::NoRecovery: return "none";
    case Recovery::ErrorType: return "error_type";
    case Recovery::ErrorMessage: return "error_message";
    case Recovery::Warning: return "warning";
  }
  return "none";
}

std::optional<Recovery> recovery_from_name(const std::string& name) {
  std::string n = lower(name);
  if (n == "none" || n == "no_recovery") return Recovery::NoRecovery;
  if (n == "error_type") return Recovery::ErrorType;
  if (n == "error_message") return Recovery::ErrorMessage;
  if (n == "warning") return Recovery::Warning;
  return std::nullopt;
}

std::string build_prompt(const PerturbedSample& s, const RunConfig& cfg) {
  std::string context = join_context(s.context);
  if (cfg.format == Format::Direct || cfg.format == Format::CoT) {
    std::string out = cfg.format == Format::Direct ? kDirectPrompt : kCotPrompt;
    out += informal_examples(true);
    out += "Context: " + context + "\n";
    out += "Question: " + s.question + "\n";
    return out;
  }
  std::string out = kFormalTask;
  out += grammar_block(cfg.syntax);
  out += "----\n";
  for (const auto& e : formal_examples()) {
    out += std::string("Problem: ") + e.context + "\n";
    out += std::string("Question: ") + e.question + "\n";
    out += print_problem(e.problem, cfg.syntax);
    out += "----\n";
  }
  out += "Problem: " + context + "\n";
  out += "Question: " + s.question + "\n";
  return out;
}

std::optional<std::string> extract_answer(const std::string& response, Format format) {
  std::string text = lower(response);
  if (format == Format::Direct) {
    for (size_t i = 0; i < text.size(); ++i)
      if (auto a = yes_no_at(text, i)) return a;
    return std::nullopt;
  }
  // CoT: the yes/no after the last "answer:" marker, skipping whitespace
  size_t marker = text.rfind("answer:");
  while (marker != std::string::npos) {
    size_t i = marker + 7;
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i < text.size())
      if (auto a = yes_no_at(text, i)) return a;
    marker = marker == 0 ? std::string::npos : text.rfind("answer:", marker - 1);
  }
  return std::nullopt;
}

Expected<Problem> extract_problem(const std::string& response, SyntaxId syntax) {
  SourceDoc doc = make_source_doc(response, syntax);
  if (doc.shape != DocShape::Template)
    return Expected<Problem>::failure(
        {1, 1, "", "", "missing section 'Premises:' in the response"});
  return parse_problem(doc);
}

SampleResult run_sample(const PerturbedSample& s, const RunConfig& cfg, Backend& backend) {
  SampleResult r;
  r.id = s.base_id;
  r.variant = s.variant;
  std::string prompt = build_prompt(s, cfg);

  if (cfg.format != Format::Formal) {
    BackendResponse resp = backend.complete({s.base_id, 0, prompt, cfg.temperature});
    r.transcript.push_back({prompt, resp.text, ""});
    r.parse_status = ParseStatus::NotApplicable;
    if (auto answer = extract_answer(resp.text, cfg.format)) {
      r.predicted = *answer;
    } else {
      r.used_fallback = true;
      r.predicted = fallback_answer(cfg.fallback_seed, s.base_id);
    }
    return r;
  }

  std::string current = prompt;
  std::optional<Problem> problem;
  bool warning_round_spent = false;
  int attempt = 0;
  while (true) {
    BackendResponse resp = backend.complete({s.base_id, attempt++, current, cfg.temperature});
    r.transcript.push_back({current, resp.text, ""});
    Expected<Problem> parsed = extract_problem(resp.text, cfg.syntax);
    if (parsed.ok()) {
      problem = *parsed;
      r.warnings = lint(*problem);
      if (cfg.recovery == Recovery::Warning && !r.warnings.empty() && !warning_round_spent &&
          r.refinement_rounds < cfg.max_refinements) {
        warning_round_spent = true;
        std::string feedback;
        for (const auto& w : r.warnings) {
          if (!feedback.empty()) feedback += "\n";
          feedback += render(w);
        }
        r.transcript.back().diagnostic = feedback;
        current = refinement_prompt(prompt, resp.text, feedback);
        ++r.refinement_rounds;
        continue;
      }
      break;
    }
    // syntax failure: warnings never fall back, so a saved parse wins
    if (problem) break;
    if (cfg.recovery == Recovery::NoRecovery || r.refinement_rounds >= cfg.max_refinements)
      break;
    std::string feedback = cfg.recovery == Recovery::ErrorType ? "parsing error"
                                                               : parsed.error->message;
    r.transcript.back().diagnostic = feedback;
    current = refinement_prompt(prompt, resp.text, feedback);
    ++r.refinement_rounds;
  }

  if (problem) {
    r.parse_status = ParseStatus::Parsed;
    r.predicted = decide(*problem, cfg.prover_budget).answer;
  } else {
    r.parse_status = ParseStatus::Failed;
    r.used_fallback = true;
    r.predicted = fallback_answer(cfg.fallback_seed, s.base_id);
  }
  return r;
}

MockBackend MockBackend::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open mock script: " + path);
  nlohmann::json doc = nlohmann::json::parse(in);
  std::map<std::string, std::vector<std::string>> script;
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    std::vector<std::string> responses;
    for (const auto& r : it.value()) responses.push_back(r.get<std::string>());
    script[it.key()] = std::move(responses);
  }
  return MockBackend(std::move(script));
}

BackendResponse MockBackend::complete(const BackendRequest& req) {
  auto it = script_.find(req.sample_id);
  if (it == script_.end())
    throw ScriptExhausted("no script for sample '" + req.sample_id + "'");
  if (static_cast<size_t>(req.attempt) >= it->second.size())
    throw ScriptExhausted("script for sample '" + req.sample_id + "' exhausted at attempt " +
                          std::to_string(req.attempt));
  return {it->second[req.attempt]};
}

OracleBackend::OracleBackend(std::vector<PerturbedSample> samples, RunConfig cfg)
    : cfg_(std::move(cfg)) {
  for (auto& s : samples) {
    std::string id = s.base_id;
    by_id_.emplace(std::move(id), std::move(s));
  }
}

BackendResponse OracleBackend::complete(const BackendRequest& req) {
  auto it = by_id_.find(req.sample_id);
  if (it == by_id_.end())
    throw ScriptExhausted("oracle has no sample '" + req.sample_id + "'");
  const PerturbedSample& s = it->second;
  if (cfg_.format != Format::Formal) return {"Answer: " + s.label};
  if (!s.gold_problem)
    throw ScriptExhausted("oracle sample '" + req.sample_id + "' has no gold problem");
  return {print_problem(*s.gold_problem, cfg_.syntax)};
}

HttpBackend::HttpBackend(std::string url, std::string model, std::string token)
    : url_(std::move(url)), model_(std::move(model)), token_(std::move(token)) {}

HttpBackend HttpBackend::from_env() {
  const char* url = std::getenv("DEDUCT_BACKEND_URL");
  const char* model = std::getenv("DEDUCT_BACKEND_MODEL");
  const char* token = std::getenv("DEDUCT_BACKEND_TOKEN");
  if (!url || !model)
    throw BackendUnavailable("DEDUCT_BACKEND_URL and DEDUCT_BACKEND_MODEL must be set");
  return HttpBackend(url, model, token ? token : "");
}

BackendResponse HttpBackend::complete(const BackendRequest& req) {
  // split scheme://host[:port] from the path
  size_t scheme = url_.find("://");
  size_t path_pos = url_.find('/', scheme == std::string::npos ? 0 : scheme + 3);
  std::string base = path_pos == std::string::npos ? url_ : url_.substr(0, path_pos);
  std::string path = path_pos == std::string::npos ? "/v1/chat/completions"
                                                   : url_.substr(path_pos);

  nlohmann::json body = {
      {"model", model_},
      {"temperature", req.temperature},
      {"messages", {{{"role", "user"}, {"content", req.prompt}}}},
  };
  httplib::Headers headers;
  if (!token_.empty()) headers.emplace("Authorization", "Bearer " + token_);

  std::string last_error;
  for (int try_no = 0; try_no < 3; ++try_no) {
    if (try_no > 0)
      std::this_thread::sleep_for(std::chrono::milliseconds(200 << (try_no - 1)));
    httplib::Client client(base);
    client.set_read_timeout(120, 0);
    auto res = client.Post(path, headers, body.dump(), "application/json");
    if (!res) {
      last_error = httplib::to_string(res.error());
      continue;
    }
    if (res->status != 200) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    try {
      nlohmann::json reply = nlohmann::json::parse(res->body);
      return {reply.at("choices").at(0).at("message").at("content").get<std::string>()};
    } catch (const nlohmann::json::exception& e) {
      last_error = std::string("bad response body: ") + e.what();
    }
  }
  throw BackendUnavailable("backend at " + url_ + " unreachable: " + last_error);
}

namespace {

// appends finished results to the sink in input order, no matter which
// worker finishes first
struct OrderedSink {
  std::mutex mu;
  std::vector<std::optional<SampleResult>> slots;
  std::vector<bool> fresh;
  size_t next = 0;
  std::ofstream out;
  bool elide = false;

  void put(size_t i, SampleResult r, bool is_new) {
    std::lock_guard<std::mutex> lock(mu);
    slots[i] = std::move(r);
    fresh[i] = is_new;
    while (next < slots.size() && slots[next]) {
      if (out.is_open() && fresh[next]) {
        out << result_to_json(*slots[next], elide) << "\n";
        out.flush();
      }
      ++next;
    }
  }
};

}  // namespace

std::vector<SampleResult> run_all(const std::vector<PerturbedSample>& samples,
                                  const RunConfig& cfg, Backend& backend,
                                  const RunOptions& opts) {
  std::map<std::string, SampleResult> done;
  if (!opts.results_path.empty()) {
    std::ifstream probe(opts.results_path);
    if (probe) {
      probe.close();
      for (auto& r : load_results(opts.results_path))
        done[r.id + "\x1f" + r.variant] = std::move(r);
    }
  }

  OrderedSink sink;
  sink.slots.resize(samples.size());
  sink.fresh.resize(samples.size());
  sink.elide = opts.elide_transcript;
  if (!opts.results_path.empty()) sink.out.open(opts.results_path, std::ios::app);

  std::atomic<size_t> cursor{0};
  std::atomic<bool> aborted{false};
  std::exception_ptr first_error;
  std::mutex error_mu;

  auto worker = [&] {
    while (!aborted.load()) {
      size_t i = cursor.fetch_add(1);
      if (i >= samples.size()) return;
      const PerturbedSample& s = samples[i];
      auto it = done.find(s.base_id + "\x1f" + s.variant);
      if (it != done.end()) {
        sink.put(i, it->second, false);
        continue;
      }
      try {
        sink.put(i, run_sample(s, cfg, backend), true);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!first_error) first_error = std::current_exception();
        aborted.store(true);
        return;
      }
    }
  };

  size_t n_workers = std::min<size_t>(std::max(1, opts.parallelism), samples.size());
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (size_t i = 0; i < n_workers; ++i) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  std::vector<SampleResult> out;
  out.reserve(samples.size());
  for (auto& slot : sink.slots) out.push_back(std::move(*slot));
  return out;
}

}  // namespace deduct
