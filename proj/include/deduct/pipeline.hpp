#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "deduct/lint.hpp"
#include "deduct/perturb.hpp"
#include "deduct/prover.hpp"
#include "deduct/syntax.hpp"

namespace deduct {

enum class Format { Direct, CoT, Formal };
enum class Recovery { NoRecovery, ErrorType, ErrorMessage, Warning };

const char* format_name(Format f);
std::optional<Format> format_from_name(const std::string& name);
const char* recovery_name(Recovery r);
std::optional<Recovery> recovery_from_name(const std::string& name);

struct RunConfig {
  Format format = Format::Formal;
  SyntaxId syntax = SyntaxId::FOL;  // Formal only
  Recovery recovery = Recovery::NoRecovery;
  int max_refinements = 3;
  double temperature = 1.0;
  uint64_t fallback_seed = 0;
  std::string backend = "mock";
  ProverBudget prover_budget;
};

struct BackendRequest {
  std::string sample_id;
  int attempt = 0;
  std::string prompt;
  double temperature = 1.0;
};

struct BackendResponse {
  std::string text;
};

struct BackendUnavailable : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ScriptExhausted : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Backend {
  virtual ~Backend() = default;
  virtual BackendResponse complete(const BackendRequest& req) = 0;
};

enum class ParseStatus { NotApplicable, Parsed, Failed };

struct TranscriptEntry {
  std::string request;
  std::string response;
  std::string diagnostic;  // feedback sent after this response, if any
};

struct SampleResult {
  std::string id;
  std::string variant;
  std::string predicted;  // "yes" or "no"
  ParseStatus parse_status = ParseStatus::NotApplicable;
  bool used_fallback = false;
  int refinement_rounds = 0;
  std::vector<Warning> warnings;
  std::vector<TranscriptEntry> transcript;
};

std::string build_prompt(const PerturbedSample& s, const RunConfig& cfg);

// Direct: first case-insensitive yes/no anywhere. CoT: yes/no after "answer:".
std::optional<std::string> extract_answer(const std::string& response, Format format);

// Locates the Predicates/Premises/Conclusion blocks and parses them.
Expected<Problem> extract_problem(const std::string& response, SyntaxId syntax);

SampleResult run_sample(const PerturbedSample& s, const RunConfig& cfg, Backend& backend);

using MockScript = std::map<std::string, std::vector<std::string>>;

// Replays a script keyed by sample id; response i answers attempt i.
class MockBackend : public Backend {
 public:
  explicit MockBackend(MockScript script) : script_(std::move(script)) {}
  static MockBackend from_json_file(const std::string& path);
  BackendResponse complete(const BackendRequest& req) override;

 private:
  MockScript script_;
};

// Synthesizes the ideal response from gold annotations.
class OracleBackend : public Backend {
 public:
  OracleBackend(std::vector<PerturbedSample> samples, RunConfig cfg);
  BackendResponse complete(const BackendRequest& req) override;

 private:
  std::map<std::string, PerturbedSample> by_id_;
  RunConfig cfg_;
};

// Chat-completion endpoint; url/model/token from config or environment
// (DEDUCT_BACKEND_URL, DEDUCT_BACKEND_MODEL, DEDUCT_BACKEND_TOKEN).
class HttpBackend : public Backend {
 public:
  HttpBackend(std::string url, std::string model, std::string token);
  static HttpBackend from_env();
  BackendResponse complete(const BackendRequest& req) override;

 private:
  std::string url_, model_, token_;
};

struct RunOptions {
  int parallelism = 4;
  std::string results_path;  // JSONL sink, appended incrementally; empty: off
  bool elide_transcript = false;
};

// Runs every sample not already present in the results file; results come
// back in input order regardless of worker scheduling.
std::vector<SampleResult> run_all(const std::vector<PerturbedSample>& samples,
                                  const RunConfig& cfg, Backend& backend,
                                  const RunOptions& opts = {});

}  // namespace deduct
