#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "deduct/perturb.hpp"
#include "deduct/pipeline.hpp"

namespace deduct {

struct SchemaError : std::runtime_error {
  SchemaError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line(line) {}
  int line;
};

// JSONL, one Sample per line; rejects duplicate ids. Throws SchemaError.
std::vector<Sample> load_dataset(const std::string& path);
std::string sample_to_json(const Sample& s);
Sample sample_from_json(const std::string& line, int line_number);

std::string perturbed_to_json(const PerturbedSample& p);
PerturbedSample perturbed_from_json(const std::string& line, int line_number);
std::vector<PerturbedSample> load_perturbed(const std::string& path);

std::string result_to_json(const SampleResult& r, bool elide_transcript = false);
SampleResult result_from_json(const std::string& line, int line_number);
std::vector<SampleResult> load_results(const std::string& path);

struct MissingGold : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct VariantMetrics {
  std::string variant;
  size_t n = 0;
  size_t correct = 0;
  size_t parsed = 0;
  size_t correct_parsed = 0;
  double accuracy = 0.0;
  double execution_rate = 0.0;
  std::optional<double> valid_accuracy;  // null when nothing parsed
};

struct Metrics {
  VariantMetrics overall;
  std::vector<VariantMetrics> per_variant;  // paper column order
};

// gold labels come from the perturbed samples the run was executed on
Metrics evaluate(const std::vector<SampleResult>& results,
                 const std::vector<PerturbedSample>& gold);

enum class ReportFormat { Markdown, Csv, Json };
std::optional<ReportFormat> report_format_from_name(const std::string& name);

std::string report(const Metrics& m, ReportFormat format);

// LogicBench public JSON layout -> Sample records; unknown fields ignored.
std::vector<Sample> convert_logicbench(const std::string& json_text);

}  // namespace deduct
