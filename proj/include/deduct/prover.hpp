#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "deduct/ast.hpp"

namespace deduct {

struct Literal {
  bool positive = true;
  std::string pred;
  std::vector<Term> args;

  bool operator==(const Literal& other) const {
    return positive == other.positive && pred == other.pred && args == other.args;
  }
};

struct Clause {
  std::vector<Literal> literals;
  std::string provenance;

  bool empty() const { return literals.empty(); }
};

std::string render_literal(const Literal& l);
std::string render_clause(const Clause& c);

// NNF -> Skolemization -> CNF. f must be closed; Skolem symbols are named
// sk_0, sk_1, ... in encounter order, so output is deterministic.
std::vector<Clause> clausify(const FormulaPtr& f);

struct ProverBudget {
  size_t max_clauses = 100000;
  double max_seconds = 10.0;
};

enum class ProofStatus { Entailed, Saturated, BudgetExhausted };

struct ProofOutcome {
  ProofStatus status = ProofStatus::Saturated;
  std::vector<std::string> proof;  // derivation lines, ending in the empty clause
  size_t clauses_kept = 0;
  size_t clauses_generated = 0;

  bool entailed() const { return status == ProofStatus::Entailed; }
};

// Refutation: Entailed iff premises plus the negated conclusion yield the
// empty clause within budget. Free variables are universally closed first.
ProofOutcome entails(const std::vector<FormulaPtr>& premises, const FormulaPtr& conclusion,
                     const ProverBudget& b = {});

struct Decision {
  std::string answer;                // "yes" or "no"
  ProofOutcome outcome;              // conclusion attempt
  ProofOutcome negation_outcome;     // diagnostic: is the negated conclusion entailed?
};

Decision decide(const Problem& p, const ProverBudget& b = {});

struct ExternalProverUnavailable : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UnrecognizedStatus : std::runtime_error {
  explicit UnrecognizedStatus(std::string line)
      : std::runtime_error("unrecognized prover output: " + line), raw(std::move(line)) {}
  std::string raw;
};

// Writes p as a strict TPTP file and runs prover_cmd on it. The command may
// use {file} and {timeout_s} placeholders; the subprocess is killed at twice
// the budget. The first `SZS status <word>` line decides the outcome.
ProofOutcome prove_external(const Problem& p, const std::string& prover_cmd,
                            const ProverBudget& b = {});

}  // namespace deduct
