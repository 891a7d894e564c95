#pragma once

#include <stdexcept>
#include <string>

namespace logt {

// Base for all recoverable pipeline errors. Callers that must keep a batch
// running catch Error, record the instance as unanswered, and continue.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// --- logic engine ---
struct GroundingBudgetExceeded : Error {
  explicit GroundingBudgetExceeded(const std::string& m) : Error(m) {}
};
struct OracleBudgetExceeded : Error {
  explicit OracleBudgetExceeded(const std::string& m) : Error(m) {}
};
struct QueryCompileError : Error {
  explicit QueryCompileError(const std::string& m) : Error(m) {}
};

// --- gateway ---
struct UnknownTemplate : Error {
  explicit UnknownTemplate(const std::string& id) : Error("unknown template: " + id) {}
};
struct MissingVariable : Error {
  std::string name;
  explicit MissingVariable(const std::string& n) : Error("missing template variable: " + n), name(n) {}
};
struct ProviderError : Error {
  explicit ProviderError(const std::string& m) : Error(m) {}
};
struct CacheCorruption : Error {
  explicit CacheCorruption(const std::string& m) : Error(m) {}
};
struct ExtractionFailed : Error {
  explicit ExtractionFailed(const std::string& m) : Error(m) {}
};

// --- pipeline stages ---
struct ContextBuildFailed : Error {
  explicit ContextBuildFailed(const std::string& m) : Error(m) {}
};
struct SynthesisFailed : Error {
  explicit SynthesisFailed(const std::string& m) : Error(m) {}
};
struct EvaluationFailed : Error {
  explicit EvaluationFailed(const std::string& m) : Error(m) {}
};
struct LabelParseError : Error {
  explicit LabelParseError(const std::string& m) : Error(m) {}
};
struct TraceOrganizeFailed : Error {
  explicit TraceOrganizeFailed(const std::string& m) : Error(m) {}
};
struct JudgeFailed : Error {
  explicit JudgeFailed(const std::string& m) : Error(m) {}
};

// --- augmenter ---
struct SourceLabelMismatch : Error {
  explicit SourceLabelMismatch(const std::string& m) : Error(m) {}
};
struct GenerationFailed : Error {
  explicit GenerationFailed(const std::string& m) : Error(m) {}
};
struct ScorerUnavailable : Error {
  explicit ScorerUnavailable(const std::string& m) : Error(m) {}
};

// --- harness ---
struct FormatError : Error {
  explicit FormatError(const std::string& m) : Error(m) {}
};
struct EmptyInput : Error {
  explicit EmptyInput(const std::string& m) : Error(m) {}
};
struct MissingBaseline : Error {
  explicit MissingBaseline(const std::string& m) : Error(m) {}
};

}  // namespace logt
