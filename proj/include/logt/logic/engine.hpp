#pragma once

#include "logt/logic/ast.hpp"
#include "logt/logic/compiler.hpp"
#include "logt/logic/corrector.hpp"
#include "logt/logic/grounder.hpp"
#include "logt/logic/oracle.hpp"
#include "logt/logic/parser.hpp"
#include "logt/logic/query.hpp"
#include "logt/logic/solver.hpp"

namespace logt::logic {

struct EngineConfig {
  size_t ground_cap = 200000;
  size_t answer_cap = 100;
};

// Thin facade over the pipeline stages with one shared budget config.
class Engine {
 public:
  explicit Engine(EngineConfig cfg = {}) : cfg_(cfg) {}

  const EngineConfig& config() const { return cfg_; }

  CompiledProgram compile_text(const std::string& text) const {
    return compile_filter(parse_program(text));
  }
  ConclusionSet run(const CompiledProgram& p) const {
    return solve(ground(p, {}, cfg_.ground_cap), p.strata);
  }
  ConclusionSet run_oracle(const CompiledProgram& p) const {
    return oracle_solve(ground(p, {}, cfg_.ground_cap));
  }
  AnswerSet answer(const CompiledProgram& p, const Statement& query) const {
    return answer_query(p, query, {cfg_.answer_cap, cfg_.ground_cap});
  }

 private:
  EngineConfig cfg_;
};

}  // namespace logt::logic
