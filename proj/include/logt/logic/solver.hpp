#pragma once

#include "logt/logic/ast.hpp"

namespace logt::logic {

// Fixpoint solver over a ground program.
//
// Layer 1 (+Delta): strict fixpoint over facts and strict rules; naf body
// literals consult the refuted set of lower strata. Atoms strictly provable
// in both polarities are reported in ConclusionSet::contradictions.
//
// Layer 2 (+partial / -partial), per stratum, jointly to a fixpoint:
//   L becomes defeasibly IN when L is strict, or the complement of L is not
//   strict, some rule for L is firable (positive body IN, naf inners refuted
//   in lower strata) and every rule for the complement is discarded: failed
//   outright, or overridden by a firable rule for L. Strict rules override
//   all defeasible rules; among defeasible rules only declared \overrides
//   count.
//   L becomes OUT when the complement is strict, or every rule for L has
//   failed, or some firable complement rule cannot be overridden by any
//   non-failed rule for L.
//   Literals whose support set is unfounded (every candidate rule circles
//   back through the set) are moved OUT in batches; derivation then resumes.
//   A deadlock between mutually dependent attackers refutes all parties.
//
// The result partitions the Herbrand base (both polarities of every atom in
// the ground program) into defeasible and refuted, with strict a subset of
// defeasible.
ConclusionSet solve(const std::vector<Statement>& ground_statements,
                    const std::map<std::string, int>& strata);

}  // namespace logt::logic
