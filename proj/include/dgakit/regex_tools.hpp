#pragma once

// Pattern extraction for a batch of domains and the post-classification
// matcher that rejects predictions whose family pattern cannot produce the
// domain in question.

#include <set>
#include <variant>
#include <vector>

#include "dgakit/registry.hpp"

namespace dgakit {

enum class ExtractError { kEmptyInput };

// Summarizes a batch of (already stripped) domains as a single pattern.
// Domains whose name length is rare, fewer than 5% of the modal length
// count, are dropped before the pattern is formed.
std::variant<FamilyRegex, ExtractError> extract_regex(const std::vector<DomainName>& domains);

struct RegexAgreement {
    bool charclass_subset = false;
    bool length_within = false;
    bool tlds_subset = false;
    bool all() const { return charclass_subset && length_within && tlds_subset; }
};

// How an extracted pattern sits inside a family pattern.
RegexAgreement regex_agreement(const FamilyRegex& extracted, const FamilyRegex& family);

struct MatcherResult {
    std::size_t label = 0;
    bool regex_changed = false;  // true when the top prediction was rejected
};

// Walks predictions from most to least likely and returns the first label
// whose pattern matches the domain. Predictions skipped along the way are
// added to `discarded`, which callers accumulate across a whole sample.
// The catch-all benign label guarantees termination.
MatcherResult matcher_pick(const ProbabilityVector& probs, const DomainName& d,
                           const FamilyRegistry& registry, std::set<std::size_t>& discarded);

}  // namespace dgakit
