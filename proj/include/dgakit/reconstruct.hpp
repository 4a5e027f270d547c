#pragma once

// Seed recovery for the built-in families. Each strategy inverts one
// generator shape: permutation batches collapse to a sorted base, counter
// suffixes extrapolate back to a start value, small keyed state spaces get
// swept outright, and dictionary concatenations map back to list indices.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dgakit/domain.hpp"
#include "dgakit/util.hpp"
#include "dgakit/zoo.hpp"

namespace dgakit {

enum class ReconstructStatus {
    kSuccess,
    kNoSeedFound,
    kBudgetExhausted,
    kNotApplicable,
};

std::string_view to_string(ReconstructStatus s);

struct ReconstructOptions {
    std::uint64_t budget = 1u << 18;  // candidate probes allowed for sweep strategies
    std::size_t max_domains = 100;    // inputs beyond this are ignored
    double required_fraction = 0.6;   // regeneration coverage needed for success
    unsigned threads = 1;             // sweep parallelism, used only for full sweeps
};

struct ReconstructionResult {
    ReconstructStatus status = ReconstructStatus::kNotApplicable;
    std::string family;
    std::string strategy;
    std::optional<SeedSet> seed;          // set on success only
    std::optional<CivilDate> seed_date;   // date-dependent families only
    double coverage = 0.0;                // fraction of inputs the seed regenerates
    std::uint64_t evaluations = 0;        // candidate probes spent
    std::string note;                     // failure detail or extra context
};

// Recovers the generator seed behind `domains` (already normalized and
// subdomain-stripped) for the named family. `execution_date` anchors the
// sweep for date-dependent families. Throws std::invalid_argument for
// unknown family names or an empty domain list.
ReconstructionResult reconstruct_seed(std::string_view family,
                                      const std::vector<DomainName>& domains,
                                      const CivilDate& execution_date,
                                      const ReconstructOptions& opts = {});

}  // namespace dgakit
