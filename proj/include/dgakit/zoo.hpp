#pragma once

// Built-in reference DGA families. Each family is a pure generator: the same
// seed fields (plus date, for date-dependent families) always produce the
// same domain sequence, and prefixes are stable across different counts.

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dgakit/registry.hpp"
#include "dgakit/util.hpp"

namespace dgakit {

using SeedValue = std::variant<std::uint64_t, std::string>;
using SeedSet = std::map<std::string, SeedValue>;  // field name -> value

struct SeedFieldSpec {
    std::string name;
    bool is_string = false;
    std::uint64_t min = 0;  // integer fields
    std::uint64_t max = 0;
    std::string note;  // free-form constraint description
};

// "k=v,k=v" with fields in name order.
std::string seed_to_string(const SeedSet& seeds);

class DgaFamily {
public:
    virtual ~DgaFamily() = default;

    virtual std::string_view name() const = 0;
    virtual bool deterministic() const = 0;
    virtual bool date_dependent() const = 0;
    virtual std::vector<SeedFieldSpec> seed_schema() const = 0;
    virtual FamilyRegex family_regex() const = 0;

    // Error message, or nullopt when the seed set is acceptable.
    virtual std::optional<std::string> validate(const SeedSet& seeds) const = 0;

    // Up to `count` unique domains. Throws std::invalid_argument when
    // validate() rejects the seeds. May return fewer than `count` domains
    // when the seed's output space is smaller than requested.
    virtual std::vector<std::string> generate(const SeedSet& seeds, const CivilDate& date,
                                              std::size_t count) const = 0;

    virtual SeedSet sample_seed(Rng& rng) const = 0;

    // Campaigns treated as already catalogued. Empty for families whose
    // runs cannot be reproduced from a compact seed.
    virtual std::vector<SeedSet> known_campaigns() const = 0;

    // Maps seeds that generate the same domain set onto one representative.
    virtual SeedSet canonicalize(const SeedSet& seeds) const { return seeds; }
};

const std::vector<std::unique_ptr<DgaFamily>>& all_families();
const DgaFamily* find_family(std::string_view name);

// Families in zoo order followed by the catch-all benign label.
FamilyRegistry default_registry();

// Word tables used by the wordlist family: kWordListCount disjoint lists of
// kWordsPerList lowercase words each.
inline constexpr std::size_t kWordListCount = 3;
inline constexpr std::size_t kWordsPerList = 128;
const std::array<std::array<std::string_view, kWordsPerList>, kWordListCount>& word_lists();

// moddga seeds are equivalent modulo this.
inline constexpr std::uint64_t kModDgaModulus = 31373;

// lcgdga seed space (16-bit) and its mixing constants.
inline constexpr std::uint64_t kLcgSeedSpace = 65536;

}  // namespace dgakit
