#pragma once

// Family labels, their domain patterns and the ordered registry that fixes
// classifier output indices. Patterns use a deliberately small shape:
//   [chars]{min,max}\.(tld1|tld2)$
// plus the catch-all ".*" reserved for the benign label.

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dgakit/domain.hpp"

namespace dgakit {

struct FamilyRegex {
    bool catch_all = false;
    std::array<bool, kAlphabetSize + 1> allowed{};  // indexed by char_code, dot unused
    std::size_t min_len = 0;
    std::size_t max_len = 0;
    std::vector<std::string> tlds;  // sorted, unique

    bool matches(const DomainName& d) const;
    bool allows(char c) const {
        auto code = char_code(c);
        return code != 0 && allowed[code];
    }

    // Canonical text form: digits first, then letters, ranges of three or
    // more compacted, '-' last, {n} when min == max.
    std::string render() const;

    static std::optional<FamilyRegex> parse(std::string_view pattern);
    static FamilyRegex make(std::string_view chars, std::size_t min_len, std::size_t max_len,
                            std::vector<std::string> tlds);
    static FamilyRegex make_catch_all();
};

struct FamilyLabel {
    std::string name;
    bool deterministic = true;
    double threshold = 5.0;  // suspicion score above which reconstruction runs
    FamilyRegex regex;

    bool is_benign() const { return regex.catch_all; }
};

// Probabilities aligned with registry label order.
using ProbabilityVector = std::vector<double>;

std::size_t argmax(const ProbabilityVector& p);

class FamilyRegistry {
public:
    static FamilyRegistry make(std::vector<FamilyLabel> labels);  // throws on bad config
    static FamilyRegistry load_tsv(const std::string& path);
    void save_tsv(const std::string& path) const;

    std::size_t size() const { return labels_.size(); }
    const FamilyLabel& at(std::size_t i) const { return labels_.at(i); }
    const std::vector<FamilyLabel>& labels() const { return labels_; }
    std::optional<std::size_t> index_of(std::string_view name) const;
    std::size_t benign_index() const { return benign_; }

    // Index with the most votes; ties resolve to the lowest index.
    std::size_t majority(const std::vector<std::size_t>& votes) const;

private:
    std::vector<FamilyLabel> labels_;
    std::size_t benign_ = 0;
};

}  // namespace dgakit
