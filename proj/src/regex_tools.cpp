#include "dgakit/regex_tools.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>

namespace dgakit {

std::variant<FamilyRegex, ExtractError> extract_regex(const std::vector<DomainName>& domains) {
    if (domains.empty()) return ExtractError::kEmptyInput;

    std::map<std::size_t, std::size_t> length_counts;
    for (const auto& d : domains) length_counts[d.sld.size()]++;
    std::size_t modal = 0;
    for (const auto& [len, count] : length_counts) modal = std::max(modal, count);
    const double cutoff = 0.05 * static_cast<double>(modal);

    FamilyRegex r;
    r.min_len = kEncodedLength + 1;
    r.max_len = 0;
    std::vector<std::string> tlds;
    bool any = false;
    for (const auto& d : domains) {
        if (static_cast<double>(length_counts[d.sld.size()]) < cutoff) continue;
        any = true;
        for (char c : d.sld) r.allowed[char_code(c)] = true;
        r.min_len = std::min(r.min_len, d.sld.size());
        r.max_len = std::max(r.max_len, d.sld.size());
        tlds.push_back(d.tld);
    }
    if (!any) return ExtractError::kEmptyInput;  // unreachable: modal length always survives
    std::sort(tlds.begin(), tlds.end());
    tlds.erase(std::unique(tlds.begin(), tlds.end()), tlds.end());
    r.tlds = std::move(tlds);
    return r;
}

RegexAgreement regex_agreement(const FamilyRegex& extracted, const FamilyRegex& family) {
    RegexAgreement a;
    if (family.catch_all) {
        a.charclass_subset = a.length_within = a.tlds_subset = true;
        return a;
    }
    if (extracted.catch_all) return a;  // nothing concrete to compare

    a.charclass_subset = true;
    for (std::size_t code = 1; code <= kAlphabetSize; ++code)
        if (extracted.allowed[code] && !family.allowed[code]) a.charclass_subset = false;
    a.length_within =
        extracted.min_len >= family.min_len && extracted.max_len <= family.max_len;
    a.tlds_subset = std::includes(family.tlds.begin(), family.tlds.end(), extracted.tlds.begin(),
                                  extracted.tlds.end());
    return a;
}

MatcherResult matcher_pick(const ProbabilityVector& probs, const DomainName& d,
                           const FamilyRegistry& registry, std::set<std::size_t>& discarded) {
    if (probs.size() != registry.size())
        throw std::invalid_argument("matcher_pick: probability vector size mismatch");

    std::vector<std::size_t> order(probs.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return probs[a] > probs[b]; });

    for (std::size_t i = 0; i < order.size(); ++i) {
        std::size_t label = order[i];
        if (registry.at(label).regex.matches(d))
            return MatcherResult{label, i != 0};
        discarded.insert(label);
    }
    // the registry always carries a catch-all label, so this is unreachable
    throw std::logic_error("matcher_pick: no pattern matched");
}

}  // namespace dgakit
