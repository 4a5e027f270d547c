#include "dgakit/reconstruct.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <set>
#include <stdexcept>
#include <thread>
#include <unordered_map>

namespace dgakit {

namespace {

std::vector<DomainName> cap_inputs(const std::vector<DomainName>& in, std::size_t cap) {
    if (cap == 0 || in.size() <= cap) return in;
    return {in.begin(), in.begin() + cap};
}

std::set<std::string> name_set(const std::vector<DomainName>& domains) {
    std::set<std::string> out;
    for (const auto& d : domains) out.insert(d.normalized);
    return out;
}

// Fraction of inputs present in the first |inputs| domains from the seed.
double regen_coverage(const DgaFamily& fam, const SeedSet& seed, const CivilDate& date,
                      const std::set<std::string>& inputs) {
    auto gen = fam.generate(seed, date, inputs.size());
    std::size_t hit = 0;
    for (const auto& g : gen) hit += inputs.count(g);
    return double(hit) / double(inputs.size());
}

std::string modal_tld(const std::vector<DomainName>& domains) {
    std::map<std::string, std::size_t> counts;
    for (const auto& d : domains) counts[d.tld]++;
    std::string best;
    std::size_t best_n = 0;
    for (const auto& [tld, n] : counts) {
        if (n > best_n) {
            best = tld;
            best_n = n;
        }
    }
    return best;
}

bool all_letters(std::string_view s) {
    return std::all_of(s.begin(), s.end(), [](char c) { return c >= 'a' && c <= 'z'; });
}

ReconstructionResult failure(ReconstructionResult r, ReconstructStatus status, std::string note) {
    r.status = status;
    r.note = std::move(note);
    return r;
}

// Domains are shuffles of one base string. The sorted character multiset
// identifies the campaign; the family canonicalizes bases by sorting, so the
// sorted form itself is the seed.
ReconstructionResult run_permutation(const DgaFamily& fam, const std::vector<DomainName>& domains,
                                     double required) {
    ReconstructionResult r;
    r.family = std::string(fam.name());
    r.strategy = "anagram class";

    std::map<std::pair<std::string, std::string>, std::size_t> classes;
    for (const auto& d : domains) {
        std::string key = d.sld;
        std::sort(key.begin(), key.end());
        classes[{key, d.tld}]++;
    }
    auto best = std::max_element(classes.begin(), classes.end(),
                                 [](const auto& a, const auto& b) { return a.second < b.second; });
    r.coverage = double(best->second) / double(domains.size());
    if (r.coverage < required)
        return failure(std::move(r), ReconstructStatus::kNoSeedFound,
                       "domains are not shuffles of one base");

    SeedSet seed = {{"base", best->first.first}, {"tld", best->first.second}};
    if (auto err = fam.validate(seed))
        return failure(std::move(r), ReconstructStatus::kNoSeedFound, *err);
    r.status = ReconstructStatus::kSuccess;
    r.seed = fam.canonicalize(seed);
    return r;
}

// Domains are base + decimal counter. Strip the digit tail, take the modal
// stem, and extrapolate from the smallest counter seen.
ReconstructionResult run_counter(const DgaFamily& fam, const std::vector<DomainName>& domains,
                                 const CivilDate& date, double required) {
    ReconstructionResult r;
    r.family = std::string(fam.name());
    r.strategy = "counter extrapolation";
    if (domains.size() < 2)
        return failure(std::move(r), ReconstructStatus::kNoSeedFound,
                       "need at least two domains to anchor a counter");

    struct Parsed {
        std::string stem;
        std::string tld;
        std::uint64_t counter;
    };
    std::vector<Parsed> parsed;
    std::map<std::pair<std::string, std::string>, std::size_t> stems;
    for (const auto& d : domains) {
        std::size_t cut = d.sld.size();
        while (cut > 0 && d.sld[cut - 1] >= '0' && d.sld[cut - 1] <= '9') cut--;
        if (cut == 0 || cut == d.sld.size()) continue;
        std::string suffix = d.sld.substr(cut);
        if (suffix.size() > 19) continue;
        std::uint64_t counter = std::stoull(suffix);
        if (std::to_string(counter) != suffix) continue;  // padded counters never occur
        parsed.push_back({d.sld.substr(0, cut), d.tld, counter});
        stems[{parsed.back().stem, d.tld}]++;
    }
    if (parsed.empty())
        return failure(std::move(r), ReconstructStatus::kNoSeedFound, "no digit tails found");

    auto best = std::max_element(stems.begin(), stems.end(),
                                 [](const auto& a, const auto& b) { return a.second < b.second; });
    if (best->second < 2)
        return failure(std::move(r), ReconstructStatus::kNoSeedFound, "no shared base");

    std::uint64_t start = ~0ULL;
    for (const auto& p : parsed)
        if (p.stem == best->first.first && p.tld == best->first.second)
            start = std::min(start, p.counter);

    SeedSet seed = {{"base", best->first.first}, {"start", start}, {"tld", best->first.second}};
    if (auto err = fam.validate(seed))
        return failure(std::move(r), ReconstructStatus::kNoSeedFound, *err);
    r.coverage = regen_coverage(fam, seed, date, name_set(domains));
    if (r.coverage < required)
        return failure(std::move(r), ReconstructStatus::kNoSeedFound,
                       "counter window covers too little of the batch");
    r.status = ReconstructStatus::kSuccess;
    r.seed = seed;
    return r;
}

// Shared sweep over an enumerable candidate space. Probes a short prefix per
// candidate and keeps candidates whose prefix overlaps the batch.
struct SweepCandidate {
    std::uint64_t seed;
    int date_idx;
    double coverage;
};

// Keyed 16-bit state space crossed with the execution date and its
// neighbours. The full sweep is cheap enough to run exhaustively.
ReconstructionResult run_keyed_sweep(const DgaFamily& fam, const std::vector<DomainName>& domains,
                                     const CivilDate& exec_date, const ReconstructOptions& opts) {
    ReconstructionResult r;
    r.family = std::string(fam.name());
    r.strategy = "keyed state sweep";

    std::string tld = modal_tld(domains);
    if (tld != "com" && tld != "net")
        return failure(std::move(r), ReconstructStatus::kNoSeedFound,
                       "batch tld outside the family envelope");
    if (opts.budget < kLcgSeedSpace)
        return failure(std::move(r), ReconstructStatus::kBudgetExhausted,
                       "budget below the 65536-seed space");

    auto inputs = name_set(domains);
    const std::size_t probe = 32;
    const std::size_t need = std::min<std::size_t>(5, inputs.size());
    const std::array<CivilDate, 3> dates = {add_days(exec_date, -1), exec_date,
                                            add_days(exec_date, 1)};
    const std::uint64_t total = kLcgSeedSpace * dates.size();

    auto probe_hit = [&](std::uint64_t seed_value, int date_idx) {
        SeedSet seed = {{"seed", seed_value}, {"tld", tld}};
        auto gen = fam.generate(seed, dates[std::size_t(date_idx)], probe);
        std::size_t overlap = 0;
        for (const auto& g : gen) overlap += inputs.count(g);
        return overlap >= need;
    };

    std::vector<SweepCandidate> hits;
    bool stopped_early = false;
    unsigned threads = std::max(1u, opts.threads);
    if (threads > 1 && opts.budget >= total) {
        // full sweep, so sharding cannot change which candidates are probed
        std::atomic<std::uint64_t> evals{0};
        std::vector<std::vector<SweepCandidate>> shard_hits(threads);
        std::vector<std::thread> pool;
        std::uint64_t chunk = (kLcgSeedSpace + threads - 1) / threads;
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back([&, t] {
                std::uint64_t lo = t * chunk;
                std::uint64_t hi = std::min<std::uint64_t>(lo + chunk, kLcgSeedSpace);
                for (std::uint64_t s = lo; s < hi; ++s) {
                    for (int di = 0; di < int(dates.size()); ++di) {
                        evals.fetch_add(1, std::memory_order_relaxed);
                        if (probe_hit(s, di)) shard_hits[t].push_back({s, di, 0.0});
                    }
                }
            });
        }
        for (auto& th : pool) th.join();
        for (auto& sh : shard_hits) hits.insert(hits.end(), sh.begin(), sh.end());
        r.evaluations = evals.load();
    } else {
        for (std::uint64_t s = 0; s < kLcgSeedSpace && !stopped_early; ++s) {
            for (int di = 0; di < int(dates.size()); ++di) {
                if (r.evaluations == opts.budget) {
                    stopped_early = true;
                    break;
                }
                r.evaluations++;
                if (probe_hit(s, di)) hits.push_back({s, di, 0.0});
            }
        }
    }

    if (hits.empty())
        return failure(std::move(r),
                       stopped_early ? ReconstructStatus::kBudgetExhausted
                                     : ReconstructStatus::kNoSeedFound,
                       stopped_early ? "budget spent before any candidate matched"
                                     : "no seed regenerates the batch");

    for (auto& h : hits) {
        SeedSet seed = {{"seed", h.seed}, {"tld", tld}};
        h.coverage = regen_coverage(fam, seed, dates[std::size_t(h.date_idx)], inputs);
    }
    std::sort(hits.begin(), hits.end(), [](const SweepCandidate& a, const SweepCandidate& b) {
        if (a.coverage != b.coverage) return a.coverage > b.coverage;
        if (a.seed != b.seed) return a.seed < b.seed;
        return a.date_idx < b.date_idx;
    });
    const auto& best = hits.front();
    r.coverage = best.coverage;
    if (best.coverage < opts.required_fraction)
        return failure(std::move(r), ReconstructStatus::kNoSeedFound,
                       "best candidate regenerates too little of the batch");
    r.status = ReconstructStatus::kSuccess;
    r.seed = SeedSet{{"seed", best.seed}, {"tld", tld}};
    r.seed_date = dates[std::size_t(best.date_idx)];
    return r;
}

// Seeds collapse modulo a small constant, so sweeping the residues covers
// the whole 64-bit seed space.
ReconstructionResult run_residue_sweep(const DgaFamily& fam, const std::vector<DomainName>& domains,
                                       const CivilDate& date, const ReconstructOptions& opts) {
    ReconstructionResult r;
    r.family = std::string(fam.name());
    r.strategy = "residue sweep";
    if (opts.budget < kModDgaModulus)
        return failure(std::move(r), ReconstructStatus::kBudgetExhausted,
                       "budget below the residue count");

    auto inputs = name_set(domains);
    const std::size_t probe = 8;
    const std::size_t need = std::min<std::size_t>(5, inputs.size());

    std::vector<SweepCandidate> hits;
    for (std::uint64_t residue = 0; residue < kModDgaModulus; ++residue) {
        r.evaluations++;
        SeedSet seed = {{"seed", residue}};
        auto gen = fam.generate(seed, date, probe);
        std::size_t overlap = 0;
        for (const auto& g : gen) overlap += inputs.count(g);
        if (overlap >= need) hits.push_back({residue, 0, 0.0});
    }
    if (hits.empty())
        return failure(std::move(r), ReconstructStatus::kNoSeedFound,
                       "no residue regenerates the batch");

    for (auto& h : hits) h.coverage = regen_coverage(fam, {{"seed", h.seed}}, date, inputs);
    std::sort(hits.begin(), hits.end(), [](const SweepCandidate& a, const SweepCandidate& b) {
        if (a.coverage != b.coverage) return a.coverage > b.coverage;
        return a.seed < b.seed;
    });
    r.coverage = hits.front().coverage;
    if (r.coverage < opts.required_fraction)
        return failure(std::move(r), ReconstructStatus::kNoSeedFound,
                       "best residue regenerates too little of the batch");
    r.status = ReconstructStatus::kSuccess;
    r.seed = SeedSet{{"seed", hits.front().seed}};
    return r;
}

// Domains are two words from one list; the pair plus the tld parity pins the
// index k = first + 128 * second, and unambiguous domains anchor the start.
ReconstructionResult run_dictionary(const DgaFamily& fam, const std::vector<DomainName>& domains,
                                    const CivilDate& date, const ReconstructOptions& opts) {
    ReconstructionResult r;
    r.family = std::string(fam.name());
    r.strategy = "dictionary index mapping";
    constexpr std::uint64_t kIndexSpace = kWordsPerList * kWordsPerList;

    const auto& lists = word_lists();
    std::array<std::unordered_map<std::string_view, std::uint64_t>, kWordListCount> index;
    for (std::size_t l = 0; l < kWordListCount; ++l)
        for (std::size_t j = 0; j < kWordsPerList; ++j) index[l][lists[l][j]] = j;

    // candidate k values per domain, per list
    std::array<std::vector<std::set<std::uint64_t>>, kWordListCount> candidates;
    std::array<std::size_t, kWordListCount> splittable = {0, 0, 0};
    for (std::size_t l = 0; l < kWordListCount; ++l) {
        candidates[l].resize(domains.size());
        for (std::size_t i = 0; i < domains.size(); ++i) {
            const auto& d = domains[i];
            if (d.tld != "net" && d.tld != "org") continue;
            if (!all_letters(d.sld)) continue;
            for (std::size_t cut = 1; cut < d.sld.size(); ++cut) {
                auto first = index[l].find(std::string_view(d.sld).substr(0, cut));
                if (first == index[l].end()) continue;
                auto second = index[l].find(std::string_view(d.sld).substr(cut));
                if (second == index[l].end()) continue;
                std::uint64_t k = first->second + kWordsPerList * second->second;
                if ((k % 2 == 1) != (d.tld == "org")) continue;
                candidates[l][i].insert(k);
            }
            if (!candidates[l][i].empty()) splittable[l]++;
        }
    }

    std::vector<std::size_t> viable;
    for (std::size_t l = 0; l < kWordListCount; ++l)
        if (double(splittable[l]) >= 0.9 * double(domains.size())) viable.push_back(l);
    if (viable.empty())
        return failure(std::move(r), ReconstructStatus::kNoSeedFound,
                       "domains are not word-pair concatenations");
    if (viable.size() > 1)
        return failure(std::move(r), ReconstructStatus::kNoSeedFound,
                       "batch is consistent with more than one word list");

    std::size_t list = viable[0];
    std::uint64_t min_anchor = ~0ULL;
    for (const auto& ks : candidates[list])
        if (ks.size() == 1) min_anchor = std::min(min_anchor, *ks.begin());
    if (min_anchor == ~0ULL)
        return failure(std::move(r), ReconstructStatus::kNoSeedFound,
                       "every domain splits ambiguously");

    // The smallest anchored index sits at most |batch|-1 steps past the true
    // start, so walk backwards and keep the best regeneration.
    auto inputs = name_set(domains);
    std::uint64_t best_start = min_anchor;
    double best_cov = -1.0;
    for (std::uint64_t back = 0; back < domains.size(); ++back) {
        if (r.evaluations == opts.budget) break;
        r.evaluations++;
        std::uint64_t start = (min_anchor + kIndexSpace - back % kIndexSpace) % kIndexSpace;
        SeedSet seed = {{"list", list}, {"start", start}};
        double cov = regen_coverage(fam, seed, date, inputs);
        if (cov > best_cov) {
            best_cov = cov;
            best_start = start;
        }
        if (best_cov == 1.0) break;
    }
    r.coverage = best_cov;
    if (best_cov < opts.required_fraction)
        return failure(std::move(r), ReconstructStatus::kNoSeedFound,
                       "no start index regenerates enough of the batch");
    r.status = ReconstructStatus::kSuccess;
    r.seed = SeedSet{{"list", std::uint64_t(list)}, {"start", best_start}};
    return r;
}

}  // namespace

std::string_view to_string(ReconstructStatus s) {
    switch (s) {
        case ReconstructStatus::kSuccess: return "success";
        case ReconstructStatus::kNoSeedFound: return "no_seed_found";
        case ReconstructStatus::kBudgetExhausted: return "budget_exhausted";
        case ReconstructStatus::kNotApplicable: return "not_applicable";
    }
    return "unknown";
}

ReconstructionResult reconstruct_seed(std::string_view family,
                                      const std::vector<DomainName>& domains,
                                      const CivilDate& execution_date,
                                      const ReconstructOptions& opts) {
    if (domains.empty()) throw std::invalid_argument("reconstruct_seed: no domains");

    ReconstructionResult r;
    r.family = std::string(family);
    if (family == "benign") {
        r.note = "catch-all label has no generator";
        return r;
    }
    const DgaFamily* fam = find_family(family);
    if (!fam) throw std::invalid_argument("reconstruct_seed: unknown family " + r.family);
    if (!fam->deterministic()) {
        r.note = "seed space is not enumerable for a non-deterministic generator";
        return r;
    }

    auto inputs = cap_inputs(domains, opts.max_domains);
    if (family == "permdga") return run_permutation(*fam, inputs, opts.required_fraction);
    if (family == "iterdga")
        return run_counter(*fam, inputs, execution_date, opts.required_fraction);
    if (family == "lcgdga") return run_keyed_sweep(*fam, inputs, execution_date, opts);
    if (family == "moddga") return run_residue_sweep(*fam, inputs, execution_date, opts);
    if (family == "worddga") return run_dictionary(*fam, inputs, execution_date, opts);

    r.note = "no reconstruction strategy registered for this family";
    return r;
}

}  // namespace dgakit
