#pragma once

// Database of algorithmically generated domains precomputed from the known
// campaigns of every family. Batches of classified domains are looked up
// here to measure how much of a sample is already catalogued.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "dgakit/domain.hpp"
#include "dgakit/util.hpp"
#include "dgakit/zoo.hpp"

namespace dgakit {

// Hit counts below both limits are treated as accidental collisions.
inline constexpr std::size_t kCollisionMinHits = 5;
inline constexpr double kCollisionMinFraction = 0.03;

inline bool is_collision(std::size_t hits, std::size_t batch_size) {
    return hits < kCollisionMinHits ||
           static_cast<double>(hits) <
               kCollisionMinFraction * static_cast<double>(batch_size);
}

struct DomainSource {
    std::string family;
    std::string seed_id;  // canonical seed in k=v,k=v form

    friend bool operator==(const DomainSource&, const DomainSource&) = default;
};

class KnownDomainIndex {
public:
    void insert(const std::string& domain, const std::string& family,
                const std::string& seed_id);

    // nullptr when unknown.
    const std::vector<DomainSource>* lookup(const std::string& normalized) const;

    std::size_t domain_count() const { return index_.size(); }
    std::size_t entry_count() const { return entries_; }
    std::map<std::string, std::size_t> family_entry_counts() const;

    // TSV "domain \t family \t seed_id" in sorted order plus a JSON meta
    // sidecar at path + ".meta.json".
    void save(const std::string& path) const;
    static KnownDomainIndex load(const std::string& path);

private:
    std::map<std::string, std::vector<DomainSource>> index_;
    std::size_t entries_ = 0;
};

struct DbBuildOptions {
    std::size_t domains_per_seed = 256;
    CivilDate range_start{2026, 1, 1};  // inclusive, date-dependent families only
    CivilDate range_end{2026, 1, 1};
};

// One generate() call per known campaign, repeated per day of the range for
// date-dependent families. Seed ids are canonicalized.
KnownDomainIndex build_index(const std::vector<const DgaFamily*>& families,
                             const DbBuildOptions& opts);

struct BatchLookup {
    std::size_t batch_size = 0;
    std::size_t recognized = 0;  // domains with at least one non-collision hit
    double alpha = 0.0;
    std::map<std::string, std::size_t> family_hits;  // raw hit counts per family
    std::set<std::string> collision_families;
};

BatchLookup lookup_batch(const KnownDomainIndex& index, const std::vector<DomainName>& domains);

}  // namespace dgakit
