#include "dgakit/agd_db.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace dgakit {

void KnownDomainIndex::insert(const std::string& domain, const std::string& family,
                              const std::string& seed_id) {
    auto& sources = index_[domain];
    DomainSource src{family, seed_id};
    if (std::find(sources.begin(), sources.end(), src) != sources.end()) return;
    sources.push_back(std::move(src));
    ++entries_;
}

const std::vector<DomainSource>* KnownDomainIndex::lookup(const std::string& normalized) const {
    auto it = index_.find(normalized);
    return it == index_.end() ? nullptr : &it->second;
}

std::map<std::string, std::size_t> KnownDomainIndex::family_entry_counts() const {
    std::map<std::string, std::size_t> counts;
    for (const auto& [domain, sources] : index_)
        for (const auto& src : sources) counts[src.family]++;
    return counts;
}

void KnownDomainIndex::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("agd db: cannot write " + path);
    for (const auto& [domain, sources] : index_) {
        auto sorted = sources;
        std::sort(sorted.begin(), sorted.end(), [](const DomainSource& a, const DomainSource& b) {
            return std::tie(a.family, a.seed_id) < std::tie(b.family, b.seed_id);
        });
        for (const auto& src : sorted)
            out << domain << '\t' << src.family << '\t' << src.seed_id << '\n';
    }
    if (!out) throw std::runtime_error("agd db: write failed for " + path);

    nlohmann::ordered_json meta;
    meta["entries"] = entries_;
    meta["unique_domains"] = index_.size();
    meta["families"] = nlohmann::ordered_json::object();
    for (const auto& [family, count] : family_entry_counts()) meta["families"][family] = count;
    std::ofstream meta_out(path + ".meta.json");
    if (!meta_out) throw std::runtime_error("agd db: cannot write " + path + ".meta.json");
    meta_out << meta.dump(2) << '\n';
}

KnownDomainIndex KnownDomainIndex::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("agd db: cannot open " + path);
    KnownDomainIndex idx;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        auto fields = split(line, '\t');
        if (fields.size() != 3)
            throw std::runtime_error("agd db: " + path + ":" + std::to_string(lineno) +
                                     ": expected 3 fields");
        idx.insert(fields[0], fields[1], fields[2]);
    }
    return idx;
}

KnownDomainIndex build_index(const std::vector<const DgaFamily*>& families,
                             const DbBuildOptions& opts) {
    if (days_from_civil(opts.range_end) < days_from_civil(opts.range_start))
        throw std::invalid_argument("agd db: date range ends before it starts");

    KnownDomainIndex idx;
    for (const auto* fam : families) {
        for (const auto& seed : fam->known_campaigns()) {
            const std::string seed_id = seed_to_string(fam->canonicalize(seed));
            std::vector<CivilDate> dates;
            if (fam->date_dependent()) {
                for (auto d = days_from_civil(opts.range_start);
                     d <= days_from_civil(opts.range_end); ++d)
                    dates.push_back(civil_from_days(d));
            } else {
                dates.push_back(opts.range_start);
            }
            for (const auto& date : dates)
                for (const auto& domain : fam->generate(seed, date, opts.domains_per_seed))
                    idx.insert(domain, std::string(fam->name()), seed_id);
        }
    }
    return idx;
}

BatchLookup lookup_batch(const KnownDomainIndex& index, const std::vector<DomainName>& domains) {
    BatchLookup result;
    result.batch_size = domains.size();

    std::vector<std::set<std::string>> hit_families(domains.size());
    for (std::size_t i = 0; i < domains.size(); ++i) {
        const auto* sources = index.lookup(domains[i].normalized);
        if (!sources) continue;
        for (const auto& src : *sources) hit_families[i].insert(src.family);
    }
    for (const auto& fams : hit_families)
        for (const auto& f : fams) result.family_hits[f]++;

    for (const auto& [family, hits] : result.family_hits)
        if (is_collision(hits, result.batch_size)) result.collision_families.insert(family);

    for (const auto& fams : hit_families) {
        for (const auto& f : fams) {
            if (!result.collision_families.count(f)) {
                result.recognized++;
                break;
            }
        }
    }
    result.alpha = result.batch_size == 0
                       ? 0.0
                       : static_cast<double>(result.recognized) /
                             static_cast<double>(result.batch_size);
    return result;
}

}  // namespace dgakit
