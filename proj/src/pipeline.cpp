#include "dgakit/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <numeric>
#include <set>
#include <stdexcept>
#include <thread>

#include "dgakit/regex_tools.hpp"
#include "dgakit/zoo.hpp"

namespace dgakit {

using nlohmann::ordered_json;

namespace {

ordered_json seed_json(const SeedSet& seed) {
    ordered_json j = ordered_json::object();
    for (const auto& [k, v] : seed) {
        if (std::holds_alternative<std::uint64_t>(v))
            j[k] = std::get<std::uint64_t>(v);
        else
            j[k] = std::get<std::string>(v);
    }
    return j;
}

ordered_json votes_json(const std::vector<std::size_t>& counts, const FamilyRegistry& reg) {
    ordered_json j = ordered_json::object();
    for (std::size_t i = 0; i < counts.size(); ++i)
        if (counts[i] > 0) j[reg.at(i).name] = counts[i];
    return j;
}

ordered_json analyze_sample_impl(const SampleBatch& batch, const AnalysisContext& ctx,
                                 const AnalyzeOptions& opts) {
    const Classifier& model = *ctx.model;
    const FamilyRegistry& reg = model.registry();
    const std::size_t benign = reg.benign_index();

    AllowlistSplit split;
    if (ctx.allowlist) {
        split = apply_allowlist(batch, *ctx.allowlist);
    } else {
        split.to_classify.resize(batch.domains.size());
        std::iota(split.to_classify.begin(), split.to_classify.end(), 0);
    }
    std::vector<bool> allowlisted(batch.domains.size(), false);
    for (std::size_t idx : split.allowlisted) allowlisted[idx] = true;

    struct Pick {
        std::size_t on = 0;
        std::size_t off = 0;
        bool changed = false;
        double max_prob = 0.0;
    };
    std::vector<Pick> picks(batch.domains.size());
    std::vector<std::size_t> votes_on, votes_off;
    std::set<std::size_t> discarded;
    std::vector<DomainName> classify;
    classify.reserve(split.to_classify.size());
    for (std::size_t idx : split.to_classify) {
        const DomainName& d = batch.domains[idx].domain;
        classify.push_back(d);
        auto probs = model.predict_proba(encode(d));
        Pick p;
        p.off = argmax(probs);
        p.max_prob = probs[p.off];
        auto m = matcher_pick(probs, d, reg, discarded);
        p.on = m.label;
        p.changed = m.regex_changed;
        picks[idx] = p;
        votes_on.push_back(p.on);
        votes_off.push_back(p.off);
    }
    // domains cleared by the allowlist still count as benign votes
    votes_on.insert(votes_on.end(), split.allowlisted.size(), benign);
    votes_off.insert(votes_off.end(), split.allowlisted.size(), benign);
    std::size_t maj_on = reg.majority(votes_on);
    std::size_t maj_off = reg.majority(votes_off);

    std::optional<BatchLookup> lookup;
    std::optional<SuspicionIndicators> indicators;
    double score = 0.0;
    if (!classify.empty()) {
        if (ctx.db) lookup = lookup_batch(*ctx.db, classify);
        IndicatorInputs in;
        in.n_predictions = classify.size();
        std::set<std::size_t> unique_labels;
        std::size_t n_changed = 0;
        double prob_sum = 0.0;
        for (std::size_t idx : split.to_classify) {
            const Pick& p = picks[idx];
            unique_labels.insert(p.on);
            if (p.on == benign) in.n_benign++;
            if (p.changed) n_changed++;
            prob_sum += p.max_prob;
        }
        in.n_unique_families = unique_labels.size();
        in.n_regex_changed = n_changed;
        in.mean_max_probability = prob_sum / double(classify.size());
        in.alpha = lookup ? lookup->alpha : 0.0;
        in.majority_deterministic = reg.at(maj_on).deterministic;
        indicators = compute_indicators(in);
        score = compute_score(*indicators);
    }
    auto category = categorize(score);

    std::optional<FamilyRegex> extracted;
    if (!classify.empty()) {
        auto er = extract_regex(classify);
        if (std::holds_alternative<FamilyRegex>(er)) extracted = std::get<FamilyRegex>(er);
    }

    std::vector<std::size_t> counts_on(reg.size(), 0), counts_off(reg.size(), 0);
    for (std::size_t v : votes_on) counts_on[v]++;
    for (std::size_t v : votes_off) counts_off[v]++;

    // Seed recovery tries the strongest non-benign hypothesis first, then the
    // unmatched vote, then the remaining strategies. Every strategy validates
    // its candidate by regeneration, so walking the chain cannot produce a
    // false seed; it only costs sweep time on genuinely novel batches.
    auto top_family = [&](const std::vector<std::size_t>& counts) -> std::optional<std::size_t> {
        std::optional<std::size_t> best;
        for (std::size_t i = 0; i < counts.size(); ++i) {
            if (i == benign || counts[i] == 0) continue;
            if (!best || counts[i] > counts[*best]) best = i;
        }
        return best;
    };
    std::optional<ReconstructionResult> recon;
    bool fallback_used = false;
    auto target_on = top_family(counts_on);
    double gate = reg.at(target_on ? *target_on : maj_on).threshold;
    if (opts.reconstruct && !classify.empty() && score > gate) {
        std::vector<std::size_t> chain;
        auto push_unique = [&](std::size_t idx) {
            if (std::find(chain.begin(), chain.end(), idx) == chain.end()) chain.push_back(idx);
        };
        if (target_on) push_unique(*target_on);
        if (auto target_off = top_family(counts_off)) push_unique(*target_off);
        for (std::size_t i = 0; i < reg.size(); ++i)
            if (i != benign && reg.at(i).deterministic) push_unique(i);
        for (std::size_t idx : chain) {
            ReconstructionResult attempt;
            try {
                attempt = reconstruct_seed(reg.at(idx).name, classify, batch.execution_date,
                                           opts.reconstruct_opts);
            } catch (const std::invalid_argument&) {
                continue;  // label without a generator behind it
            }
            if (!recon) recon = attempt;
            if (attempt.status == ReconstructStatus::kSuccess) {
                recon = attempt;
                break;
            }
        }
        if (recon) fallback_used = recon->family != reg.at(chain.front()).name;
    }

    ordered_json j;
    j["md5hash"] = batch.md5hash;
    j["execution_date"] = to_string(batch.execution_date);
    j["n_domains"] = batch.domains.size();
    j["n_allowlisted"] = split.allowlisted.size();
    j["nxdomain_ratio"] = batch.nxdomain_ratio;
    j["majority"] = {{"with_matcher", reg.at(maj_on).name},
                     {"without_matcher", reg.at(maj_off).name}};
    j["votes"] = {{"with_matcher", votes_json(counts_on, reg)},
                  {"without_matcher", votes_json(counts_off, reg)}};
    if (lookup) {
        ordered_json db;
        db["alpha"] = lookup->alpha;
        db["recognized"] = lookup->recognized;
        db["batch_size"] = lookup->batch_size;
        db["family_hits"] = ordered_json::object();
        for (const auto& [fam, hits] : lookup->family_hits) db["family_hits"][fam] = hits;
        db["collision_families"] = ordered_json::array();
        for (const auto& fam : lookup->collision_families) db["collision_families"].push_back(fam);
        j["database"] = db;
    } else {
        j["database"] = nullptr;
    }
    if (indicators) {
        ordered_json ind;
        ind["a"] = indicators->a;
        ind["b"] = indicators->b;
        if (indicators->c) ind["c"] = *indicators->c;
        ind["d"] = indicators->d;
        ind["alpha"] = indicators->alpha;
        ind["beta"] = indicators->beta;
        j["indicators"] = ind;
    } else {
        j["indicators"] = nullptr;
    }
    j["score"] = score;
    j["category"] = std::string(to_string(category));
    if (extracted) {
        j["extracted_regex"] = extracted->render();
        auto agreement = regex_agreement(*extracted, reg.at(maj_on).regex);
        j["regex_agreement"] = {{"charclass_subset", agreement.charclass_subset},
                                {"length_within", agreement.length_within},
                                {"tlds_subset", agreement.tlds_subset}};
    } else {
        j["extracted_regex"] = nullptr;
        j["regex_agreement"] = nullptr;
    }
    if (recon) {
        ordered_json rc;
        rc["status"] = std::string(to_string(recon->status));
        rc["family"] = recon->family;
        rc["strategy"] = recon->strategy;
        rc["seed"] = recon->seed ? seed_json(*recon->seed) : ordered_json(nullptr);
        rc["seed_date"] =
            recon->seed_date ? ordered_json(to_string(*recon->seed_date)) : ordered_json(nullptr);
        rc["coverage"] = recon->coverage;
        rc["evaluations"] = recon->evaluations;
        rc["note"] = recon->note;
        rc["fallback"] = fallback_used;
        j["reconstruction"] = rc;
    } else {
        j["reconstruction"] = nullptr;
    }
    j["domains"] = ordered_json::array();
    for (std::size_t i = 0; i < batch.domains.size(); ++i) {
        ordered_json d;
        d["name"] = batch.domains[i].domain.normalized;
        if (allowlisted[i]) {
            d["tag"] = "allowlisted";
        } else {
            d["tag"] = "classified";
            d["predicted"] = reg.at(picks[i].on).name;
            d["max_prob"] = picks[i].max_prob;
            d["regex_changed"] = picks[i].changed;
        }
        j["domains"].push_back(d);
    }
    return j;
}

}  // namespace

ordered_json analyze_sample(const SampleBatch& batch, const AnalysisContext& ctx,
                            const AnalyzeOptions& opts) {
    if (!ctx.model) throw std::invalid_argument("analyze_sample: model required");
    try {
        return analyze_sample_impl(batch, ctx, opts);
    } catch (const std::exception& e) {
        ordered_json j;
        j["md5hash"] = batch.md5hash;
        j["error"] = e.what();
        return j;
    }
}

std::vector<ordered_json> analyze_samples(const std::vector<SampleBatch>& batches,
                                          const AnalysisContext& ctx, const AnalyzeOptions& opts) {
    if (!ctx.model) throw std::invalid_argument("analyze_samples: model required");
    std::vector<ordered_json> out(batches.size());
    unsigned threads = std::max(1u, opts.threads);
    if (threads == 1 || batches.size() < 2) {
        for (std::size_t i = 0; i < batches.size(); ++i)
            out[i] = analyze_sample(batches[i], ctx, opts);
        return out;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= batches.size()) return;
            out[i] = analyze_sample(batches[i], ctx, opts);
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    return out;
}

ordered_json to_json(const FilterStats& s) {
    ordered_json j;
    j["input"] = s.input;
    j["rejected_too_short"] = s.rejected_too_short;
    j["rejected_no_dot"] = s.rejected_no_dot;
    j["rejected_bad_char"] = s.rejected_bad_char;
    j["rejected_short_after_strip"] = s.rejected_short_after_strip;
    j["rejected_dns_type"] = s.rejected_dns_type;
    j["deduplicated"] = s.deduplicated;
    j["kept"] = s.kept;
    return j;
}

ordered_json to_json(const GroupStats& s) {
    ordered_json j;
    j["kept"] = s.kept;
    j["dropped_too_few_domains"] = s.dropped_too_few_domains;
    j["dropped_low_nx_ratio"] = s.dropped_low_nx_ratio;
    j["drops"] = ordered_json::array();
    for (const auto& d : s.drops) j["drops"].push_back({{"md5hash", d.md5hash}, {"reason", d.reason}});
    return j;
}

namespace {

std::string synth_hash(const std::string& tag) {
    char buf[33];
    std::snprintf(buf, sizeof buf, "%016llx%016llx",
                  static_cast<unsigned long long>(fnv1a64(tag)),
                  static_cast<unsigned long long>(fnv1a64(tag + "|2")));
    return buf;
}

}  // namespace

ExperimentReport run_identification_experiment(const Classifier& model,
                                               const ExperimentOptions& opts) {
    const FamilyRegistry& reg = model.registry();
    std::vector<const DgaFamily*> fams;
    for (const auto& f : all_families())
        if (f->deterministic() && !f->known_campaigns().empty()) fams.push_back(f.get());
    for (const auto* f : fams)
        if (!reg.index_of(f->name()))
            throw std::invalid_argument("experiment: model does not know family " +
                                        std::string(f->name()));

    DbBuildOptions db_opts;
    db_opts.domains_per_seed = opts.db_domains_per_seed;
    db_opts.range_start = add_days(opts.execution_date, -1);
    db_opts.range_end = add_days(opts.execution_date, 1);
    KnownDomainIndex db = build_index(fams, db_opts);

    struct Planned {
        std::string family;
        std::string kind;
        std::string seed;
        std::size_t n = 0;
    };
    std::vector<DnsLogRecord> records;
    std::map<std::string, Planned> planned;
    std::vector<std::string> order;
    const std::int64_t base_ts = days_from_civil(opts.execution_date) * 86400;

    auto add_campaign = [&](const DgaFamily& fam, const SeedSet& seed, const std::string& kind,
                            std::size_t n, const std::string& tag) {
        auto domains = fam.generate(seed, opts.execution_date, n);
        std::string hash = synth_hash(tag);
        for (std::size_t i = 0; i < domains.size(); ++i)
            records.push_back({base_ts + std::int64_t(i), hash, domains[i], DnsType::kA,
                               "NXDOMAIN"});
        planned[hash] = {std::string(fam.name()), kind,
                         seed_to_string(fam.canonicalize(seed)), domains.size()};
        order.push_back(hash);
    };

    Rng rng(opts.rng_seed);
    for (const auto* fam : fams) {
        auto known = fam->known_campaigns();
        std::set<std::string> used;
        for (std::size_t c = 0; c < known.size(); ++c) {
            std::string canon = seed_to_string(fam->canonicalize(known[c]));
            used.insert(canon);
            add_campaign(*fam, known[c], "real", opts.domains_per_campaign,
                         "real:" + std::string(fam->name()) + ":" + canon);
        }
        for (std::size_t e = 0; e < opts.extended_counts.size() && !known.empty(); ++e) {
            const SeedSet& seed = known[e % known.size()];
            add_campaign(*fam, seed, "real_extended", opts.extended_counts[e],
                         "ext:" + std::string(fam->name()) + ":" + std::to_string(e));
        }
        // fresh seeds are resampled until none of their domains is catalogued
        std::size_t made = 0;
        for (std::size_t attempt = 0;
             made < opts.fake_per_family && attempt < 1000 * opts.fake_per_family; ++attempt) {
            SeedSet seed = fam->sample_seed(rng);
            std::string canon = seed_to_string(fam->canonicalize(seed));
            if (!used.insert(canon).second) continue;
            auto domains = fam->generate(seed, opts.execution_date, opts.domains_per_campaign);
            if (domains.size() < opts.domains_per_campaign) continue;
            bool catalogued = false;
            for (const auto& d : domains)
                if (db.lookup(d)) {
                    catalogued = true;
                    break;
                }
            if (catalogued) continue;
            add_campaign(*fam, seed, "fake", opts.domains_per_campaign,
                         "fake:" + std::string(fam->name()) + ":" + canon);
            made++;
        }
        if (made < opts.fake_per_family)
            throw std::runtime_error("experiment: could not sample enough fresh seeds for " +
                                     std::string(fam->name()));
    }

    auto filtered = filter_records(records);
    auto batches = group_samples(filtered);
    AnalysisContext ctx{&model, &db, nullptr};
    AnalyzeOptions aopts;
    aopts.threads = opts.threads;
    auto reports = analyze_samples(batches, ctx, aopts);
    std::map<std::string, const ordered_json*> by_hash;
    for (const auto& r : reports) by_hash[r["md5hash"].get<std::string>()] = &r;

    ExperimentReport rep;
    for (const auto& hash : order) {
        const Planned& plan = planned.at(hash);
        ExperimentRow row;
        row.family = plan.family;
        row.kind = plan.kind;
        row.md5hash = hash;
        row.seed = plan.seed;
        row.n_domains = plan.n;

        auto it = by_hash.find(hash);
        if (it == by_hash.end() || it->second->contains("error")) {
            row.score = -1.0;
            row.category = "error";
        } else {
            const ordered_json& r = *it->second;
            if (!r["database"].is_null()) row.alpha = r["database"]["alpha"].get<double>();
            row.score = r["score"].get<double>();
            row.category = r["category"].get<std::string>();
            row.majority = r["majority"]["with_matcher"].get<std::string>();
            const auto& rc = r["reconstruction"];
            if (!rc.is_null()) {
                row.reconstruction_status = rc["status"].get<std::string>();
                if (!rc["seed"].is_null()) {
                    std::string got;
                    for (const auto& [k, v] : rc["seed"].items()) {
                        if (!got.empty()) got += ",";
                        got += k + "=" +
                               (v.is_string() ? v.get<std::string>() : v.dump());
                    }
                    bool date_ok = rc["seed_date"].is_null() ||
                                   rc["seed_date"].get<std::string>() ==
                                       to_string(opts.execution_date);
                    row.seed_recovered = (got == plan.seed) && date_ok;
                }
            }
        }

        double threshold = 5.0;
        if (auto idx = reg.index_of(plan.family)) threshold = reg.at(*idx).threshold;
        if (plan.kind == "real") {
            rep.n_real++;
            if (row.category != "error" && row.score <= threshold) rep.n_real_at_or_below++;
        } else if (plan.kind == "fake") {
            rep.n_fake++;
            if (row.category != "error" && row.score > threshold) rep.n_fake_above++;
        }
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

ordered_json ExperimentReport::to_json() const {
    ordered_json j;
    j["summary"] = {{"fake_campaigns", n_fake},
                    {"fake_above_threshold", n_fake_above},
                    {"real_campaigns", n_real},
                    {"real_at_or_below_threshold", n_real_at_or_below}};
    j["rows"] = ordered_json::array();
    for (const auto& r : rows) {
        ordered_json row;
        row["family"] = r.family;
        row["kind"] = r.kind;
        row["md5hash"] = r.md5hash;
        row["seed"] = r.seed;
        row["n_domains"] = r.n_domains;
        row["alpha"] = r.alpha;
        row["score"] = r.score;
        row["category"] = r.category;
        row["majority"] = r.majority;
        row["reconstruction_status"] = r.reconstruction_status;
        row["seed_recovered"] = r.seed_recovered;
        j["rows"].push_back(row);
    }
    return j;
}

ordered_json compute_log_stats(const std::vector<DnsLogRecord>& records,
                               const KnownDomainIndex* db) {
    struct Day {
        std::size_t records = 0;
        std::size_t nx = 0;
        std::map<std::string, std::size_t> types;
        std::set<std::string> hashes;
        std::size_t kept = 0;
        std::size_t recognized = 0;
    };
    std::map<std::string, Day> days;  // ISO date sorts chronologically
    std::map<std::string, std::set<std::uint32_t>> hash_days;
    std::map<std::string, std::pair<std::int64_t, std::int64_t>> hash_span;
    for (const auto& r : records) {
        CivilDate d = date_from_epoch(r.timestamp);
        Day& day = days[to_string(d)];
        day.records++;
        if (r.nxdomain()) day.nx++;
        day.types[std::string(to_string(r.dns_type))]++;
        day.hashes.insert(r.md5hash);
        hash_days[r.md5hash].insert(date_key(d));
        auto [it, fresh] = hash_span.emplace(r.md5hash, std::pair{r.timestamp, r.timestamp});
        if (!fresh) {
            it->second.first = std::min(it->second.first, r.timestamp);
            it->second.second = std::max(it->second.second, r.timestamp);
        }
    }
    for (const auto& f : filter_records(records)) {
        Day& day = days[to_string(date_from_epoch(f.first_ts))];
        day.kept++;
        if (db && db->lookup(f.domain.normalized)) day.recognized++;
    }

    ordered_json j;
    j["days"] = ordered_json::array();
    for (const auto& [date, day] : days) {
        ordered_json d;
        d["date"] = date;
        d["records"] = day.records;
        d["samples"] = day.hashes.size();
        d["nxdomain_fraction"] = day.records ? double(day.nx) / double(day.records) : 0.0;
        d["dns_types"] = ordered_json::object();
        for (const auto& [t, n] : day.types) d["dns_types"][t] = n;
        d["kept_after_filters"] = day.kept;
        if (db) d["database_recognized"] = day.recognized;
        j["days"].push_back(d);
    }
    std::map<std::size_t, std::size_t> by_days;
    for (const auto& [h, ds] : hash_days) by_days[ds.size()]++;
    j["samples_by_active_days"] = ordered_json::object();
    for (const auto& [n, count] : by_days) j["samples_by_active_days"][std::to_string(n)] = count;
    std::map<std::int64_t, std::size_t> by_hours;
    for (const auto& [h, span] : hash_span) by_hours[(span.second - span.first) / 3600]++;
    j["samples_by_duration_hours"] = ordered_json::object();
    for (const auto& [n, count] : by_hours)
        j["samples_by_duration_hours"][std::to_string(n)] = count;
    return j;
}

}  // namespace dgakit
