#pragma once

// End-to-end sample analysis: classify a sample's domains, run the majority
// vote with and without the pattern matcher, measure database recognition,
// score the batch, and recover the seed when the score crosses the family
// threshold. Also hosts the synthetic identification experiment and log
// statistics.

#include <json.hpp>

#include "dgakit/agd_db.hpp"
#include "dgakit/classifier.hpp"
#include "dgakit/ingest.hpp"
#include "dgakit/reconstruct.hpp"
#include "dgakit/scoring.hpp"

namespace dgakit {

struct AnalyzeOptions {
    bool reconstruct = true;
    ReconstructOptions reconstruct_opts;
    unsigned threads = 1;  // samples analyzed in parallel; output order is fixed
};

struct AnalysisContext {
    const Classifier* model = nullptr;
    const KnownDomainIndex* db = nullptr;
    const Allowlist* allowlist = nullptr;  // optional
};

// One JSON report per sample. Exceptions inside a sample are captured as
// {"md5hash":..., "error":...} so one bad batch cannot sink a whole run.
nlohmann::ordered_json analyze_sample(const SampleBatch& batch, const AnalysisContext& ctx,
                                      const AnalyzeOptions& opts = {});
std::vector<nlohmann::ordered_json> analyze_samples(const std::vector<SampleBatch>& batches,
                                                    const AnalysisContext& ctx,
                                                    const AnalyzeOptions& opts = {});

nlohmann::ordered_json to_json(const FilterStats& s);
nlohmann::ordered_json to_json(const GroupStats& s);

// Synthetic campaign study: replays known seeds (expected to be recognized
// and score 0) and freshly sampled seeds absent from the database (expected
// to score past the threshold), plus oversized known batches that exceed the
// database's per-seed depth.
struct ExperimentOptions {
    std::uint64_t rng_seed = 2026;
    std::size_t fake_per_family = 13;
    std::size_t domains_per_campaign = 100;
    std::size_t db_domains_per_seed = 256;
    CivilDate execution_date{2026, 2, 2};
    std::vector<std::size_t> extended_counts = {300, 600};
    unsigned threads = 1;
};

struct ExperimentRow {
    std::string family;
    std::string kind;  // "real", "fake" or "real_extended"
    std::string md5hash;
    std::string seed;  // planted seed, canonical form
    std::size_t n_domains = 0;
    double alpha = 0.0;
    double score = 0.0;
    std::string category;
    std::string majority;
    std::string reconstruction_status;  // empty when reconstruction did not run
    bool seed_recovered = false;        // recovered seed matches the planted one
};

struct ExperimentReport {
    std::vector<ExperimentRow> rows;
    std::size_t n_fake = 0;
    std::size_t n_fake_above = 0;  // fake campaigns scoring above their threshold
    std::size_t n_real = 0;
    std::size_t n_real_at_or_below = 0;
    nlohmann::ordered_json to_json() const;
};

ExperimentReport run_identification_experiment(const Classifier& model,
                                               const ExperimentOptions& opts = {});

// Per-day traffic summary plus sample activity histograms. `db` adds a
// recognized-domain column when present.
nlohmann::ordered_json compute_log_stats(const std::vector<DnsLogRecord>& records,
                                         const KnownDomainIndex* db = nullptr);

}  // namespace dgakit
