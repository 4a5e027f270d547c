// Command line front end: database building, training, evaluation, log
// analysis, seed recovery, generator inspection, the synthetic experiment
// and log statistics. Every option can also come from an INI config file
// (--config) under a [subcommand] section; flags override the file.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "dgakit/pipeline.hpp"
#include "dgakit/zoo.hpp"

using namespace dgakit;
using nlohmann::ordered_json;

namespace {

CivilDate require_date(const std::string& s, const char* what) {
    auto d = parse_date(s);
    if (!d) throw CLI::ValidationError(std::string(what), "expected YYYY-MM-DD, got '" + s + "'");
    return *d;
}

std::vector<const DgaFamily*> pick_families(const std::vector<std::string>& names) {
    std::vector<const DgaFamily*> out;
    if (names.empty()) {
        for (const auto& f : all_families())
            if (!f->known_campaigns().empty()) out.push_back(f.get());
        return out;
    }
    for (const auto& n : names) {
        const DgaFamily* f = find_family(n);
        if (!f) throw CLI::ValidationError("--families", "unknown family '" + n + "'");
        out.push_back(f);
    }
    return out;
}

// "k=v,k=v" against the family's schema; integer fields parse as decimal
SeedSet parse_seed(const DgaFamily& fam, const std::string& text) {
    SeedSet seed;
    auto schema = fam.seed_schema();
    for (const auto& part : split(text, ',')) {
        auto eq = part.find('=');
        if (eq == std::string::npos)
            throw CLI::ValidationError("--seed", "expected k=v pairs, got '" + part + "'");
        std::string key = part.substr(0, eq);
        std::string value = part.substr(eq + 1);
        auto spec = std::find_if(schema.begin(), schema.end(),
                                 [&](const SeedFieldSpec& s) { return s.name == key; });
        if (spec == schema.end())
            throw CLI::ValidationError("--seed", "family " + std::string(fam.name()) +
                                                     " has no field '" + key + "'");
        if (spec->is_string) {
            seed[key] = value;
        } else {
            try {
                seed[key] = std::uint64_t(std::stoull(value));
            } catch (const std::exception&) {
                throw CLI::ValidationError("--seed", "field '" + key + "' wants an integer");
            }
        }
    }
    return seed;
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

FamilyRegistry load_registry(const std::string& path) {
    return path.empty() ? default_registry() : FamilyRegistry::load_tsv(path);
}

ordered_json metrics_json(const EvalMetrics& m, const FamilyRegistry& reg) {
    ordered_json j;
    j["accuracy"] = m.accuracy;
    j["weighted_precision"] = m.weighted_precision;
    j["weighted_recall"] = m.weighted_recall;
    j["weighted_f1"] = m.weighted_f1;
    j["confusion"] = m.confusion;
    j["zero_division_classes"] = ordered_json::array();
    for (auto i : m.zero_division_classes) j["zero_division_classes"].push_back(reg.at(i).name);
    return j;
}

struct DataArgs {
    std::size_t per_family = 2000;
    std::size_t per_benign = 2000;
    std::string benign_file;
    std::string date_start = "2026-01-01";
    std::string date_end = "2026-01-28";
    std::uint64_t seed = 7;

    void attach(CLI::App* cmd) {
        cmd->add_option("--per-family", per_family, "Training domains per malware family");
        cmd->add_option("--per-benign", per_benign, "Benign training domains");
        cmd->add_option("--benign-file", benign_file, "Benign domains, one per line")
            ->required();
        cmd->add_option("--date-start", date_start, "First generation day (YYYY-MM-DD)");
        cmd->add_option("--date-end", date_end, "Last generation day (YYYY-MM-DD)");
        cmd->add_option("--data-seed", seed, "Sampling seed for campaign draws");
    }

    TrainingDataOptions build() const {
        TrainingDataOptions o;
        o.per_family = per_family;
        o.per_benign = per_benign;
        o.benign_file = benign_file;
        o.date_start = require_date(date_start, "--date-start");
        o.date_end = require_date(date_end, "--date-end");
        o.rng_seed = seed;
        return o;
    }
};

struct TrainArgs {
    std::size_t epochs = 12;
    double learning_rate = 0.15;
    double lr_decay = 0.85;
    std::size_t batch_size = 64;
    double class_weight_gamma = 0.3;
    double holdout = 0.3;
    std::uint64_t seed = 1;

    void attach(CLI::App* cmd) {
        cmd->add_option("--epochs", epochs, "Training epochs");
        cmd->add_option("--learning-rate", learning_rate, "Initial learning rate");
        cmd->add_option("--lr-decay", lr_decay, "Per-epoch learning rate factor");
        cmd->add_option("--batch-size", batch_size, "Mini-batch size");
        cmd->add_option("--class-weight-gamma", class_weight_gamma,
                        "Exponent of the inverse-frequency class weights");
        cmd->add_option("--holdout", holdout, "Held-out fraction for epoch selection");
        cmd->add_option("--train-seed", seed, "Shuffling seed");
    }

    TrainOptions build() const {
        TrainOptions o;
        o.epochs = epochs;
        o.learning_rate = learning_rate;
        o.lr_decay = lr_decay;
        o.batch_size = batch_size;
        o.class_weight_gamma = class_weight_gamma;
        o.holdout_fraction = holdout;
        o.rng_seed = seed;
        return o;
    }
};

int run(int argc, char** argv) {
    CLI::App app{"DGA family classification, suspicion scoring and seed recovery"};
    app.require_subcommand(1);
    app.set_config("--config", "", "INI file with [subcommand] sections");

    // build-db
    auto* db_cmd = app.add_subcommand("build-db", "Generate the known-domain database");
    db_cmd->configurable();
    std::string db_out, db_start = "2026-01-01", db_end = "2026-01-01";
    std::size_t db_depth = 256;
    std::vector<std::string> db_families;
    db_cmd->add_option("--out", db_out, "Database path (TSV plus .meta.json)")->required();
    db_cmd->add_option("--domains-per-seed", db_depth, "Domains generated per campaign seed");
    db_cmd->add_option("--range-start", db_start, "First day for date-dependent families");
    db_cmd->add_option("--range-end", db_end, "Last day for date-dependent families");
    db_cmd->add_option("--families", db_families, "Family subset (default: all catalogued)")
        ->delimiter(',');

    // train
    auto* train_cmd = app.add_subcommand("train", "Train the family classifier");
    train_cmd->configurable();
    std::string train_out, train_registry;
    DataArgs train_data;
    TrainArgs train_params;
    train_cmd->add_option("--out", train_out, "Model artifact path")->required();
    train_cmd->add_option("--registry", train_registry, "Label registry TSV (default: built-in)");
    train_data.attach(train_cmd);
    train_params.attach(train_cmd);

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "Evaluate a model or cross-validate a config");
    eval_cmd->configurable();
    std::string eval_model, eval_registry, eval_out;
    std::size_t eval_folds = 0;
    std::uint64_t eval_cv_seed = 17;
    DataArgs eval_data;
    TrainArgs eval_params;
    eval_cmd->add_option("--model", eval_model, "Trained model to evaluate on a fresh dataset");
    eval_cmd->add_option("--registry", eval_registry, "Label registry TSV (default: built-in)");
    eval_cmd->add_option("--folds", eval_folds, "Run stratified k-fold cross-validation instead");
    eval_cmd->add_option("--cv-seed", eval_cv_seed, "Fold assignment seed");
    eval_cmd->add_option("--out", eval_out, "Write the metrics JSON here instead of stdout");
    eval_data.attach(eval_cmd);
    eval_params.attach(eval_cmd);

    // analyze
    auto* an_cmd = app.add_subcommand("analyze", "Analyze a DNS log and emit one JSON per sample");
    an_cmd->configurable();
    std::string an_model, an_db, an_log, an_out, an_allow, an_stats_out;
    std::size_t an_allow_cap = 0;
    unsigned an_threads = 1;
    bool an_no_recon = false;
    ReconstructOptions an_recon;
    an_cmd->add_option("--model", an_model, "Trained model artifact")->required();
    an_cmd->add_option("--db", an_db, "Known-domain database")->required();
    an_cmd->add_option("--log", an_log, "DNS log (TSV: ts, md5, domain, type, response)")
        ->required();
    an_cmd->add_option("--out", an_out, "Output JSONL path ('-' for stdout)");
    an_cmd->add_option("--allowlist", an_allow, "Popular-domain allowlist, one per line");
    an_cmd->add_option("--allowlist-cap", an_allow_cap, "Keep only the first N allowlist entries");
    an_cmd->add_option("--threads", an_threads, "Samples analyzed in parallel");
    an_cmd->add_flag("--no-reconstruct", an_no_recon, "Skip seed recovery");
    an_cmd->add_option("--budget", an_recon.budget, "Candidate probes allowed per sweep");
    an_cmd->add_option("--max-domains", an_recon.max_domains, "Domains fed to seed recovery");
    an_cmd->add_option("--required-fraction", an_recon.required_fraction,
                       "Regeneration coverage needed to accept a seed");
    an_cmd->add_option("--stats-out", an_stats_out, "Write filter and grouping counters here");

    // reconstruct
    auto* rc_cmd = app.add_subcommand("reconstruct", "Recover a generator seed from domains");
    rc_cmd->configurable();
    std::string rc_family, rc_file, rc_date = "2026-01-01";
    unsigned rc_threads = 1;
    ReconstructOptions rc_opts;
    rc_cmd->add_option("--family", rc_family, "Family whose strategy to run")->required();
    rc_cmd->add_option("--domains-file", rc_file, "Domains, one per line ('-' for stdin)")
        ->required();
    rc_cmd->add_option("--date", rc_date, "Execution day (YYYY-MM-DD)");
    rc_cmd->add_option("--budget", rc_opts.budget, "Candidate probes allowed");
    rc_cmd->add_option("--max-domains", rc_opts.max_domains, "Domains considered");
    rc_cmd->add_option("--required-fraction", rc_opts.required_fraction,
                       "Regeneration coverage needed to accept a seed");
    rc_cmd->add_option("--threads", rc_threads, "Sweep shards for full sweeps");

    // zoo-gen
    auto* zg_cmd = app.add_subcommand("zoo-gen", "Generate domains from a built-in family");
    zg_cmd->configurable();
    std::string zg_family, zg_seed, zg_date = "2026-01-01";
    std::size_t zg_count = 20;
    bool zg_list = false;
    zg_cmd->add_option("--family", zg_family, "Family name");
    zg_cmd->add_option("--seed", zg_seed, "Seed as k=v,k=v (default: first catalogued)");
    zg_cmd->add_option("--count", zg_count, "Domains to generate");
    zg_cmd->add_option("--date", zg_date, "Generation day (YYYY-MM-DD)");
    zg_cmd->add_flag("--list", zg_list, "List families and their seed schemas");

    // experiment
    auto* ex_cmd = app.add_subcommand("experiment",
                                      "Score catalogued and fresh campaigns against each other");
    ex_cmd->configurable();
    std::string ex_model, ex_out, ex_date = "2026-02-02";
    ExperimentOptions ex_opts;
    std::vector<std::size_t> ex_extended = {300, 600};
    ex_cmd->add_option("--model", ex_model, "Trained model artifact")->required();
    ex_cmd->add_option("--out", ex_out, "Report JSON path ('-' for stdout)");
    ex_cmd->add_option("--rng-seed", ex_opts.rng_seed, "Fresh-seed sampling seed");
    ex_cmd->add_option("--fake-per-family", ex_opts.fake_per_family,
                       "Fresh campaigns sampled per family");
    ex_cmd->add_option("--domains-per-campaign", ex_opts.domains_per_campaign,
                       "Domains per synthesized sample");
    ex_cmd->add_option("--db-depth", ex_opts.db_domains_per_seed,
                       "Database domains per campaign seed");
    ex_cmd->add_option("--date", ex_date, "Synthesized execution day");
    ex_cmd->add_option("--extended", ex_extended, "Oversized real-batch sizes")->delimiter(',');
    ex_cmd->add_option("--threads", ex_opts.threads, "Samples analyzed in parallel");

    // stats
    auto* st_cmd = app.add_subcommand("stats", "Summarize a DNS log per day and per sample");
    st_cmd->configurable();
    std::string st_log, st_db, st_out;
    st_cmd->add_option("--log", st_log, "DNS log path")->required();
    st_cmd->add_option("--db", st_db, "Known-domain database for recognition counts");
    st_cmd->add_option("--out", st_out, "Output JSON path ('-' for stdout)");

    CLI11_PARSE(app, argc, argv);

    if (db_cmd->parsed()) {
        DbBuildOptions opts;
        opts.domains_per_seed = db_depth;
        opts.range_start = require_date(db_start, "--range-start");
        opts.range_end = require_date(db_end, "--range-end");
        auto index = build_index(pick_families(db_families), opts);
        index.save(db_out);
        std::cerr << "wrote " << index.domain_count() << " domains, " << index.entry_count()
                  << " entries to " << db_out << "\n";
        return 0;
    }

    if (train_cmd->parsed()) {
        auto registry = load_registry(train_registry);
        auto ts = build_training_set(registry, train_data.build());
        auto model = Classifier::train(ts, registry, train_params.build());
        model.save(train_out);
        std::cerr << "trained on " << ts.examples.size() << " examples, best holdout F1 "
                  << model.best_holdout_f1() << ", saved to " << train_out << "\n";
        return 0;
    }

    if (eval_cmd->parsed()) {
        auto registry = load_registry(eval_registry);
        auto ts = build_training_set(registry, eval_data.build());
        ordered_json out;
        if (eval_folds >= 2) {
            auto cv = k_fold_cv(ts, registry, eval_params.build(), eval_folds, eval_cv_seed);
            out["folds"] = ordered_json::array();
            for (const auto& f : cv.folds) out["folds"].push_back(metrics_json(f, registry));
            out["mean_accuracy"] = cv.mean_accuracy;
            out["mean_weighted_precision"] = cv.mean_weighted_precision;
            out["mean_weighted_recall"] = cv.mean_weighted_recall;
            out["mean_weighted_f1"] = cv.mean_weighted_f1;
            out["total_confusion"] = cv.total_confusion;
            out["pinned_classes"] = ordered_json::array();
            for (auto i : cv.pinned_classes) out["pinned_classes"].push_back(registry.at(i).name);
        } else {
            if (eval_model.empty())
                throw CLI::ValidationError("eval", "need --model or --folds");
            auto model = Classifier::load(eval_model);
            out = metrics_json(evaluate(model, ts), model.registry());
        }
        write_text(eval_out.empty() ? "-" : eval_out, out.dump(2) + "\n");
        return 0;
    }

    if (an_cmd->parsed()) {
        auto model = Classifier::load(an_model);
        auto db = KnownDomainIndex::load(an_db);
        Allowlist allow;
        if (!an_allow.empty()) allow = Allowlist::load(an_allow, an_allow_cap);

        auto parsed = parse_log_file(an_log);
        for (const auto& e : parsed.errors)
            std::cerr << "line " << e.line << ": " << e.reason << "\n";
        FilterStats fstats;
        GroupStats gstats;
        auto filtered = filter_records(parsed.records, &fstats);
        auto batches = group_samples(filtered, &gstats);

        AnalysisContext ctx{&model, &db, an_allow.empty() ? nullptr : &allow};
        AnalyzeOptions opts;
        opts.reconstruct = !an_no_recon;
        opts.reconstruct_opts = an_recon;
        opts.threads = an_threads;
        auto reports = analyze_samples(batches, ctx, opts);

        std::string lines;
        for (const auto& r : reports) lines += r.dump() + "\n";
        write_text(an_out.empty() ? "-" : an_out, lines);

        ordered_json stats;
        stats["records"] = parsed.records.size();
        stats["malformed_lines"] = parsed.errors.size();
        stats["filter"] = to_json(fstats);
        stats["grouping"] = to_json(gstats);
        stats["samples_analyzed"] = reports.size();
        if (an_stats_out.empty())
            std::cerr << stats.dump(2) << "\n";
        else
            write_text(an_stats_out, stats.dump(2) + "\n");
        return 0;
    }

    if (rc_cmd->parsed()) {
        std::vector<DomainName> domains;
        std::istream* in = &std::cin;
        std::ifstream file;
        if (rc_file != "-") {
            file.open(rc_file);
            if (!file) throw std::runtime_error("cannot read " + rc_file);
            in = &file;
        }
        std::string line;
        while (std::getline(*in, line)) {
            if (line.empty() || line[0] == '#') continue;
            auto r = normalize(line);
            if (std::holds_alternative<DomainName>(r))
                domains.push_back(strip_subdomains(std::get<DomainName>(r)));
        }
        rc_opts.threads = rc_threads;
        auto res = reconstruct_seed(rc_family, domains, require_date(rc_date, "--date"), rc_opts);
        ordered_json j;
        j["status"] = std::string(to_string(res.status));
        j["family"] = res.family;
        j["strategy"] = res.strategy;
        if (res.seed) {
            j["seed"] = ordered_json::object();
            for (const auto& [k, v] : *res.seed) {
                if (std::holds_alternative<std::uint64_t>(v))
                    j["seed"][k] = std::get<std::uint64_t>(v);
                else
                    j["seed"][k] = std::get<std::string>(v);
            }
        } else {
            j["seed"] = nullptr;
        }
        j["seed_date"] = res.seed_date ? ordered_json(to_string(*res.seed_date))
                                       : ordered_json(nullptr);
        j["coverage"] = res.coverage;
        j["evaluations"] = res.evaluations;
        j["note"] = res.note;
        std::cout << j.dump(2) << "\n";
        return res.status == ReconstructStatus::kSuccess ? 0 : 2;
    }

    if (zg_cmd->parsed()) {
        if (zg_list) {
            for (const auto& f : all_families()) {
                std::cout << f->name() << (f->deterministic() ? "" : " (non-deterministic)")
                          << (f->date_dependent() ? " (date-dependent)" : "") << "\n";
                for (const auto& s : f->seed_schema()) {
                    std::cout << "  " << s.name << ": " << (s.is_string ? "string" : "integer");
                    if (!s.note.empty()) std::cout << " (" << s.note << ")";
                    std::cout << "\n";
                }
            }
            return 0;
        }
        if (zg_family.empty()) throw CLI::ValidationError("zoo-gen", "need --family or --list");
        const DgaFamily* fam = find_family(zg_family);
        if (!fam) throw CLI::ValidationError("--family", "unknown family '" + zg_family + "'");
        SeedSet seed;
        if (!zg_seed.empty()) {
            seed = parse_seed(*fam, zg_seed);
        } else if (!fam->known_campaigns().empty()) {
            seed = fam->known_campaigns().front();
        } else {
            throw CLI::ValidationError("--seed", "family has no catalogued seeds, pass --seed");
        }
        for (const auto& d : fam->generate(seed, require_date(zg_date, "--date"), zg_count))
            std::cout << d << "\n";
        return 0;
    }

    if (ex_cmd->parsed()) {
        ex_opts.execution_date = require_date(ex_date, "--date");
        ex_opts.extended_counts = ex_extended;
        auto model = Classifier::load(ex_model);
        auto report = run_identification_experiment(model, ex_opts);
        write_text(ex_out.empty() ? "-" : ex_out, report.to_json().dump(2) + "\n");
        std::cerr << "fake above threshold: " << report.n_fake_above << "/" << report.n_fake
                  << ", real at or below: " << report.n_real_at_or_below << "/" << report.n_real
                  << "\n";
        return 0;
    }

    if (st_cmd->parsed()) {
        auto parsed = parse_log_file(st_log);
        std::optional<KnownDomainIndex> db;
        if (!st_db.empty()) db = KnownDomainIndex::load(st_db);
        auto j = compute_log_stats(parsed.records, db ? &*db : nullptr);
        write_text(st_out.empty() ? "-" : st_out, j.dump(2) + "\n");
        return 0;
    }

    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "dgakit: " << e.what() << "\n";
        return 1;
    }
}
