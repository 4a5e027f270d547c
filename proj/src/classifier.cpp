#include "dgakit/classifier.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <unordered_map>

#include "dgakit/zoo.hpp"

namespace dgakit {

namespace {

constexpr char kMagic[4] = {'S', 'E', 'S', 'M'};
constexpr std::uint32_t kVersion = 1;

void softmax_inplace(std::vector<double>& z) {
    double m = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double& v : z) {
        v = std::exp(v - m);
        sum += v;
    }
    for (double& v : z) v /= sum;
}

struct Writer {
    std::ofstream out;
    explicit Writer(const std::string& path) : out(path, std::ios::binary) {}

    void bytes(const void* p, std::size_t n) {
        out.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
    }
    void u8(std::uint8_t v) { bytes(&v, 1); }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
    void str(std::string_view s) {
        u32(static_cast<std::uint32_t>(s.size()));
        bytes(s.data(), s.size());
    }
};

struct Reader {
    std::ifstream in;
    explicit Reader(const std::string& path) : in(path, std::ios::binary) {}

    void bytes(void* p, std::size_t n) {
        in.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
        if (in.gcount() != static_cast<std::streamsize>(n))
            throw std::runtime_error("model: truncated file");
    }
    std::uint8_t u8() {
        std::uint8_t v;
        bytes(&v, 1);
        return v;
    }
    std::uint32_t u32() {
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(u8()) << (8 * i);
        return v;
    }
    std::uint64_t u64() {
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(u8()) << (8 * i);
        return v;
    }
    double f64() { return std::bit_cast<double>(u64()); }
    std::string str(std::uint32_t max_len = 1 << 20) {
        std::uint32_t n = u32();
        if (n > max_len) throw std::runtime_error("model: oversized string");
        std::string s(n, '\0');
        bytes(s.data(), n);
        return s;
    }
};

}  // namespace

SparseFeatures extract_features(const EncodedDomain& e,
                                const std::vector<std::string>& tld_vocab) {
    std::map<std::uint32_t, double> acc;
    const auto& c = e.codes;
    const std::size_t n = e.length;

    for (std::size_t i = 0; i < n; ++i) acc[kUnigramBase + (c[i] - 1)] += 1.0;
    for (std::size_t i = 0; i + 1 < n; ++i)
        acc[kBigramBase + (c[i] - 1) * 38u + (c[i + 1] - 1)] += 1.0;
    for (std::size_t i = 0; i + 2 < n; ++i)
        acc[kTrigramBase + ((c[i] - 1) * 38u + (c[i + 1] - 1)) * 38u + (c[i + 2] - 1)] += 1.0;

    acc[kLengthFeature] = static_cast<double>(n) / static_cast<double>(kEncodedLength);

    std::size_t last_dot = n;
    for (std::size_t i = 0; i < n; ++i)
        if (c[i] == char_code('.')) last_dot = i;
    if (last_dot + 1 < n) {
        std::string tld;
        for (std::size_t i = last_dot + 1; i < n; ++i) tld.push_back(kCharTable[c[i] - 1]);
        auto it = std::lower_bound(tld_vocab.begin(), tld_vocab.end(), tld);
        if (it != tld_vocab.end() && *it == tld)
            acc[kTldBase + static_cast<std::uint32_t>(it - tld_vocab.begin())] = 1.0;
    }
    return SparseFeatures(acc.begin(), acc.end());
}

std::vector<double> compute_class_weights(const std::vector<std::size_t>& class_counts,
                                          double gamma) {
    const double total = static_cast<double>(
        std::accumulate(class_counts.begin(), class_counts.end(), std::size_t{0}));
    std::vector<double> weights(class_counts.size(), 0.0);
    for (std::size_t i = 0; i < class_counts.size(); ++i)
        if (class_counts[i])
            weights[i] = std::pow(total / static_cast<double>(class_counts[i]), gamma);
    return weights;
}

EvalMetrics compute_metrics(const std::vector<std::vector<std::size_t>>& confusion) {
    const std::size_t k = confusion.size();
    for (const auto& row : confusion)
        if (row.size() != k) throw std::invalid_argument("metrics: confusion must be square");

    EvalMetrics m;
    m.confusion = confusion;
    std::size_t total = 0, correct = 0;
    std::vector<std::size_t> actual(k, 0), predicted(k, 0);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            total += confusion[i][j];
            actual[i] += confusion[i][j];
            predicted[j] += confusion[i][j];
        }
        correct += confusion[i][i];
    }
    if (total == 0) return m;
    m.accuracy = static_cast<double>(correct) / static_cast<double>(total);

    for (std::size_t i = 0; i < k; ++i) {
        const double tp = static_cast<double>(confusion[i][i]);
        const double weight = static_cast<double>(actual[i]) / static_cast<double>(total);
        if (actual[i] == 0 || predicted[i] == 0) m.zero_division_classes.push_back(i);
        const double prec = predicted[i] ? tp / static_cast<double>(predicted[i]) : 0.0;
        const double rec = actual[i] ? tp / static_cast<double>(actual[i]) : 0.0;
        const double f1 = prec + rec > 0.0 ? 2.0 * prec * rec / (prec + rec) : 0.0;
        m.weighted_precision += weight * prec;
        m.weighted_recall += weight * rec;
        m.weighted_f1 += weight * f1;
    }
    return m;
}

TrainingSet build_training_set(const FamilyRegistry& registry,
                               const TrainingDataOptions& opts) {
    const std::int64_t n_days =
        days_from_civil(opts.date_end) - days_from_civil(opts.date_start) + 1;
    if (n_days < 1) throw std::invalid_argument("training: date range ends before it starts");

    TrainingSet ts;
    std::set<std::string> tlds;
    auto add_example = [&](const std::string& domain, std::size_t label) {
        auto norm = normalize(domain);
        if (!std::holds_alternative<DomainName>(norm)) return;
        auto d = strip_subdomains(std::get<DomainName>(norm));
        ts.examples.push_back(encode(d));
        ts.labels.push_back(label);
        tlds.insert(d.tld);
    };

    for (std::size_t li = 0; li < registry.size(); ++li) {
        if (li == registry.benign_index()) continue;
        const auto& label = registry.at(li);
        const auto* fam = find_family(label.name);
        if (!fam) throw std::runtime_error("training: no generator for label " + label.name);

        Rng rng(opts.rng_seed ^ fnv1a64(fam->name()));
        auto campaigns = fam->known_campaigns();
        const std::size_t n_sampled = campaigns.empty() ? 20 : campaigns.size();
        for (std::size_t i = 0; i < n_sampled; ++i) campaigns.push_back(fam->sample_seed(rng));

        std::set<std::string> seen;
        std::vector<SeedSet> unique_campaigns;
        for (auto& c : campaigns)
            if (seen.insert(seed_to_string(fam->canonicalize(c))).second)
                unique_campaigns.push_back(std::move(c));

        const std::size_t nc = unique_campaigns.size();
        for (std::size_t ci = 0; ci < nc; ++ci) {
            std::size_t quota = opts.per_family / nc + (ci < opts.per_family % nc ? 1 : 0);
            if (!quota) continue;
            if (fam->date_dependent()) {
                const std::size_t nd =
                    std::min<std::size_t>(static_cast<std::size_t>(n_days), quota);
                for (std::size_t di = 0; di < nd; ++di) {
                    std::size_t day_quota = quota / nd + (di < quota % nd ? 1 : 0);
                    auto date = add_days(opts.date_start, static_cast<int>(di));
                    for (const auto& d : fam->generate(unique_campaigns[ci], date, day_quota))
                        add_example(d, li);
                }
            } else {
                for (const auto& d : fam->generate(unique_campaigns[ci], opts.date_start, quota))
                    add_example(d, li);
            }
        }
    }

    if (opts.per_benign) {
        if (opts.benign_file.empty())
            throw std::invalid_argument("training: benign example file not configured");
        std::ifstream in(opts.benign_file);
        if (!in) throw std::runtime_error("training: cannot open " + opts.benign_file);
        std::set<std::string> seen;
        std::string line;
        while (seen.size() < opts.per_benign && std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty() || line[0] == '#') continue;
            auto norm = normalize(line);
            if (!std::holds_alternative<DomainName>(norm)) continue;
            auto d = strip_subdomains(std::get<DomainName>(norm));
            if (!seen.insert(d.normalized).second) continue;
            ts.examples.push_back(encode(d));
            ts.labels.push_back(registry.benign_index());
            tlds.insert(d.tld);
        }
    }

    ts.tld_vocab.assign(tlds.begin(), tlds.end());
    return ts;
}

Classifier Classifier::train(const TrainingSet& ts, const FamilyRegistry& registry,
                             const TrainOptions& opts) {
    const std::size_t n = ts.examples.size();
    if (n == 0 || ts.labels.size() != n)
        throw std::invalid_argument("train: empty or inconsistent training set");
    const std::size_t k = registry.size();
    for (auto label : ts.labels)
        if (label >= k) throw std::invalid_argument("train: label outside registry");
    if (opts.batch_size == 0) throw std::invalid_argument("train: batch size must be positive");

    Classifier model;
    model.registry_ = registry;
    model.tld_vocab_ = ts.tld_vocab;
    std::sort(model.tld_vocab_.begin(), model.tld_vocab_.end());
    model.tld_vocab_.erase(std::unique(model.tld_vocab_.begin(), model.tld_vocab_.end()),
                           model.tld_vocab_.end());
    model.num_classes_ = k;
    const std::size_t dim = kTldBase + model.tld_vocab_.size();
    model.feature_dim_ = dim;

    std::vector<SparseFeatures> feats;
    feats.reserve(n);
    for (const auto& e : ts.examples) feats.push_back(extract_features(e, model.tld_vocab_));

    Rng rng(opts.rng_seed);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);
    const std::size_t n_hold = static_cast<std::size_t>(
        static_cast<double>(n) * std::clamp(opts.holdout_fraction, 0.0, 0.9));
    std::vector<std::size_t> hold(order.begin(), order.begin() + n_hold);
    std::vector<std::size_t> train_idx(order.begin() + n_hold, order.end());
    if (train_idx.empty()) throw std::invalid_argument("train: nothing left after holdout");

    std::vector<std::size_t> counts(k, 0);
    for (auto i : train_idx) counts[ts.labels[i]]++;
    const auto class_weights = compute_class_weights(counts, opts.class_weight_gamma);

    std::vector<double> weights(k * dim, 0.0), bias(k, 0.0);
    std::vector<double> best_weights = weights, best_bias = bias;
    double best_f1 = -1.0;

    auto predict_label = [&](std::size_t idx) {
        std::vector<double> z(bias);
        for (const auto& [j, v] : feats[idx])
            for (std::size_t c = 0; c < k; ++c) z[c] += v * weights[c * dim + j];
        return static_cast<std::size_t>(
            std::max_element(z.begin(), z.end()) - z.begin());
    };

    double lr = opts.learning_rate;
    std::vector<double> z(k), g(k);
    std::unordered_map<std::uint32_t, std::uint32_t> slot;
    std::vector<double> grad_arena;

    for (std::size_t epoch = 0; epoch < opts.epochs; ++epoch) {
        rng.shuffle(train_idx);
        double epoch_loss = 0.0;

        for (std::size_t start = 0; start < train_idx.size(); start += opts.batch_size) {
            const std::size_t stop = std::min(start + opts.batch_size, train_idx.size());
            slot.clear();
            grad_arena.clear();
            std::vector<double> bias_grad(k, 0.0);

            for (std::size_t bi = start; bi < stop; ++bi) {
                const std::size_t idx = train_idx[bi];
                const std::size_t y = ts.labels[idx];

                for (std::size_t c = 0; c < k; ++c) z[c] = bias[c];
                for (const auto& [j, v] : feats[idx])
                    for (std::size_t c = 0; c < k; ++c) z[c] += v * weights[c * dim + j];
                softmax_inplace(z);

                epoch_loss -= class_weights[y] * std::log(std::max(z[y], 1e-300));
                for (std::size_t c = 0; c < k; ++c)
                    g[c] = class_weights[y] * (z[c] - (c == y ? 1.0 : 0.0));

                for (std::size_t c = 0; c < k; ++c) bias_grad[c] += g[c];
                for (const auto& [j, v] : feats[idx]) {
                    auto it = slot.find(j);
                    std::uint32_t s;
                    if (it == slot.end()) {
                        s = static_cast<std::uint32_t>(slot.size());
                        slot.emplace(j, s);
                        grad_arena.resize(static_cast<std::size_t>(s + 1) * k, 0.0);
                    } else {
                        s = it->second;
                    }
                    double* acc = grad_arena.data() + static_cast<std::size_t>(s) * k;
                    for (std::size_t c = 0; c < k; ++c) acc[c] += g[c] * v;
                }
            }

            const double scale = lr / static_cast<double>(stop - start);
            for (const auto& [j, s] : slot) {
                const double* acc = grad_arena.data() + static_cast<std::size_t>(s) * k;
                for (std::size_t c = 0; c < k; ++c) weights[c * dim + j] -= scale * acc[c];
            }
            for (std::size_t c = 0; c < k; ++c) bias[c] -= scale * bias_grad[c];
        }

        if (!std::isfinite(epoch_loss))
            throw DivergenceError("train: loss diverged at epoch " + std::to_string(epoch));

        if (n_hold) {
            std::vector<std::vector<std::size_t>> conf(k, std::vector<std::size_t>(k, 0));
            for (auto i : hold) conf[ts.labels[i]][predict_label(i)]++;
            const double f1 = compute_metrics(conf).weighted_f1;
            if (f1 > best_f1) {
                best_f1 = f1;
                best_weights = weights;
                best_bias = bias;
            }
        } else {
            best_weights = weights;
            best_bias = bias;
        }
        lr *= opts.lr_decay;
    }

    model.weights_ = std::move(best_weights);
    model.bias_ = std::move(best_bias);
    model.best_holdout_f1_ = std::max(best_f1, 0.0);
    return model;
}

ProbabilityVector Classifier::predict_proba(const EncodedDomain& e) const {
    std::vector<double> z(bias_);
    for (const auto& [j, v] : extract_features(e, tld_vocab_))
        for (std::size_t c = 0; c < num_classes_; ++c) z[c] += v * weights_[c * feature_dim_ + j];
    softmax_inplace(z);
    return z;
}

void Classifier::save(const std::string& path) const {
    Writer w(path);
    if (!w.out) throw std::runtime_error("model: cannot write " + path);
    w.bytes(kMagic, 4);
    w.u32(kVersion);
    w.str(kCharTable);

    w.u32(static_cast<std::uint32_t>(registry_.size()));
    for (const auto& label : registry_.labels()) {
        w.str(label.name);
        w.u8(label.deterministic ? 1 : 0);
        w.f64(label.threshold);
        w.str(label.regex.render());
    }

    w.u32(static_cast<std::uint32_t>(tld_vocab_.size()));
    for (const auto& tld : tld_vocab_) w.str(tld);

    w.u64(num_classes_);
    w.u64(feature_dim_);
    for (double b : bias_) w.f64(b);
    for (double v : weights_) w.f64(v);
    w.f64(best_holdout_f1_);
    if (!w.out) throw std::runtime_error("model: write failed for " + path);
}

Classifier Classifier::load(const std::string& path) {
    Reader r(path);
    if (!r.in) throw std::runtime_error("model: cannot open " + path);

    char magic[4];
    r.bytes(magic, 4);
    if (std::memcmp(magic, kMagic, 4) != 0) throw std::runtime_error("model: bad magic");
    if (r.u32() != kVersion) throw std::runtime_error("model: unsupported version");
    if (r.str() != kCharTable) throw std::runtime_error("model: alphabet mismatch");

    const std::uint32_t n_labels = r.u32();
    if (n_labels == 0 || n_labels > 4096) throw std::runtime_error("model: bad label count");
    std::vector<FamilyLabel> labels;
    for (std::uint32_t i = 0; i < n_labels; ++i) {
        FamilyLabel l;
        l.name = r.str();
        l.deterministic = r.u8() != 0;
        l.threshold = r.f64();
        auto rx = FamilyRegex::parse(r.str());
        if (!rx) throw std::runtime_error("model: bad pattern for label " + l.name);
        l.regex = std::move(*rx);
        labels.push_back(std::move(l));
    }

    Classifier model;
    model.registry_ = FamilyRegistry::make(std::move(labels));

    const std::uint32_t n_vocab = r.u32();
    if (n_vocab > 1 << 20) throw std::runtime_error("model: bad vocab count");
    model.tld_vocab_.reserve(n_vocab);
    for (std::uint32_t i = 0; i < n_vocab; ++i) model.tld_vocab_.push_back(r.str());
    if (!std::is_sorted(model.tld_vocab_.begin(), model.tld_vocab_.end()))
        throw std::runtime_error("model: vocab not sorted");

    model.num_classes_ = r.u64();
    model.feature_dim_ = r.u64();
    if (model.num_classes_ != n_labels) throw std::runtime_error("model: class count mismatch");
    if (model.feature_dim_ != kTldBase + model.tld_vocab_.size())
        throw std::runtime_error("model: feature dimension mismatch");

    model.bias_.resize(model.num_classes_);
    for (auto& b : model.bias_) b = r.f64();
    model.weights_.resize(model.num_classes_ * model.feature_dim_);
    for (auto& v : model.weights_) v = r.f64();
    model.best_holdout_f1_ = r.f64();
    return model;
}

EvalMetrics evaluate(const Classifier& model, const TrainingSet& ts) {
    const std::size_t k = model.num_classes();
    std::vector<std::vector<std::size_t>> conf(k, std::vector<std::size_t>(k, 0));
    for (std::size_t i = 0; i < ts.examples.size(); ++i) {
        if (ts.labels[i] >= k) throw std::invalid_argument("evaluate: label outside registry");
        conf[ts.labels[i]][model.predict(ts.examples[i])]++;
    }
    return compute_metrics(conf);
}

CvResult k_fold_cv(const TrainingSet& ts, const FamilyRegistry& registry,
                   const TrainOptions& opts, std::size_t k_folds, std::uint64_t seed) {
    if (k_folds < 2) throw std::invalid_argument("cv: need at least two folds");
    const std::size_t n = ts.examples.size();
    const std::size_t k = registry.size();

    std::vector<std::vector<std::size_t>> by_class(k);
    for (std::size_t i = 0; i < n; ++i) by_class.at(ts.labels[i]).push_back(i);

    constexpr std::size_t kTrainOnly = static_cast<std::size_t>(-1);
    std::vector<std::size_t> fold_of(n, kTrainOnly);
    CvResult result;
    Rng rng(seed);
    for (std::size_t c = 0; c < k; ++c) {
        if (by_class[c].empty()) continue;
        if (by_class[c].size() < k_folds) {
            result.pinned_classes.push_back(c);
            continue;
        }
        rng.shuffle(by_class[c]);
        for (std::size_t i = 0; i < by_class[c].size(); ++i)
            fold_of[by_class[c][i]] = i % k_folds;
    }

    result.total_confusion.assign(k, std::vector<std::size_t>(k, 0));
    for (std::size_t f = 0; f < k_folds; ++f) {
        TrainingSet train_set, test_set;
        train_set.tld_vocab = test_set.tld_vocab = ts.tld_vocab;
        for (std::size_t i = 0; i < n; ++i) {
            auto& dst = fold_of[i] == f ? test_set : train_set;
            dst.examples.push_back(ts.examples[i]);
            dst.labels.push_back(ts.labels[i]);
        }
        auto model = Classifier::train(train_set, registry, opts);
        auto metrics = evaluate(model, test_set);

        result.mean_accuracy += metrics.accuracy;
        result.mean_weighted_precision += metrics.weighted_precision;
        result.mean_weighted_recall += metrics.weighted_recall;
        result.mean_weighted_f1 += metrics.weighted_f1;
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j)
                result.total_confusion[i][j] += metrics.confusion[i][j];
        result.folds.push_back(std::move(metrics));
    }
    const double nf = static_cast<double>(k_folds);
    result.mean_accuracy /= nf;
    result.mean_weighted_precision /= nf;
    result.mean_weighted_recall /= nf;
    result.mean_weighted_f1 /= nf;
    return result;
}

}  // namespace dgakit
