#pragma once

// Linear softmax classifier over character n-gram counts. Training is
// single threaded and fully seeded so that the same inputs produce a byte
// identical model artifact on any platform.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "dgakit/domain.hpp"
#include "dgakit/registry.hpp"
#include "dgakit/util.hpp"

namespace dgakit {

// Feature layout: unigram counts, bigram counts, trigram counts over the
// 38-code alphabet, one scaled length slot, then a one-hot for each TLD in
// the training vocabulary.
inline constexpr std::uint32_t kUnigramBase = 0;
inline constexpr std::uint32_t kBigramBase = 38;
inline constexpr std::uint32_t kTrigramBase = kBigramBase + 38 * 38;
inline constexpr std::uint32_t kLengthFeature = kTrigramBase + 38 * 38 * 38;
inline constexpr std::uint32_t kTldBase = kLengthFeature + 1;

using SparseFeatures = std::vector<std::pair<std::uint32_t, double>>;

// tld_vocab must be sorted; unknown TLDs simply emit no one-hot.
SparseFeatures extract_features(const EncodedDomain& e,
                                const std::vector<std::string>& tld_vocab);

// Eq-style inverse frequency weights: (total / count_i) ^ gamma, and 0 for
// classes with no examples.
std::vector<double> compute_class_weights(const std::vector<std::size_t>& class_counts,
                                          double gamma = 0.3);

struct TrainingSet {
    std::vector<EncodedDomain> examples;
    std::vector<std::size_t> labels;     // registry indices
    std::vector<std::string> tld_vocab;  // sorted unique TLDs seen in examples
};

struct TrainingDataOptions {
    std::size_t per_family = 2000;
    std::size_t per_benign = 2000;
    CivilDate date_start{2026, 1, 1};  // dates sampled by date-dependent families
    CivilDate date_end{2026, 1, 28};
    std::uint64_t rng_seed = 7;
    std::string benign_file;
};

// Generates per_family examples for every non-benign registry label from
// its zoo family (half known campaigns, half freshly sampled seeds) and
// reads benign examples from the configured file.
TrainingSet build_training_set(const FamilyRegistry& registry,
                               const TrainingDataOptions& opts);

struct TrainOptions {
    std::size_t epochs = 12;
    double learning_rate = 0.15;
    double lr_decay = 0.85;
    std::size_t batch_size = 64;
    double class_weight_gamma = 0.3;
    double holdout_fraction = 0.3;  // split used to pick the best epoch
    std::uint64_t rng_seed = 1;
};

struct DivergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EvalMetrics {
    std::vector<std::vector<std::size_t>> confusion;  // [actual][predicted]
    double accuracy = 0.0;
    double weighted_precision = 0.0;
    double weighted_recall = 0.0;
    double weighted_f1 = 0.0;
    // classes whose precision or recall denominator was zero; they
    // contribute zero to the weighted sums
    std::vector<std::size_t> zero_division_classes;
};

EvalMetrics compute_metrics(const std::vector<std::vector<std::size_t>>& confusion);

class Classifier {
public:
    // Throws DivergenceError when the loss stops being finite.
    static Classifier train(const TrainingSet& ts, const FamilyRegistry& registry,
                            const TrainOptions& opts);

    ProbabilityVector predict_proba(const EncodedDomain& e) const;
    std::size_t predict(const EncodedDomain& e) const { return argmax(predict_proba(e)); }

    const FamilyRegistry& registry() const { return registry_; }
    const std::vector<std::string>& tld_vocab() const { return tld_vocab_; }
    std::size_t num_classes() const { return num_classes_; }
    std::size_t feature_dim() const { return feature_dim_; }
    double best_holdout_f1() const { return best_holdout_f1_; }

    void save(const std::string& path) const;
    static Classifier load(const std::string& path);

private:
    FamilyRegistry registry_ = FamilyRegistry::make(
        {FamilyLabel{"benign", true, 5.0, FamilyRegex::make_catch_all()}});
    std::vector<std::string> tld_vocab_;
    std::size_t num_classes_ = 0;
    std::size_t feature_dim_ = 0;
    std::vector<double> weights_;  // row-major [class][feature]
    std::vector<double> bias_;
    double best_holdout_f1_ = 0.0;
};

// Confusion matrix for a labeled set under an existing model.
EvalMetrics evaluate(const Classifier& model, const TrainingSet& ts);

struct CvResult {
    std::vector<EvalMetrics> folds;
    double mean_accuracy = 0.0;
    double mean_weighted_precision = 0.0;
    double mean_weighted_recall = 0.0;
    double mean_weighted_f1 = 0.0;
    std::vector<std::vector<std::size_t>> total_confusion;
    // classes with fewer members than folds, kept in every training split
    std::vector<std::size_t> pinned_classes;
};

CvResult k_fold_cv(const TrainingSet& ts, const FamilyRegistry& registry,
                   const TrainOptions& opts, std::size_t k, std::uint64_t seed);

}  // namespace dgakit
