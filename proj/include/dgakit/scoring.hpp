#pragma once

// Suspicion scoring: turns a batch's prediction summary into a 0..100 score
// measuring how likely the sample runs a generation scheme we cannot yet
// reproduce. A fully recognized batch scores exactly 0.

#include <cmath>
#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "dgakit/registry.hpp"

namespace dgakit {

// Recognized fraction above which the score collapses to zero.
inline constexpr double kAlphaCutoff = 0.96;

struct IndicatorInputs {
    std::size_t n_predictions = 0;
    std::size_t n_benign = 0;           // domains predicted benign
    std::size_t n_unique_families = 0;  // distinct labels among predictions
    std::optional<std::size_t> n_regex_changed;  // only when the matcher ran
    double mean_max_probability = 0.0;  // average top probability
    double alpha = 0.0;                 // fraction of domains found in the database
    bool majority_deterministic = true;
};

// Indicators normalized to 0..100; missing c means the matcher did not run.
struct SuspicionIndicators {
    double a = 0.0;
    double b = 0.0;
    std::optional<double> c;
    double d = 0.0;
    double alpha = 0.0;
    int beta = 1;
};

// Square-root normalization spreads out the low end, where most of the
// interesting ratios live.
inline double normalize_ratio(double x) { return 100.0 * std::sqrt(x); }
inline double normalize_inverse(double x) { return 100.0 * std::sqrt(1.0 - x); }

// Throws std::invalid_argument when n_predictions is zero.
SuspicionIndicators compute_indicators(const IndicatorInputs& in);

// (mean of indicators + 10) * gamma / 1.1 with gamma = (1 - alpha) / beta
// when alpha <= kAlphaCutoff and 0 otherwise, clamped to [0, 100].
double compute_score(const SuspicionIndicators& ind);

enum class SuspicionCategory {
    kUnsuspicious,        // exactly 0
    kSlightlySuspicious,  // (0, 5]
    kSuspicious,          // (5, 25]
    kHighlySuspicious,    // above 25
};

SuspicionCategory categorize(double score);
std::string_view to_string(SuspicionCategory c);

}  // namespace dgakit
