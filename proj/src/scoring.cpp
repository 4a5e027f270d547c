#include "dgakit/scoring.hpp"

#include <algorithm>
#include <stdexcept>

namespace dgakit {

SuspicionIndicators compute_indicators(const IndicatorInputs& in) {
    if (in.n_predictions == 0)
        throw std::invalid_argument("compute_indicators: no predictions");
    const double n = static_cast<double>(in.n_predictions);

    SuspicionIndicators ind;
    ind.a = normalize_ratio(static_cast<double>(in.n_benign) / n);
    ind.b = normalize_ratio(static_cast<double>(in.n_unique_families) / n);
    if (in.n_regex_changed)
        ind.c = normalize_ratio(static_cast<double>(*in.n_regex_changed) / n);
    ind.d = normalize_inverse(std::clamp(in.mean_max_probability, 0.0, 1.0));
    ind.alpha = in.alpha;
    ind.beta = in.majority_deterministic ? 1 : 2;
    return ind;
}

double compute_score(const SuspicionIndicators& ind) {
    double sum = ind.a + ind.b + ind.d;
    double terms = 3.0;
    if (ind.c) {
        sum += *ind.c;
        terms += 1.0;
    }
    const double mean = sum / terms;
    const double gamma =
        ind.alpha <= kAlphaCutoff ? (1.0 - ind.alpha) / static_cast<double>(ind.beta) : 0.0;
    const double score = (mean + 10.0) * gamma / 1.1;
    return std::clamp(score, 0.0, 100.0);
}

SuspicionCategory categorize(double score) {
    if (score <= 0.0) return SuspicionCategory::kUnsuspicious;
    if (score <= 5.0) return SuspicionCategory::kSlightlySuspicious;
    if (score <= 25.0) return SuspicionCategory::kSuspicious;
    return SuspicionCategory::kHighlySuspicious;
}

std::string_view to_string(SuspicionCategory c) {
    switch (c) {
        case SuspicionCategory::kUnsuspicious: return "unsuspicious";
        case SuspicionCategory::kSlightlySuspicious: return "slightly_suspicious";
        case SuspicionCategory::kSuspicious: return "suspicious";
        case SuspicionCategory::kHighlySuspicious: return "highly_suspicious";
    }
    return "?";
}

}  // namespace dgakit
