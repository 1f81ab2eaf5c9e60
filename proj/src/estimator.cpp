#include "etc/estimator.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

#include "etc/errors.hpp"

namespace etc {

std::string direction_str(Direction d) {
    return d == Direction::Below ? "below" : "at-or-above";
}

namespace {

struct ScaledWeights {
    BigInt w0;     // per-false-positive weight, scaled
    BigInt w1;     // per-false-negative weight, scaled
    BigInt scale;  // common denominator

    ScaledWeights(const OperatingCondition& oc, int n0, int n1) {
        Rational q0 = oc.weight0() / n0;
        Rational q1 = oc.weight1() / n1;
        BigInt lcm;
        mpz_lcm(lcm.get_mpz_t(), q0.get_den().get_mpz_t(), q1.get_den().get_mpz_t());
        scale = lcm;
        w0 = q0.get_num() * (lcm / q0.get_den());
        w1 = q1.get_num() * (lcm / q1.get_den());
    }
};

// Evaluates all realizable rules on labels ordered ascending by value.
// group_start[i] marks positions (0-based) where a new value group begins;
// only those positions carry candidate thresholds. Selection follows the
// partition conventions: direction Below wins expected-error ties, and the
// smallest index wins within a direction.
EtcEstimate minimize_over_rules(const std::vector<int>& sorted_labels,
                                const std::vector<char>& group_start,
                                const OperatingCondition& oc, int n0, int n1) {
    const int n = static_cast<int>(sorted_labels.size());
    ScaledWeights sw(oc, n0, n1);
    const BigInt full = sw.w0 * n0 + sw.w1 * n1;

    // Walk of the Below-direction error over threshold positions i=1..n:
    // fp = #negatives left of i, fn = #positives at or right of i. The
    // AtOrAbove error at the same index is full - below.
    BigInt below = sw.w1 * n1;
    BigInt best_below = -1, worst_below = -1;
    int best_below_idx = 0, worst_below_idx = 0;
    int fp = 0, fn = n1;
    int best_fp = 0, best_fn = 0, worst_fp = 0, worst_fn = 0;
    for (int i = 1; i <= n; ++i) {
        if (i > 1) {
            if (sorted_labels[i - 2] == 0) {
                below += sw.w0;
                ++fp;
            } else {
                below -= sw.w1;
                --fn;
            }
        }
        if (!group_start[i - 1]) continue;
        if (best_below_idx == 0 || below < best_below) {
            best_below = below;
            best_below_idx = i;
            best_fp = fp;
            best_fn = fn;
        }
        if (worst_below_idx == 0 || below > worst_below) {
            worst_below = below;
            worst_below_idx = i;
            worst_fp = fp;
            worst_fn = fn;
        }
    }

    const BigInt best_above = full - worst_below;
    EtcEstimate est;
    if (best_below <= best_above) {
        est.rule = {Direction::Below, best_below_idx};
        est.fp = best_fp;
        est.fn = best_fn;
    } else {
        est.rule = {Direction::AtOrAbove, worst_below_idx};
        // AtOrAbove at index i: positive region is [x_(i), inf).
        est.fp = n0 - worst_fp;
        est.fn = n1 - worst_fn;
    }
    est.value = oc.weight0() * est.fp / n0 + oc.weight1() * est.fn / n1;
    return est;
}

std::vector<int> sorted_order(const LabeledSample& s) {
    std::vector<int> order(s.values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return s.values[a] < s.values[b]; });
    return order;
}

void require_two_classes(const LabeledSample& s) {
    if (s.n0() == 0 || s.n1() == 0)
        throw SingleClassSample("both classes must be present");
}

}  // namespace

Rational epe_of_rule(const LabeledSample& sample, const OperatingCondition& oc,
                     const ThresholdRule& rule) {
    validate_oc(oc, false);
    require_two_classes(sample);
    const int n = sample.n();
    if (rule.threshold_index < 1 || rule.threshold_index > n)
        throw IndexOutOfRange("threshold index " + std::to_string(rule.threshold_index) +
                              " outside 1.." + std::to_string(n));
    std::vector<double> sorted(sample.values);
    std::sort(sorted.begin(), sorted.end());
    const double t = sorted[rule.threshold_index - 1];

    int fp = 0, fn = 0;
    for (int i = 0; i < n; ++i) {
        const bool positive_region = rule.direction == Direction::Below
                                         ? sample.values[i] < t
                                         : sample.values[i] >= t;
        if (positive_region && sample.labels[i] == 0) ++fp;
        if (!positive_region && sample.labels[i] == 1) ++fn;
    }
    return oc.weight0() * fp / sample.n0() + oc.weight1() * fn / sample.n1();
}

EtcEstimate etc_hat(const LabeledSample& sample, const OperatingCondition& oc) {
    validate_oc(oc, false);
    require_two_classes(sample);
    if (sample.has_cross_class_ties())
        throw TiedAcrossClasses("values tied across classes; use etc_hat_conservative");

    const auto order = sorted_order(sample);
    const int n = sample.n();
    std::vector<int> labels(n);
    std::vector<char> starts(n);
    for (int i = 0; i < n; ++i) {
        labels[i] = sample.labels[order[i]];
        starts[i] = i == 0 || sample.values[order[i]] != sample.values[order[i - 1]];
    }
    return minimize_over_rules(labels, starts, oc, sample.n0(), sample.n1());
}

EtcEstimate etc_hat_conservative(const LabeledSample& sample, const OperatingCondition& oc) {
    validate_oc(oc, false);
    require_two_classes(sample);

    const auto order = sorted_order(sample);
    const int n = sample.n();
    std::vector<int> labels(n);
    std::vector<char> starts(n);
    for (int i = 0; i < n; ++i) {
        labels[i] = sample.labels[order[i]];
        starts[i] = i == 0 || sample.values[order[i]] != sample.values[order[i - 1]];
    }
    EtcEstimate est = minimize_over_rules(labels, starts, oc, sample.n0(), sample.n1());

    if (!sample.has_cross_class_ties()) return est;

    // Statistics of the two extreme tie-break orderings (every position is a
    // candidate once ties are broken). The collapsed value dominates both;
    // the flag records whether collapsing actually mattered.
    std::vector<char> all(n, 1);
    for (int negatives_first : {1, 0}) {
        std::vector<int> broken(n);
        std::vector<int> ord(order);
        std::stable_sort(ord.begin(), ord.end(), [&](int a, int b) {
            if (sample.values[a] != sample.values[b]) return sample.values[a] < sample.values[b];
            return negatives_first ? sample.labels[a] < sample.labels[b]
                                   : sample.labels[a] > sample.labels[b];
        });
        for (int i = 0; i < n; ++i) broken[i] = sample.labels[ord[i]];
        EtcEstimate e = minimize_over_rules(broken, all, oc, sample.n0(), sample.n1());
        if (e.value != est.value) {
            est.tie_adjusted = true;
            break;
        }
    }
    return est;
}

}  // namespace etc
