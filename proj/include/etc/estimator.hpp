#pragma once

#include <string>

#include "etc/operating_condition.hpp"
#include "etc/rational.hpp"
#include "etc/sample.hpp"

namespace etc {

// Direction of a threshold classifier: the positive region is (-inf, t) for
// Below and [t, inf) for AtOrAbove.
enum class Direction { Below, AtOrAbove };

std::string direction_str(Direction d);

// One of the 2n candidate rules: a direction plus the order-statistic index
// j in 1..n identifying the threshold t = x_(j).
struct ThresholdRule {
    Direction direction;
    int threshold_index;  // 1-based
};

// Statistic value plus a minimizing rule and its error counts.
struct EtcEstimate {
    Rational value;
    ThresholdRule rule;
    int fn = 0;
    int fp = 0;
    bool tie_adjusted = false;
};

// Cost-weighted empirical prediction error of one rule:
// c0*pi0*(#negatives in positive region)/n0 + c1*pi1*(#positives in negative
// region)/n1, regions taken on values so tied observations move together.
Rational epe_of_rule(const LabeledSample& sample, const OperatingCondition& oc,
                     const ThresholdRule& rule);

// Minimum of epe_of_rule over all 2n rules. Requires both classes present
// and no value shared across classes (use etc_hat_conservative for tied
// data). Among minimizers the rule with direction Below is preferred, then
// the smallest threshold index.
EtcEstimate etc_hat(const LabeledSample& sample, const OperatingCondition& oc);

// Tie-tolerant variant: thresholds are restricted to observed values, so
// cuts inside a tied group are not available and the minimum can only grow.
// The result dominates the statistic of every tie-breaking reordering of the
// sample, which makes the p-value against the tie-free null conservative.
// tie_adjusted is set when cross-class ties actually changed the value
// relative to the tie-broken extremes.
EtcEstimate etc_hat_conservative(const LabeledSample& sample, const OperatingCondition& oc);

}  // namespace etc
