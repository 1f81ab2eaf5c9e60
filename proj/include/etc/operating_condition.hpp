#pragma once

#include <string>

#include "etc/rational.hpp"

namespace etc {

// Misclassification costs and class prevalence: the triple (c0, c1, pi1).
// c0 is the cost of misclassifying a negative, c1 of misclassifying a
// positive, pi1 the population share of positives.
struct OperatingCondition {
    Rational c0;
    Rational c1;
    Rational pi1;

    OperatingCondition() : c0(1), c1(1), pi1(1, 2) {}
    OperatingCondition(Rational c0_in, Rational c1_in, Rational pi1_in)
        : c0(std::move(c0_in)), c1(std::move(c1_in)), pi1(std::move(pi1_in)) {
        c0.canonicalize();
        c1.canonicalize();
        pi1.canonicalize();
    }

    static OperatingCondition parse(const std::string& c0, const std::string& c1,
                                    const std::string& pi1);

    Rational pi0() const { return Rational(1) - pi1; }
    // Weight of one false positive / false negative in the statistic, before
    // the 1/n0, 1/n1 sample normalization.
    Rational weight0() const { return c0 * pi0(); }
    Rational weight1() const { return c1 * pi1; }
    // Largest attainable statistic value: cost of the better trivial classifier.
    Rational max_statistic() const;

    bool operator==(const OperatingCondition& other) const = default;

    // Canonical "c0=num/den,c1=num/den,pi1=num/den" rendering.
    std::string str() const;
};

// Checks c0 >= 0, c1 >= 0, 0 <= pi1 <= 1; with for_null additionally
// c0*pi0 > 0 and c1*pi1 > 0 (otherwise the null distribution collapses).
// Returns the condition unchanged; throws NegativeCost, PrevalenceOutOfRange
// or DegenerateOperatingCondition.
const OperatingCondition& validate_oc(const OperatingCondition& oc, bool for_null);

}  // namespace etc
