#include "etc/operating_condition.hpp"

#include "etc/errors.hpp"

namespace etc {

OperatingCondition OperatingCondition::parse(const std::string& c0, const std::string& c1,
                                             const std::string& pi1) {
    return OperatingCondition(parse_rational(c0), parse_rational(c1), parse_rational(pi1));
}

Rational OperatingCondition::max_statistic() const {
    Rational w0 = weight0();
    Rational w1 = weight1();
    return w0 < w1 ? w0 : w1;
}

std::string OperatingCondition::str() const {
    return "c0=" + rational_str(c0) + ",c1=" + rational_str(c1) + ",pi1=" + rational_str(pi1);
}

const OperatingCondition& validate_oc(const OperatingCondition& oc, bool for_null) {
    if (oc.c0 < 0 || oc.c1 < 0) throw NegativeCost("costs must be nonnegative: " + oc.str());
    if (oc.pi1 < 0 || oc.pi1 > 1)
        throw PrevalenceOutOfRange("pi1 must lie in [0,1]: " + oc.str());
    if (for_null && (oc.weight0() == 0 || oc.weight1() == 0))
        throw DegenerateOperatingCondition("a class carries zero weight: " + oc.str());
    return oc;
}

}  // namespace etc
