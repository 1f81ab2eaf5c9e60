#include "etc/sample.hpp"

#include <algorithm>
#include <cmath>

#include "etc/errors.hpp"

namespace etc {

LabeledSample::LabeledSample(std::vector<double> values_in, std::vector<int> labels_in)
    : values(std::move(values_in)), labels(std::move(labels_in)) {
    if (values.size() != labels.size())
        throw InvalidSample("values and labels must have equal length");
    if (values.size() < 2) throw InvalidSample("need at least two observations");
    for (double v : values) {
        if (std::isnan(v)) throw InvalidSample("NaN value in sample");
    }
    for (int y : labels) {
        if (y != 0 && y != 1) throw InvalidSample("labels must be 0 or 1");
        n1_ += y;
    }
}

bool LabeledSample::has_cross_class_ties() const {
    std::vector<int> order(values.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return values[a] < values[b]; });
    for (std::size_t i = 1; i < order.size(); ++i) {
        if (values[order[i]] == values[order[i - 1]] &&
            labels[order[i]] != labels[order[i - 1]])
            return true;
    }
    return false;
}

}  // namespace etc
