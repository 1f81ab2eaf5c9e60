#pragma once

#include <vector>

namespace etc {

// Paired observations (x_i, y_i) with binary class labels. Construction
// validates lengths, label domain and rejects NaN values; class counts of
// zero are legal here and rejected by the operations that need both classes.
struct LabeledSample {
    std::vector<double> values;
    std::vector<int> labels;

    LabeledSample() = default;
    LabeledSample(std::vector<double> values, std::vector<int> labels);

    int n() const { return static_cast<int>(values.size()); }
    int n1() const { return n1_; }
    int n0() const { return n() - n1_; }

    // True if some value is shared by observations of both classes.
    bool has_cross_class_ties() const;

private:
    int n1_ = 0;
};

}  // namespace etc
