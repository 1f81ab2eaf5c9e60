#pragma once

#include <compare>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "etc/operating_condition.hpp"
#include "etc/rational.hpp"
#include "etc/sample.hpp"

namespace etc {

// Class labels ordered by increasing value of x. Under the null every such
// ordering is equally likely, which is what makes exact counting possible.
struct LabelPermutation {
    std::vector<int> labels;

    LabelPermutation() = default;
    explicit LabelPermutation(std::vector<int> labels);

    int n() const { return static_cast<int>(labels.size()); }
    int n1() const { return n1_; }
    int n0() const { return n() - n1_; }

private:
    int n1_ = 0;
};

// A partition cell: the (fn, fp) error counts of the optimal threshold.
struct CellIndex {
    int fn = 0;
    int fp = 0;
    auto operator<=>(const CellIndex&) const = default;
};

// Side of the threshold holding the positive region.
enum class Orientation { PositivesLeft, PositivesRight };

std::string orientation_str(Orientation o);

// Sorts labels by ascending value, stable within equal values. Tied values
// across classes have no canonical order and are rejected; the conservative
// estimator handles those upstream.
LabelPermutation rank_reduce(const LabeledSample& sample);

// The statistic as a function of the label ordering alone: the minimum of
// the below/at-or-above empirical errors over all n threshold positions.
Rational etc_on_permutation(const LabelPermutation& p, const OperatingCondition& oc);

struct PhiResult {
    CellIndex cell;
    Orientation orientation;
    int threshold_index;  // 1-based position chosen by the conventions
};

// Maps a permutation to its partition cell. Conventions: the positives-left
// branch wins ties of the two directional minima, and within a branch the
// smallest minimizing index is taken.
PhiResult phi(const LabelPermutation& p, const OperatingCondition& oc);

struct CellKey {
    CellIndex cell;
    Orientation orientation = Orientation::PositivesLeft;
    auto operator<=>(const CellKey&) const = default;
};

using CellTallies = std::map<CellKey, BigInt>;

// Exhaustive enumeration of all C(n, n0) label orderings (lexicographic),
// tallying phi per cell and orientation. The independent oracle for the
// recursive counting engine. Guarded by max_n.
CellTallies enumerate_cells_bruteforce(int n0, int n1, const OperatingCondition& oc,
                                       int max_n = 28);

// CSV export of oracle tallies: columns fn, fp, orientation, count.
void write_cell_tallies_csv(const CellTallies& tallies, std::ostream& out);

}  // namespace etc
