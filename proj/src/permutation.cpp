#include "etc/permutation.hpp"

#include <algorithm>
#include <numeric>

#include "etc/errors.hpp"
#include "etc/nulldist.hpp"

namespace etc {

LabelPermutation::LabelPermutation(std::vector<int> labels_in) : labels(std::move(labels_in)) {
    for (int y : labels) {
        if (y != 0 && y != 1) throw InvalidSample("permutation labels must be 0 or 1");
        n1_ += y;
    }
}

std::string orientation_str(Orientation o) {
    return o == Orientation::PositivesLeft ? "positives-left" : "positives-right";
}

LabelPermutation rank_reduce(const LabeledSample& sample) {
    if (sample.has_cross_class_ties())
        throw TiedAcrossClasses("cross-class ties have no canonical rank order");
    std::vector<int> order(sample.values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return sample.values[a] < sample.values[b]; });
    std::vector<int> labels(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) labels[i] = sample.labels[order[i]];
    return LabelPermutation(std::move(labels));
}

namespace {

// Walk of the positives-left error E_<i over i = 1..n, scaled to integers.
// E_>=i equals (full - E_<i), so one pass yields both directional minima and
// their smallest indices.
struct WalkResult {
    BigInt min_below;
    BigInt max_below;
    int min_idx = 0;  // smallest argmin of E_<
    int max_idx = 0;  // smallest argmax of E_< == smallest argmin of E_>=
    BigInt full;
    BigInt scale;
};

WalkResult walk(const LabelPermutation& p, const OperatingCondition& oc) {
    const int n = p.n();
    const int n0 = p.n0();
    const int n1 = p.n1();
    if (n0 == 0 || n1 == 0) throw SingleClassSample("both labels must appear");

    const Rational q0 = oc.weight0() / n0;
    const Rational q1 = oc.weight1() / n1;
    BigInt scale;
    mpz_lcm(scale.get_mpz_t(), q0.get_den().get_mpz_t(), q1.get_den().get_mpz_t());
    const BigInt w0 = q0.get_num() * (scale / q0.get_den());
    const BigInt w1 = q1.get_num() * (scale / q1.get_den());

    WalkResult r;
    r.scale = scale;
    r.full = w0 * n0 + w1 * n1;
    BigInt e = w1 * n1;  // i = 1: everything classified negative
    r.min_below = e;
    r.max_below = e;
    r.min_idx = r.max_idx = 1;
    for (int i = 2; i <= n; ++i) {
        if (p.labels[i - 2] == 0)
            e += w0;
        else
            e -= w1;
        if (e < r.min_below) {
            r.min_below = e;
            r.min_idx = i;
        }
        if (e > r.max_below) {
            r.max_below = e;
            r.max_idx = i;
        }
    }
    return r;
}

}  // namespace

Rational etc_on_permutation(const LabelPermutation& p, const OperatingCondition& oc) {
    validate_oc(oc, false);
    WalkResult r = walk(p, oc);
    const BigInt min_above = r.full - r.max_below;
    const BigInt& best = r.min_below < min_above ? r.min_below : min_above;
    Rational v(best, r.scale);
    v.canonicalize();
    return v;
}

PhiResult phi(const LabelPermutation& p, const OperatingCondition& oc) {
    validate_oc(oc, true);
    WalkResult r = walk(p, oc);
    const BigInt min_above = r.full - r.max_below;

    PhiResult res;
    if (r.min_below <= min_above) {
        res.orientation = Orientation::PositivesLeft;
        res.threshold_index = r.min_idx;
        int fn = 0, fp = 0;
        for (int j = 0; j < p.n(); ++j) {
            if (j + 1 >= res.threshold_index)
                fn += p.labels[j];
            else
                fp += 1 - p.labels[j];
        }
        res.cell = {fn, fp};
    } else {
        res.orientation = Orientation::PositivesRight;
        res.threshold_index = r.max_idx;
        int fn = 0, fp = 0;
        for (int j = 0; j < p.n(); ++j) {
            if (j + 1 < res.threshold_index)
                fn += p.labels[j];
            else
                fp += 1 - p.labels[j];
        }
        res.cell = {fn, fp};
    }
    return res;
}

CellTallies enumerate_cells_bruteforce(int n0, int n1, const OperatingCondition& oc,
                                       int max_n) {
    validate_oc(oc, true);
    if (n0 < 1 || n1 < 1) throw SingleClassSample("need n0 >= 1 and n1 >= 1");
    const int n = n0 + n1;
    if (n > max_n)
        throw EnumerationTooLarge("n0+n1 = " + std::to_string(n) + " exceeds guard " +
                                  std::to_string(max_n));

    CellTallies tallies;
    // Lexicographic walk over all placements of the n1 ones.
    std::vector<int> ones(n1);
    std::iota(ones.begin(), ones.end(), 0);
    std::vector<int> labels(n);
    for (;;) {
        std::fill(labels.begin(), labels.end(), 0);
        for (int pos : ones) labels[pos] = 1;
        PhiResult res = phi(LabelPermutation(labels), oc);
        tallies[{res.cell, res.orientation}] += 1;

        int k = n1 - 1;
        while (k >= 0 && ones[k] == n - n1 + k) --k;
        if (k < 0) break;
        ++ones[k];
        for (int j = k + 1; j < n1; ++j) ones[j] = ones[j - 1] + 1;
    }
    return tallies;
}

void write_cell_tallies_csv(const CellTallies& tallies, std::ostream& out) {
    out << "fn,fp,orientation,count\n";
    for (const auto& [key, count] : tallies) {
        out << key.cell.fn << ',' << key.cell.fp << ',' << orientation_str(key.orientation)
            << ',' << count.get_str() << '\n';
    }
}

NullDistribution nulldist_bruteforce(int n0, int n1, const OperatingCondition& oc, int max_n) {
    CellTallies tallies = enumerate_cells_bruteforce(n0, n1, oc, max_n);
    return NullDistribution::from_cells(n0, n1, oc, [&](const CellIndex& cell) {
        BigInt c = 0;
        if (auto it = tallies.find({cell, Orientation::PositivesLeft}); it != tallies.end())
            c += it->second;
        if (auto it = tallies.find({cell, Orientation::PositivesRight}); it != tallies.end())
            c += it->second;
        return c;
    });
}

}  // namespace etc
