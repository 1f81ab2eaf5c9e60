#include <random>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "etc/errors.hpp"
#include "etc/estimator.hpp"
#include "etc/nulldist.hpp"
#include "etc/permutation.hpp"

using namespace etc;

namespace {

OperatingCondition oc_of(long c0, long c1, long p_num, long p_den) {
    return OperatingCondition(Rational(c0), Rational(c1), Rational(p_num, p_den));
}

Rational cell_cost(const CellIndex& c, int n0, int n1, const OperatingCondition& oc) {
    return oc.weight0() * c.fp / n0 + oc.weight1() * c.fn / n1;
}

}  // namespace

TEST_CASE("rank_reduce orders labels by value") {
    LabelPermutation p = rank_reduce(LabeledSample({3, 1, 2}, {1, 0, 0}));
    CHECK(p.labels == std::vector<int>{0, 0, 1});

    p = rank_reduce(LabeledSample({0.4, 1.2, 2.5, 3.1}, {0, 0, 1, 1}));
    CHECK(p.labels == std::vector<int>{0, 0, 1, 1});

    CHECK_THROWS_AS(rank_reduce(LabeledSample({1, 1}, {0, 1})), TiedAcrossClasses);
    // ties within a class are fine and keep input order
    CHECK_NOTHROW(rank_reduce(LabeledSample({1, 1, 2}, {0, 0, 1})));
}

TEST_CASE("etc_on_permutation worked values") {
    CHECK(etc_on_permutation(LabelPermutation({1, 1, 0, 0}), oc_of(1, 1, 1, 2)) == Rational(0));
    CHECK(etc_on_permutation(LabelPermutation({0, 1, 0, 1}), oc_of(1, 1, 1, 2)) == Rational(1, 4));
    CHECK(etc_on_permutation(LabelPermutation({0, 1}), oc_of(1, 2, 1, 2)) == Rational(0));
}

TEST_CASE("phi picks the convention-resolved cell") {
    auto oc = oc_of(1, 1, 1, 2);

    PhiResult r = phi(LabelPermutation({1, 1, 0, 0}), oc);
    CHECK(r.cell == CellIndex{0, 0});
    CHECK(r.orientation == Orientation::PositivesLeft);

    r = phi(LabelPermutation({0, 0, 1, 1}), oc);
    CHECK(r.cell == CellIndex{0, 0});
    CHECK(r.orientation == Orientation::PositivesRight);

    r = phi(LabelPermutation({0, 1, 0, 1}), oc);
    CHECK(r.cell == CellIndex{0, 1});
    CHECK(r.orientation == Orientation::PositivesRight);
    CHECK(r.threshold_index == 2);
}

TEST_CASE("phi cell cost reproduces the permutation statistic") {
    std::mt19937 gen(5);
    for (int round = 0; round < 200; ++round) {
        const int n = 2 + gen() % 9;
        std::vector<int> labels(n);
        int ones = 0;
        for (int& y : labels) ones += (y = gen() % 2);
        if (ones == 0 || ones == n) continue;
        LabelPermutation p(labels);
        auto oc = oc_of(1 + gen() % 3, 1 + gen() % 3, 1 + gen() % 3, 4);
        PhiResult r = phi(p, oc);
        CHECK(cell_cost(r.cell, p.n0(), p.n1(), oc) == etc_on_permutation(p, oc));
    }
}

TEST_CASE("factorization: sample statistic equals permutation statistic") {
    std::mt19937 gen(17);
    std::uniform_int_distribution<int> val(-6000, 6000);
    for (int round = 0; round < 150; ++round) {
        const int n = 2 + gen() % 11;
        std::vector<double> values;
        std::vector<int> labels;
        for (int i = 0; i < n; ++i) {
            values.push_back(val(gen) / 1000.0);
            labels.push_back(gen() % 2);
        }
        LabeledSample s(values, labels);
        if (s.n0() == 0 || s.n1() == 0 || s.has_cross_class_ties()) continue;
        auto oc = oc_of(1 + gen() % 3, 1 + gen() % 3, 1 + gen() % 5, 6);
        LabelPermutation p = rank_reduce(s);
        EtcEstimate est = etc_hat(s, oc);
        CHECK(est.value == etc_on_permutation(p, oc));
        PhiResult r = phi(p, oc);
        CHECK(r.cell.fn == est.fn);
        CHECK(r.cell.fp == est.fp);
        CHECK((r.orientation == Orientation::PositivesLeft) ==
              (est.rule.direction == Direction::Below));
    }
}

TEST_CASE("brute-force enumeration: smallest case and totals") {
    auto oc = oc_of(1, 1, 1, 2);
    CellTallies t = enumerate_cells_bruteforce(1, 1, oc);
    CHECK(t.size() == 2);
    CHECK(t[{CellIndex{0, 0}, Orientation::PositivesLeft}] == 1);
    CHECK(t[{CellIndex{0, 0}, Orientation::PositivesRight}] == 1);

    t = enumerate_cells_bruteforce(3, 3, oc);
    BigInt sum = 0;
    for (const auto& [key, count] : t) sum += count;
    CHECK(sum == binomial(6, 3));

    CHECK_THROWS_AS(enumerate_cells_bruteforce(15, 15, oc), EnumerationTooLarge);
}

TEST_CASE("worked 9+9 example: cell (1,2) positives-left holds 210 orderings") {
    CellTallies t = enumerate_cells_bruteforce(9, 9, oc_of(1, 2, 1, 2));
    CHECK(t[{CellIndex{1, 2}, Orientation::PositivesLeft}] == 210);
}

TEST_CASE("label-complement symmetry at the symmetric operating condition") {
    auto oc = oc_of(1, 1, 1, 2);
    for (auto [n0, n1] : {std::pair{2, 4}, {3, 5}, {1, 6}}) {
        NullDistribution a = nulldist_bruteforce(n0, n1, oc);
        NullDistribution b = nulldist_bruteforce(n1, n0, oc);
        CHECK(a.support == b.support);
        CHECK(a.total == b.total);
    }
}

TEST_CASE("brute-force null distribution masses") {
    NullDistribution nd = nulldist_bruteforce(1, 1, oc_of(1, 1, 1, 2));
    REQUIRE(nd.support.size() == 1);
    CHECK(nd.support[0].first == Rational(0));
    CHECK(nd.support[0].second == 2);

    // all 6 orderings of two positives and two negatives
    nd = nulldist_bruteforce(2, 2, oc_of(1, 1, 1, 2));
    REQUIRE(nd.support.size() == 2);
    CHECK(nd.support[0].first == Rational(0));
    CHECK(nd.support[0].second == 2);
    CHECK(nd.support[1].first == Rational(1, 4));
    CHECK(nd.support[1].second == 4);
    CHECK(nd.total == 6);

    // masses always sum to one
    nd = nulldist_bruteforce(4, 3, oc_of(2, 1, 1, 3));
    BigInt sum = 0;
    for (const auto& [value, count] : nd.support) sum += count;
    CHECK(sum == nd.total);
}

TEST_CASE("oracle tallies export as CSV") {
    CellTallies t = enumerate_cells_bruteforce(2, 2, oc_of(1, 1, 1, 2));
    std::ostringstream out;
    write_cell_tallies_csv(t, out);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "fn,fp,orientation,count");
    std::size_t rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == t.size());
}
