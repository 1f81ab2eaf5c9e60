#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "etc/operating_condition.hpp"
#include "etc/permutation.hpp"
#include "etc/rational.hpp"

namespace etc {

enum class DomainSign { Positive, Negative };

// One factor of a cell count: a domain (positive or negative side of the
// threshold) under one orientation.
struct QuadrantSpec {
    DomainSign domain;
    Orientation orientation;
    CellIndex cell;
    int n0 = 0;
    int n1 = 0;
    OperatingCondition oc;
};

struct QuadrantCount {
    QuadrantSpec spec;
    BigInt count;
};

// Exact finite-sample distribution of the statistic under the null. One
// distribution serves every variable with the same sizes and operating
// condition.
struct NullDistribution {
    int n0 = 0;
    int n1 = 0;
    OperatingCondition oc;
    std::map<CellIndex, BigInt> cells;                 // summed over orientations
    std::vector<std::pair<Rational, BigInt>> support;  // ascending statistic values
    BigInt total;                                      // C(n0+n1, n0)

    // Assembles a distribution from per-cell counts, grouping equal statistic
    // values and enforcing that counts sum to C(n, n0) exactly.
    static NullDistribution from_cells(int n0, int n1, const OperatingCondition& oc,
                                       const std::function<BigInt(const CellIndex&)>& count);

    // P[statistic <= observed]: the left tail, since a smaller prediction
    // error is stronger evidence against the null. Exact rational.
    Rational p_value(const Rational& observed) const;

    Rational max_statistic() const { return oc.max_statistic(); }

    bool operator==(const NullDistribution& other) const = default;

    // CSV with columns value (decimal), exact_value (num/den), probability,
    // cumulative. Deterministic output.
    void write_csv(std::ostream& out) const;

private:
    std::vector<BigInt> cumulative_;  // prefix sums over support
    void rebuild_cumulative();
    friend NullDistribution load_nd(const std::filesystem::path&);
};

// Counts permutations via the recursive scheme with per-level start/stop
// windows, memoized on the full argument tuple. One engine instance is a
// self-contained computation for a single (n0, n1, oc).
class CountingEngine {
public:
    CountingEngine(int n0, int n1, const OperatingCondition& oc, bool memoize = true);

    // Bare scheme count for one domain. Zero false instances in the domain
    // yield the empty product, 1.
    BigInt quadrant(DomainSign domain, Orientation orientation, const CellIndex& cell);

    // Per-orientation counts: the quadrant products behind the cell-level
    // feasibility gates.
    std::pair<BigInt, BigInt> cell_by_orientation(const CellIndex& cell);

    BigInt cell(const CellIndex& cell);

    NullDistribution distribution();

    std::uint64_t recursion_calls() const { return calls_; }

private:
    int n0_, n1_;
    OperatingCondition oc_;
    bool memoize_;
    // Weights scaled to a common integer denominator: exact comparisons
    // without rational arithmetic in the recursion.
    BigInt w0_, w1_, full_;
    std::uint64_t calls_ = 0;

    struct Scheme {
        int slots = 0;   // domain size
        int falses = 0;  // false instances to place
        std::vector<long> start, stop;
        bool infeasible = false;
    };
    Scheme bounds(DomainSign domain, Orientation orientation, const CellIndex& cell) const;
    BigInt recurse(const Scheme& s, int level, int prev,
                   std::vector<std::vector<BigInt>>& memo,
                   std::vector<std::vector<char>>& seen);
};

// One-shot wrappers over CountingEngine.
BigInt count_quadrant(const QuadrantSpec& spec);
BigInt count_cell(const CellIndex& cell, int n0, int n1, const OperatingCondition& oc);
NullDistribution null_distribution(int n0, int n1, const OperatingCondition& oc,
                                   bool memoize = true);

// Enumeration-based assembly of the same distribution; the oracle route.
NullDistribution nulldist_bruteforce(int n0, int n1, const OperatingCondition& oc,
                                     int max_n = 28);

// Line-oriented text cache of a distribution. Round-trips bit-exactly; the
// file self-describes sizes and operating condition and is checksummed by
// its declared total.
void save_nd(const NullDistribution& nd, const std::filesystem::path& path);
NullDistribution load_nd(const std::filesystem::path& path);

// Disk-plus-memory cache keyed by (n0, n1, oc). Not thread-safe; fetch
// before fanning out.
class NdCache {
public:
    explicit NdCache(std::filesystem::path dir = {});

    const NullDistribution& get(int n0, int n1, const OperatingCondition& oc);

    static std::string key(int n0, int n1, const OperatingCondition& oc);
    static std::string filename(int n0, int n1, const OperatingCondition& oc);

    struct Stats {
        std::uint64_t memory_hits = 0;
        std::uint64_t disk_loads = 0;
        std::uint64_t computations = 0;
    };
    const Stats& stats() const { return stats_; }

private:
    std::filesystem::path dir_;
    std::map<std::string, NullDistribution> memory_;
    Stats stats_;
};

}  // namespace etc
