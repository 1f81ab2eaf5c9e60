#include "etc/nulldist.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "etc/errors.hpp"

namespace etc {

// ---------------------------------------------------------------------------
// NullDistribution

NullDistribution NullDistribution::from_cells(
    int n0, int n1, const OperatingCondition& oc,
    const std::function<BigInt(const CellIndex&)>& count) {
    validate_oc(oc, true);
    if (n0 < 1 || n1 < 1) throw SingleClassSample("need n0 >= 1 and n1 >= 1");

    NullDistribution nd;
    nd.n0 = n0;
    nd.n1 = n1;
    nd.oc = oc;
    nd.total = binomial(static_cast<unsigned long>(n0 + n1), static_cast<unsigned long>(n0));

    std::map<Rational, BigInt> grouped;
    BigInt sum = 0;
    for (int fn = 0; fn <= n1; ++fn) {
        for (int fp = 0; fp <= n0; ++fp) {
            CellIndex cell{fn, fp};
            BigInt c = count(cell);
            if (c == 0) continue;
            nd.cells[cell] = c;
            sum += c;
            Rational value = oc.weight0() * fp / n0 + oc.weight1() * fn / n1;
            grouped[value] += c;
        }
    }
    if (sum != nd.total)
        throw PartitionSumMismatch("cell counts sum to " + sum.get_str() + ", expected " +
                                   nd.total.get_str());
    nd.support.assign(grouped.begin(), grouped.end());
    nd.rebuild_cumulative();
    return nd;
}

void NullDistribution::rebuild_cumulative() {
    cumulative_.clear();
    cumulative_.reserve(support.size());
    BigInt acc = 0;
    for (const auto& [value, count] : support) {
        acc += count;
        cumulative_.push_back(acc);
    }
}

Rational NullDistribution::p_value(const Rational& observed) const {
    auto it = std::upper_bound(support.begin(), support.end(), observed,
                               [](const Rational& v, const auto& entry) { return v < entry.first; });
    if (it == support.begin()) return Rational(0);
    const auto idx = static_cast<std::size_t>(it - support.begin()) - 1;
    Rational p(cumulative_[idx], total);
    p.canonicalize();
    return p;
}

void NullDistribution::write_csv(std::ostream& out) const {
    out << "value,exact_value,probability,cumulative\n";
    for (std::size_t i = 0; i < support.size(); ++i) {
        Rational prob(support[i].second, total);
        prob.canonicalize();
        Rational cum(cumulative_[i], total);
        cum.canonicalize();
        out << to_decimal(support[i].first) << ',' << rational_str(support[i].first) << ','
            << to_decimal(prob) << ',' << to_decimal(cum) << '\n';
    }
}

// ---------------------------------------------------------------------------
// CountingEngine

CountingEngine::CountingEngine(int n0, int n1, const OperatingCondition& oc, bool memoize)
    : n0_(n0), n1_(n1), oc_(oc), memoize_(memoize) {
    validate_oc(oc, true);
    if (n0 < 1 || n1 < 1) throw SingleClassSample("need n0 >= 1 and n1 >= 1");
    const Rational q0 = oc.weight0() / n0;
    const Rational q1 = oc.weight1() / n1;
    BigInt scale;
    mpz_lcm(scale.get_mpz_t(), q0.get_den().get_mpz_t(), q1.get_den().get_mpz_t());
    w0_ = q0.get_num() * (scale / q0.get_den());
    w1_ = q1.get_num() * (scale / q1.get_den());
    full_ = w0_ * n0 + w1_ * n1;
}

// Per-level windows of the nested sums. Level k places the k-th false
// instance, counted from the threshold outward; positions decrease level by
// level. start comes from the least number of true instances that keeps the
// threshold optimal (searched, not divided, so the strict/non-strict
// asymmetries stay exact); stop adds the maximal number of shifts before the
// orientation would flip, capped by the slots left for the remaining false
// instances.
CountingEngine::Scheme CountingEngine::bounds(DomainSign domain, Orientation orientation,
                                              const CellIndex& cell) const {
    const int tp = n1_ - cell.fn;
    const int tn = n0_ - cell.fp;
    Scheme s;
    BigInt u, d;
    if (domain == DomainSign::Positive) {
        s.slots = tp + cell.fp;
        s.falses = cell.fp;
        u = w1_;
        d = w0_;
    } else {
        s.slots = tn + cell.fn;
        s.falses = cell.fn;
        u = w0_;
        d = w1_;
    }
    const bool low_strict = (domain == DomainSign::Positive) ==
                            (orientation == Orientation::PositivesLeft);
    const bool up_strict = orientation == Orientation::PositivesRight;
    const BigInt corridor = full_ - 2 * (w0_ * cell.fp + w1_ * cell.fn);

    const int M = s.slots;
    const int F = s.falses;
    s.start.assign(F + 1, 0);
    s.stop.assign(F + 1, 0);
    for (int k = 1; k <= F; ++k) {
        const int rem = F - k + 1;
        long l1 = M + 2;
        for (long nu = 0; nu <= M + 1; ++nu) {
            const BigInt lhs = u * nu;
            const BigInt rhs = d * rem;
            if (low_strict ? lhs > rhs : lhs >= rhs) {
                l1 = nu;
                break;
            }
        }
        long numax = -1;
        for (long nu = 0; nu <= M; ++nu) {
            const BigInt lhs = u * nu - d * (F - k);
            if (up_strict ? lhs < corridor : lhs <= corridor)
                numax = nu;
            else
                break;
        }
        s.start[k] = l1 + (F - k) + 1;
        const long cap = M - (k - 1);
        s.stop[k] = numax < 0 ? -1 : std::min(cap, (F - k) + 1 + numax);
        if (s.start[k] > s.stop[k]) {
            s.infeasible = true;
            return s;
        }
    }
    return s;
}

BigInt CountingEngine::recurse(const Scheme& s, int level, int prev,
                               std::vector<std::vector<BigInt>>& memo,
                               std::vector<std::vector<char>>& seen) {
    ++calls_;
    if (level > s.falses) return 1;
    const long hi = std::min<long>(s.stop[level], prev - 1);
    const long lo = s.start[level];
    if (hi < lo) return 0;
    const int pidx = static_cast<int>(hi - lo);  // ranges collapse to the same key
    if (memoize_ && seen[level][pidx]) return memo[level][pidx];

    BigInt sum = 0;
    for (long i = lo; i <= hi; ++i) sum += recurse(s, level + 1, static_cast<int>(i), memo, seen);
    if (memoize_) {
        memo[level][pidx] = sum;
        seen[level][pidx] = 1;
    }
    return sum;
}

BigInt CountingEngine::quadrant(DomainSign domain, Orientation orientation,
                                const CellIndex& cell) {
    if (cell.fn < 0 || cell.fn > n1_ || cell.fp < 0 || cell.fp > n0_)
        throw InvalidCell("cell (" + std::to_string(cell.fn) + "," + std::to_string(cell.fp) +
                          ") outside 0.." + std::to_string(n1_) + " x 0.." + std::to_string(n0_));
    Scheme s = bounds(domain, orientation, cell);
    if (s.falses == 0) return 1;  // empty product: exactly one arrangement
    if (s.infeasible) return 0;
    std::vector<std::vector<BigInt>> memo(s.falses + 1);
    std::vector<std::vector<char>> seen(s.falses + 1);
    for (int k = 1; k <= s.falses; ++k) {
        const std::size_t width = static_cast<std::size_t>(s.stop[k] - s.start[k]) + 1;
        memo[k].resize(width);
        seen[k].assign(width, 0);
    }
    return recurse(s, 1, s.slots + 1, memo, seen);
}

std::pair<BigInt, BigInt> CountingEngine::cell_by_orientation(const CellIndex& cell) {
    const int tp = n1_ - cell.fn;
    const int tn = n0_ - cell.fp;
    BigInt left = 0, right = 0;
    // Positives-left needs a nonempty negative domain: the threshold sits at
    // position tp+fp+1, which must not exceed n.
    if (tn + cell.fn >= 1) {
        left = quadrant(DomainSign::Positive, Orientation::PositivesLeft, cell);
        if (left != 0)
            left *= quadrant(DomainSign::Negative, Orientation::PositivesLeft, cell);
    }
    // Positives-right must strictly beat the all-negative rule, which lives
    // only in the other branch: cell cost < c1*pi1. Subsumes the empty
    // positive domain case.
    if (w1_ * tp > w0_ * cell.fp) {
        right = quadrant(DomainSign::Positive, Orientation::PositivesRight, cell);
        if (right != 0)
            right *= quadrant(DomainSign::Negative, Orientation::PositivesRight, cell);
    }
    return {left, right};
}

BigInt CountingEngine::cell(const CellIndex& cell) {
    auto [left, right] = cell_by_orientation(cell);
    return left + right;
}

NullDistribution CountingEngine::distribution() {
    return NullDistribution::from_cells(n0_, n1_, oc_,
                                        [this](const CellIndex& c) { return cell(c); });
}

BigInt count_quadrant(const QuadrantSpec& spec) {
    CountingEngine engine(spec.n0, spec.n1, spec.oc);
    return engine.quadrant(spec.domain, spec.orientation, spec.cell);
}

BigInt count_cell(const CellIndex& cell, int n0, int n1, const OperatingCondition& oc) {
    CountingEngine engine(n0, n1, oc);
    return engine.cell(cell);
}

NullDistribution null_distribution(int n0, int n1, const OperatingCondition& oc, bool memoize) {
    CountingEngine engine(n0, n1, oc, memoize);
    return engine.distribution();
}

// ---------------------------------------------------------------------------
// Persistence

void save_nd(const NullDistribution& nd, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << "#ETC-ND v1\n";
    out << "n0=" << nd.n0 << "\n";
    out << "n1=" << nd.n1 << "\n";
    out << "c0=" << rational_str(nd.oc.c0) << "\n";
    out << "c1=" << rational_str(nd.oc.c1) << "\n";
    out << "pi1=" << rational_str(nd.oc.pi1) << "\n";
    for (const auto& [cell, count] : nd.cells)
        out << "cell " << cell.fn << ' ' << cell.fp << ' ' << count.get_str() << "\n";
    for (const auto& [value, count] : nd.support)
        out << "support " << rational_str(value) << ' ' << count.get_str() << "\n";
    out << "total " << nd.total.get_str() << "\n";
    if (!out) throw IoError("write to " + path.string() + " failed");
}

namespace {

std::string expect_field(std::istream& in, const std::string& name) {
    std::string line;
    if (!std::getline(in, line) || line.rfind(name + "=", 0) != 0)
        throw FormatVersionMismatch("expected '" + name + "=' line");
    return line.substr(name.size() + 1);
}

}  // namespace

NullDistribution load_nd(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != "#ETC-ND v1")
        throw FormatVersionMismatch("unrecognized header in " + path.string());

    NullDistribution nd;
    nd.n0 = std::stoi(expect_field(in, "n0"));
    nd.n1 = std::stoi(expect_field(in, "n1"));
    Rational c0 = parse_rational(expect_field(in, "c0"));
    Rational c1 = parse_rational(expect_field(in, "c1"));
    Rational pi1 = parse_rational(expect_field(in, "pi1"));
    nd.oc = OperatingCondition(c0, c1, pi1);

    bool have_total = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "cell") {
            int fn, fp;
            std::string count;
            if (!(ls >> fn >> fp >> count)) throw FormatVersionMismatch("malformed cell line");
            nd.cells[{fn, fp}] = BigInt(count);
        } else if (tag == "support") {
            std::string value, count;
            if (!(ls >> value >> count)) throw FormatVersionMismatch("malformed support line");
            nd.support.emplace_back(parse_rational(value), BigInt(count));
        } else if (tag == "total") {
            std::string t;
            if (!(ls >> t)) throw FormatVersionMismatch("malformed total line");
            nd.total = BigInt(t);
            have_total = true;
        } else {
            throw FormatVersionMismatch("unrecognized line '" + line + "'");
        }
    }
    if (!have_total) throw FormatVersionMismatch("missing total line");

    BigInt cell_sum = 0;
    for (const auto& [cell, count] : nd.cells) cell_sum += count;
    BigInt support_sum = 0;
    for (const auto& [value, count] : nd.support) support_sum += count;
    if (cell_sum != nd.total || support_sum != nd.total)
        throw ChecksumMismatch("declared total " + nd.total.get_str() +
                               " does not match summed counts in " + path.string());
    for (std::size_t i = 1; i < nd.support.size(); ++i) {
        if (!(nd.support[i - 1].first < nd.support[i].first))
            throw ChecksumMismatch("support values not strictly increasing in " + path.string());
    }
    nd.rebuild_cumulative();
    return nd;
}

// ---------------------------------------------------------------------------
// NdCache

NdCache::NdCache(std::filesystem::path dir) : dir_(std::move(dir)) {
    if (!dir_.empty()) std::filesystem::create_directories(dir_);
}

std::string NdCache::key(int n0, int n1, const OperatingCondition& oc) {
    return "n0=" + std::to_string(n0) + ",n1=" + std::to_string(n1) + "," + oc.str();
}

std::string NdCache::filename(int n0, int n1, const OperatingCondition& oc) {
    const std::string k = key(n0, n1, oc);
    std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
    for (unsigned char c : k) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
    return "etcnd_" + std::to_string(n0) + "x" + std::to_string(n1) + "_" + hex + ".txt";
}

const NullDistribution& NdCache::get(int n0, int n1, const OperatingCondition& oc) {
    const std::string k = key(n0, n1, oc);
    if (auto it = memory_.find(k); it != memory_.end()) {
        ++stats_.memory_hits;
        return it->second;
    }
    if (!dir_.empty()) {
        const auto path = dir_ / filename(n0, n1, oc);
        if (std::filesystem::exists(path)) {
            NullDistribution nd = load_nd(path);
            if (nd.n0 == n0 && nd.n1 == n1 && nd.oc == oc) {
                ++stats_.disk_loads;
                return memory_.emplace(k, std::move(nd)).first->second;
            }
        }
    }
    ++stats_.computations;
    NullDistribution nd = null_distribution(n0, n1, oc);
    if (!dir_.empty()) save_nd(nd, dir_ / filename(n0, n1, oc));
    return memory_.emplace(k, std::move(nd)).first->second;
}

}  // namespace etc
