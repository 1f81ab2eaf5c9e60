#include "etc/simbench.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "etc/errors.hpp"
#include "etc/parallel.hpp"

namespace etc {

Study parse_study(const std::string& s) {
    if (s == "A" || s == "a") return Study::A;
    if (s == "B" || s == "b") return Study::B;
    if (s == "C" || s == "c") return Study::C;
    if (s == "D" || s == "d") return Study::D;
    throw InvalidGridPoint("unknown study '" + s + "'");
}

std::string study_str(Study s) {
    switch (s) {
        case Study::A: return "A";
        case Study::B: return "B";
        case Study::C: return "C";
        case Study::D: return "D";
    }
    return "?";
}

void StudyConfig::validate() const {
    validate_oc(oc, true);
    if (axis1.empty() || axis2.empty()) throw InvalidGridPoint("empty parameter grid");
    if (signal_count < 1 || noise_count < 1)
        throw InvalidGridPoint("signal and noise counts must be >= 1");
    if (replications < 1) throw InvalidGridPoint("need at least one replication");
    if (n0 < 1 || n1 < 1) throw InvalidGridPoint("need n0 >= 1 and n1 >= 1");
    if (study == Study::A) {
        for (double n : axis2) {
            if (n < 2 || n != std::floor(n)) throw InvalidGridPoint("study A sizes must be integers >= 2");
        }
    }
    if (study == Study::B) {
        for (double s : axis2) {
            if (s <= 0) throw InvalidGridPoint("sigma1 must be positive");
        }
    }
    if (study == Study::C) {
        for (double phi : axis2) {
            if (phi < 0 || phi > 1) throw InvalidGridPoint("phi must lie in [0,1]");
        }
    }
    if (study == Study::D) {
        for (double s : axis2) {
            if (s <= 0) throw InvalidGridPoint("sigma must be positive");
        }
    }
}

std::string StudyConfig::axis1_name() const {
    return study == Study::D ? "delta" : "delta_mu";
}

std::string StudyConfig::axis2_name() const {
    switch (study) {
        case Study::A: return "n";
        case Study::B: return "sigma1";
        case Study::C: return "phi";
        case Study::D: return "sigma";
    }
    return "?";
}

std::pair<int, int> StudyConfig::sizes_at(std::size_t i2) const {
    if (study == Study::A) {
        const int n = static_cast<int>(axis2[i2]);
        const int half = n / 2;
        return {n - half, half};  // {n0, n1}
    }
    return {n0, n1};
}

// ---------------------------------------------------------------------------
// RNG

std::uint64_t SplitRng::mix(std::uint64_t state, std::uint64_t value) {
    // splitmix64 step over state xor value
    std::uint64_t z = (state ^ value) + 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double SplitRng::uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

double SplitRng::normal(double mean, double sd) {
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log1p(-u1));  // u1 in [0,1) keeps the log finite
    return mean + sd * r * std::cos(2.0 * M_PI * u2);
}

double SplitRng::exponential(double rate) {
    return -std::log1p(-uniform()) / rate;
}

std::uint64_t stream_seed(const StudyConfig& cfg, std::size_t i1, std::size_t i2,
                          int replication, std::size_t variable) {
    std::uint64_t h = SplitRng::mix(0x6574637365700ULL, cfg.seed);
    h = SplitRng::mix(h, static_cast<std::uint64_t>(cfg.study));
    h = SplitRng::mix(h, i1);
    h = SplitRng::mix(h, i2);
    h = SplitRng::mix(h, static_cast<std::uint64_t>(replication));
    h = SplitRng::mix(h, variable);
    return h;
}

// ---------------------------------------------------------------------------
// Generators

namespace {

constexpr double kOutlierVar = 5.0;  // contaminant variance in study C

std::string variable_name(const StudyConfig& cfg, std::size_t v) {
    return v < static_cast<std::size_t>(cfg.signal_count)
               ? "sig" + std::to_string(v + 1)
               : "noise" + std::to_string(v - cfg.signal_count + 1);
}

// Fills one column, positives (label 1) first. Draw order is fixed so that
// a given (seed, study, grid point, replication, variable) always produces
// the same numbers.
void generate_column(const StudyConfig& cfg, std::size_t i1, std::size_t i2, int rep,
                     std::size_t v, int n0, int n1, std::vector<double>& out) {
    SplitRng rng(stream_seed(cfg, i1, i2, rep, v));
    const bool signal = v < static_cast<std::size_t>(cfg.signal_count);
    const double shift = cfg.axis1[i1];
    const int n = n0 + n1;
    out.resize(n);
    switch (cfg.study) {
        case Study::A: {
            const double mu1 = signal ? shift : 0.0;
            for (int i = 0; i < n1; ++i) out[i] = rng.normal(mu1, 1.0);
            for (int i = n1; i < n; ++i) out[i] = rng.normal(0.0, 1.0);
            break;
        }
        case Study::B: {
            const double s1 = signal ? cfg.axis2[i2] : 1.0;
            const double s0 = signal ? 1.0 / cfg.axis2[i2] : 1.0;
            const double mu1 = signal ? shift : 0.0;
            for (int i = 0; i < n1; ++i) out[i] = rng.normal(mu1, s1);
            for (int i = n1; i < n; ++i) out[i] = rng.normal(0.0, s0);
            break;
        }
        case Study::C: {
            const double phi = cfg.axis2[i2];
            const double sd_out = std::sqrt(kOutlierVar);
            const double mu1 = signal ? shift : 0.0;
            if (signal) {
                const int k1 = static_cast<int>(std::floor(phi * n1));
                const int k0 = static_cast<int>(std::floor(phi * n0));
                for (int i = 0; i < n1; ++i)
                    out[i] = rng.normal(mu1, i < n1 - k1 ? 1.0 : sd_out);
                for (int i = 0; i < n0; ++i)
                    out[n1 + i] = rng.normal(0.0, i < n0 - k0 ? 1.0 : sd_out);
            } else {
                const int kn = static_cast<int>(std::floor(phi * n));
                for (int i = 0; i < n; ++i) out[i] = rng.normal(0.0, i < n - kn ? 1.0 : sd_out);
            }
            break;
        }
        case Study::D: {
            const double sigma = cfg.axis2[i2];
            const double mu0 = signal ? -shift : 0.0;
            for (int i = 0; i < n1; ++i) out[i] = std::exp(rng.normal(0.0, sigma));
            for (int i = n1; i < n; ++i) out[i] = std::exp(rng.normal(mu0, sigma));
            break;
        }
    }
}

}  // namespace

VariableMatrix generate_study(const StudyConfig& cfg, std::size_t i1, std::size_t i2,
                              int replication) {
    cfg.validate();
    if (i1 >= cfg.axis1.size() || i2 >= cfg.axis2.size())
        throw InvalidGridPoint("grid point outside configured axes");
    const auto [n0, n1] = cfg.sizes_at(i2);

    VariableMatrix m;
    const std::size_t total = static_cast<std::size_t>(cfg.signal_count) + cfg.noise_count;
    m.names.reserve(total);
    m.columns.resize(total);
    for (std::size_t v = 0; v < total; ++v) {
        m.names.push_back(variable_name(cfg, v));
        generate_column(cfg, i1, i2, replication, v, n0, n1, m.columns[v]);
    }
    m.labels.assign(n0 + n1, 0);
    for (int i = 0; i < n1; ++i) m.labels[i] = 1;
    return m;
}

// ---------------------------------------------------------------------------
// Parametric baselines

GaussianFit fit_gaussian(const std::vector<double>& values, const std::vector<int>& labels) {
    GaussianFit f;
    double s0 = 0, s1 = 0;
    int n0 = 0, n1 = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (labels[i] == 1) {
            s1 += values[i];
            ++n1;
        } else {
            s0 += values[i];
            ++n0;
        }
    }
    if (n0 == 0 || n1 == 0) throw SingleClassSample("both classes required for a fit");
    f.mean0 = s0 / n0;
    f.mean1 = s1 / n1;
    double q0 = 0, q1 = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double d = values[i] - (labels[i] == 1 ? f.mean1 : f.mean0);
        (labels[i] == 1 ? q1 : q0) += d * d;
    }
    f.var0 = q0 / n0;
    f.var1 = q1 / n1;
    f.pooled_var = (q0 + q1) / (n0 + n1);
    return f;
}

namespace {

double normal_cdf(double x, double mean, double sd) {
    return 0.5 * std::erfc(-(x - mean) / (sd * std::sqrt(2.0)));
}

LdaScore lda_from_fit(const GaussianFit& fit, const OperatingCondition& oc) {
    const double w0 = oc.weight0().get_d();
    const double w1 = oc.weight1().get_d();
    LdaScore r;
    r.fit = fit;
    if (fit.pooled_var <= 0.0 || fit.mean1 == fit.mean0) {
        r.degenerate = true;
        r.threshold = fit.mean0;
        r.plugin_epe = std::min(w0, w1);
        return r;
    }
    r.threshold = 0.5 * (fit.mean0 + fit.mean1) +
                  fit.pooled_var * std::log(w0 / w1) / (fit.mean1 - fit.mean0);
    r.direction = fit.mean1 > fit.mean0 ? Direction::AtOrAbove : Direction::Below;
    const double sd = std::sqrt(fit.pooled_var);
    const double f0 = normal_cdf(r.threshold, fit.mean0, sd);
    const double f1 = normal_cdf(r.threshold, fit.mean1, sd);
    r.plugin_epe = r.direction == Direction::AtOrAbove ? w0 * (1.0 - f0) + w1 * f1
                                                       : w0 * f0 + w1 * (1.0 - f1);
    return r;
}

}  // namespace

LdaScore lda_score(const std::vector<double>& values, const std::vector<int>& labels,
                   const OperatingCondition& oc) {
    validate_oc(oc, true);
    return lda_from_fit(fit_gaussian(values, labels), oc);
}

QdaScore qda_score(const std::vector<double>& values, const std::vector<int>& labels,
                   const OperatingCondition& oc) {
    validate_oc(oc, true);
    const GaussianFit fit = fit_gaussian(values, labels);
    const double w0 = oc.weight0().get_d();
    const double w1 = oc.weight1().get_d();
    const double inf = std::numeric_limits<double>::infinity();

    QdaScore r;
    r.fit = fit;

    if (fit.var0 <= 0.0 || fit.var1 <= 0.0) {
        // A fitted point mass: the density comparison degenerates to a point
        // (or its complement); against a continuous rival the point carries
        // the whole class and the rival none of it.
        r.degenerate = true;
        if (fit.var0 <= 0.0 && fit.var1 <= 0.0) {
            if (fit.mean0 == fit.mean1) {
                r.kind = RegionKind::Empty;
                r.lo = r.hi = fit.mean1;
                r.plugin_epe = std::min(w0, w1);
            } else {
                r.kind = RegionKind::Interval;
                r.lo = r.hi = fit.mean1;
                r.plugin_epe = 0.0;
            }
        } else if (fit.var1 <= 0.0) {
            r.kind = RegionKind::Interval;
            r.lo = r.hi = fit.mean1;
            r.plugin_epe = 0.0;
        } else {
            r.kind = RegionKind::Complement;
            r.lo = r.hi = fit.mean0;
            r.plugin_epe = 0.0;
        }
        return r;
    }

    if (fit.var0 == fit.var1) {
        // Quadratic term vanishes: exactly the linear rule.
        LdaScore lda = lda_from_fit(
            GaussianFit{fit.mean0, fit.mean1, fit.var0, fit.var1, fit.var0}, oc);
        r.plugin_epe = lda.plugin_epe;
        if (lda.degenerate) {
            r.kind = lda.plugin_epe == w0 ? RegionKind::WholeLine : RegionKind::Empty;
            r.lo = -inf;
            r.hi = inf;
            if (r.kind == RegionKind::Empty) r.lo = r.hi = fit.mean0;
            return r;
        }
        r.kind = RegionKind::Interval;
        if (lda.direction == Direction::AtOrAbove) {
            r.lo = lda.threshold;
            r.hi = inf;
        } else {
            r.lo = -inf;
            r.hi = lda.threshold;
        }
        return r;
    }

    // g(x) = ln(w1 f1(x)) - ln(w0 f0(x)) = a x^2 + b x + c; positive region {g > 0}.
    const double a = 1.0 / (2.0 * fit.var0) - 1.0 / (2.0 * fit.var1);
    const double b = fit.mean1 / fit.var1 - fit.mean0 / fit.var0;
    const double c = fit.mean0 * fit.mean0 / (2.0 * fit.var0) -
                     fit.mean1 * fit.mean1 / (2.0 * fit.var1) +
                     0.5 * std::log(fit.var0 / fit.var1) + std::log(w1 / w0);
    const double disc = b * b - 4.0 * a * c;
    const double sd0 = std::sqrt(fit.var0);
    const double sd1 = std::sqrt(fit.var1);

    if (disc < 0.0) {
        r.kind = a > 0.0 ? RegionKind::WholeLine : RegionKind::Empty;
        r.lo = -inf;
        r.hi = inf;
        r.plugin_epe = a > 0.0 ? w0 : w1;
        return r;
    }
    const double sq = std::sqrt(disc);
    double r1 = (-b - sq) / (2.0 * a);
    double r2 = (-b + sq) / (2.0 * a);
    if (r1 > r2) std::swap(r1, r2);
    r.lo = r1;
    r.hi = r2;
    const double mass0 = normal_cdf(r2, fit.mean0, sd0) - normal_cdf(r1, fit.mean0, sd0);
    const double mass1 = normal_cdf(r2, fit.mean1, sd1) - normal_cdf(r1, fit.mean1, sd1);
    if (a < 0.0) {
        r.kind = RegionKind::Interval;
        r.plugin_epe = w0 * mass0 + w1 * (1.0 - mass1);
    } else {
        r.kind = RegionKind::Complement;
        r.plugin_epe = w0 * (1.0 - mass0) + w1 * mass1;
    }
    return r;
}

// ---------------------------------------------------------------------------
// Filtering performance

double filtering_performance(const std::vector<std::string>& ranking,
                             const std::set<std::string>& signal_names) {
    if (signal_names.empty()) throw EmptySignalSet("no signal variables given");
    if (ranking.size() < signal_names.size())
        throw InvalidGridPoint("ranking shorter than the signal set");
    const std::size_t k = signal_names.size();
    std::size_t hits = 0;
    for (std::size_t i = 0; i < k; ++i) hits += signal_names.count(ranking[i]);
    return static_cast<double>(hits) / static_cast<double>(k);
}

namespace {

std::vector<std::string> ranking_by_score(const VariableMatrix& m,
                                          const std::vector<double>& scores) {
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    std::vector<std::string> names(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) names[i] = m.names[order[i]];
    return names;
}

void finalize(PointResult& pr) {
    for (int meth = 0; meth < 3; ++meth) {
        const auto& v = pr.fp_reps[meth];
        double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
        double var = 0;
        for (double x : v) var += (x - mean) * (x - mean);
        pr.fp_mean[meth] = mean;
        pr.fp_se[meth] = v.size() > 1 ? std::sqrt(var / (v.size() - 1) / v.size()) : 0.0;
    }
}

}  // namespace

FilteringPerformanceGrid run_study(const StudyConfig& cfg, NdCache& cache, int workers) {
    cfg.validate();

    FilteringPerformanceGrid grid;
    grid.study = cfg.study;
    grid.axis1_name = cfg.axis1_name();
    grid.axis2_name = cfg.axis2_name();
    grid.axis1 = cfg.axis1;
    grid.axis2 = cfg.axis2;
    grid.replications = cfg.replications;
    grid.points.assign(cfg.axis1.size(), std::vector<PointResult>(cfg.axis2.size()));

    std::set<std::string> signal;
    for (int s = 1; s <= cfg.signal_count; ++s) signal.insert("sig" + std::to_string(s));

    for (std::size_t i2 = 0; i2 < cfg.axis2.size(); ++i2) {
        const auto [n0, n1] = cfg.sizes_at(i2);
        const NullDistribution& nd = cache.get(n0, n1, cfg.oc);
        for (std::size_t i1 = 0; i1 < cfg.axis1.size(); ++i1) {
            PointResult& pr = grid.points[i1][i2];
            for (auto& v : pr.fp_reps) v.assign(cfg.replications, 0.0);
            parallel_for(cfg.replications, workers, [&](std::size_t rep) {
                const VariableMatrix m =
                    generate_study(cfg, i1, i2, static_cast<int>(rep));
                FilterReport report = rank_variables(m, cfg.oc, nd, 1);
                std::vector<std::string> etc_ranking;
                etc_ranking.reserve(report.records.size());
                for (const auto& r : report.records) etc_ranking.push_back(r.name);

                std::vector<double> lda(m.columns.size()), qda(m.columns.size());
                for (std::size_t v = 0; v < m.columns.size(); ++v) {
                    lda[v] = lda_score(m.columns[v], m.labels, cfg.oc).plugin_epe;
                    qda[v] = qda_score(m.columns[v], m.labels, cfg.oc).plugin_epe;
                }
                pr.fp_reps[0][rep] = filtering_performance(etc_ranking, signal);
                pr.fp_reps[1][rep] = filtering_performance(ranking_by_score(m, lda), signal);
                pr.fp_reps[2][rep] = filtering_performance(ranking_by_score(m, qda), signal);
            });
            finalize(pr);
        }
    }
    return grid;
}

void write_study_csv(const FilteringPerformanceGrid& grid, std::ostream& out) {
    const bool delta = grid.study == Study::C;
    std::size_t zero_idx = grid.axis2.size();
    if (delta) {
        for (std::size_t i = 0; i < grid.axis2.size(); ++i) {
            if (grid.axis2[i] == 0.0) zero_idx = i;
        }
    }
    out << "study," << grid.axis1_name << ',' << grid.axis2_name
        << ",method,fp_mean,fp_se,replications";
    if (delta) out << ",delta_fp_mean";
    out << '\n';
    for (std::size_t i1 = 0; i1 < grid.axis1.size(); ++i1) {
        for (std::size_t i2 = 0; i2 < grid.axis2.size(); ++i2) {
            const PointResult& pr = grid.points[i1][i2];
            for (int meth = 0; meth < 3; ++meth) {
                out << study_str(grid.study) << ',' << to_decimal(grid.axis1[i1]) << ','
                    << to_decimal(grid.axis2[i2]) << ',' << FilteringPerformanceGrid::kMethods[meth]
                    << ',' << to_decimal(pr.fp_mean[meth]) << ',' << to_decimal(pr.fp_se[meth])
                    << ',' << grid.replications;
                if (delta) {
                    if (zero_idx < grid.axis2.size()) {
                        double acc = 0;
                        const auto& base = grid.points[i1][zero_idx].fp_reps[meth];
                        const auto& cur = pr.fp_reps[meth];
                        for (std::size_t r = 0; r < cur.size(); ++r) acc += cur[r] - base[r];
                        out << ',' << to_decimal(acc / cur.size());
                    } else {
                        out << ",nan";
                    }
                }
                out << '\n';
            }
        }
    }
}

}  // namespace etc
