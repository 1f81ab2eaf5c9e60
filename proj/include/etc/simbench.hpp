#pragma once

#include <array>
#include <cstdint>
#include <ostream>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "etc/estimator.hpp"
#include "etc/filter.hpp"
#include "etc/nulldist.hpp"
#include "etc/operating_condition.hpp"

namespace etc {

enum class Study { A, B, C, D };

Study parse_study(const std::string& s);
std::string study_str(Study s);

// Grid layout per study. axis1 is the location shift (delta_mu for A/B/C,
// the log-scale shift delta for D); axis2 is the study's second dimension:
// total sample size for A, sigma1 for B (sigma0 = 1/sigma1), the outlier
// fraction phi for C, the log-scale sigma for D.
struct StudyConfig {
    Study study = Study::A;
    std::vector<double> axis1;
    std::vector<double> axis2;
    int n0 = 25;
    int n1 = 25;
    int signal_count = 100;
    int noise_count = 9900;
    OperatingCondition oc;
    std::uint64_t seed = 1;
    int replications = 5;

    void validate() const;
    std::string axis1_name() const;
    std::string axis2_name() const;
    // Class sizes at a grid point (study A reads them off axis2).
    std::pair<int, int> sizes_at(std::size_t i2) const;
};

// Seedable, portable generator: mt19937_64 bits mapped to [0,1) doubles,
// normals via Box-Muller. Streams are split with splitmix64 over
// (seed, study, axis indices, replication, variable), so any draw is
// reproducible independently of scheduling.
class SplitRng {
public:
    explicit SplitRng(std::uint64_t seed) : gen_(seed) {}
    static std::uint64_t mix(std::uint64_t state, std::uint64_t value);

    double uniform();  // [0, 1), 53-bit resolution
    double normal(double mean, double sd);
    double exponential(double rate = 1.0);

private:
    std::mt19937_64 gen_;
};

std::uint64_t stream_seed(const StudyConfig& cfg, std::size_t i1, std::size_t i2,
                          int replication, std::size_t variable);

// One replication of a study at one grid point: signal_count signal columns
// followed by noise_count noise columns, deterministic given the seed.
VariableMatrix generate_study(const StudyConfig& cfg, std::size_t i1, std::size_t i2,
                              int replication);

struct GaussianFit {
    double mean0 = 0, mean1 = 0;
    double var0 = 0, var1 = 0;   // maximum-likelihood (1/n_k) variances
    double pooled_var = 0;       // n-weighted combination
};

GaussianFit fit_gaussian(const std::vector<double>& values, const std::vector<int>& labels);

// Univariate linear discriminant under the operating condition: fits class
// means and a pooled variance, places the boundary in closed form and scores
// the variable by the plug-in expected prediction error of that rule under
// the fitted Gaussians.
struct LdaScore {
    GaussianFit fit;
    bool degenerate = false;  // zero pooled variance or equal means
    double threshold = 0;
    Direction direction = Direction::AtOrAbove;
    double plugin_epe = 0;
};

LdaScore lda_score(const std::vector<double>& values, const std::vector<int>& labels,
                   const OperatingCondition& oc);

// Quadratic discriminant: the positive region solves the cost-weighted
// density comparison and is an interval or its complement (a half line when
// the fitted variances coincide, where this reduces exactly to lda_score).
enum class RegionKind { Interval, Complement, WholeLine, Empty };

struct QdaScore {
    GaussianFit fit;
    bool degenerate = false;  // a class variance of zero
    RegionKind kind = RegionKind::Interval;
    double lo = 0, hi = 0;  // region bounds; +-inf encode half lines
    double plugin_epe = 0;
};

QdaScore qda_score(const std::vector<double>& values, const std::vector<int>& labels,
                   const OperatingCondition& oc);

// Fraction of signal variables among the top-|signal| ranked names.
double filtering_performance(const std::vector<std::string>& ranking,
                             const std::set<std::string>& signal_names);

struct PointResult {
    std::array<std::vector<double>, 3> fp_reps;  // per method: FP per replication
    std::array<double, 3> fp_mean{};
    std::array<double, 3> fp_se{};
};

struct FilteringPerformanceGrid {
    Study study = Study::A;
    std::string axis1_name, axis2_name;
    std::vector<double> axis1, axis2;
    int replications = 0;
    // indexed [i1][i2]; methods ordered ETC, LDA, QDA
    std::vector<std::vector<PointResult>> points;

    static constexpr std::array<const char*, 3> kMethods{"ETC", "LDA", "QDA"};
};

FilteringPerformanceGrid run_study(const StudyConfig& cfg, NdCache& cache, int workers = 1);

// One CSV per study: grid coordinates, method, FP mean, FP standard error,
// replication count; study C additionally reports the FP drop against the
// phi=0 column.
void write_study_csv(const FilteringPerformanceGrid& grid, std::ostream& out);

}  // namespace etc
