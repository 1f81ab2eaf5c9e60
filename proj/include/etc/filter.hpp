#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "etc/estimator.hpp"
#include "etc/nulldist.hpp"
#include "etc/operating_condition.hpp"
#include "etc/rational.hpp"

namespace etc {

// A data matrix: one column per variable, one label per sample row.
struct VariableMatrix {
    std::vector<std::string> names;
    std::vector<std::vector<double>> columns;
    std::vector<int> labels;

    int n() const { return static_cast<int>(labels.size()); }
    int n1() const;
    int n0() const { return n() - n1(); }
    void validate() const;
};

enum class MatrixFormat { CsvWide, CsvLong };

// Wide: header row, one designated 0/1 label column, remaining numeric
// columns are variables. Long: columns variable,sample_id,value plus a
// separate label file with sample_id,label. label_spec is the label column
// name (wide) or the label file path (long).
VariableMatrix load_matrix(const std::filesystem::path& path, MatrixFormat format,
                           const std::string& label_spec);

struct VariableRecord {
    std::string name;
    Rational statistic;
    int fn = 0;
    int fp = 0;
    Direction direction = Direction::Below;
    bool tie_adjusted = false;
    Rational p;
    Rational p_adjusted;
    int rank = 0;
};

struct FilterReport {
    std::vector<VariableRecord> records;  // sorted by rank
    int n0 = 0;
    int n1 = 0;
    OperatingCondition oc;
    std::string nd_id;
};

// Benjamini-Hochberg step-up adjustment, exact rational arithmetic: sort
// ascending, q_(i) = p_(i)*m/i, cumulative minimum from the top, cap at 1,
// restore input order.
std::vector<Rational> bh_adjust(const std::vector<Rational>& p);

// Tests every variable with the conservative estimator against one shared
// null distribution and ranks ascending by p-value, ties broken by statistic
// then input order. Throws NdMismatch if nd does not match the matrix sizes
// and operating condition.
FilterReport rank_variables(const VariableMatrix& m, const OperatingCondition& oc,
                            const NullDistribution& nd, int workers = 1);

enum class ReportFormat { Csv, JsonLines };

void write_report(const FilterReport& report, const std::filesystem::path& path,
                  ReportFormat format, int top = 0);
void write_report(const FilterReport& report, std::ostream& out, ReportFormat format,
                  int top = 0);

}  // namespace etc
