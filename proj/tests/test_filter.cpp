#include <filesystem>
#include <fstream>
#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "etc/errors.hpp"
#include "etc/filter.hpp"
#include "etc/nulldist.hpp"

using namespace etc;
namespace fs = std::filesystem;

namespace {

OperatingCondition oc_of(long c0, long c1, long p_num, long p_den) {
    return OperatingCondition(Rational(c0), Rational(c1), Rational(p_num, p_den));
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("etc_filter_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

fs::path write_file(const fs::path& path, const std::string& content) {
    std::ofstream(path, std::ios::binary | std::ios::trunc) << content;
    return path;
}

}  // namespace

TEST_CASE("wide CSV loading") {
    TempDir tmp;
    auto path = write_file(tmp.path / "wide.csv",
                           "a,b,label,c\n"
                           "1.5,4,0,7\n"
                           "2.5,5,0,8\n"
                           "0.5,6,0,9\n"
                           "3.5,1,1,10\n"
                           "4.5,2,1,11\n"
                           "5.5,3,1,12\n");
    VariableMatrix m = load_matrix(path, MatrixFormat::CsvWide, "label");
    CHECK(m.names == std::vector<std::string>{"a", "b", "c"});
    CHECK(m.n() == 6);
    CHECK(m.n0() == 3);
    CHECK(m.n1() == 3);
    CHECK(m.columns[0][3] == 3.5);

    CHECK_THROWS_AS(load_matrix(path, MatrixFormat::CsvWide, "nope"), LabelMismatch);

    auto bad = write_file(tmp.path / "bad.csv", "a,label\n1,0\nx,1\n");
    try {
        load_matrix(bad, MatrixFormat::CsvWide, "label");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.row == 3);
        CHECK(e.col == 1);
    }

    auto single = write_file(tmp.path / "single.csv", "a,label\n1,0\n2,0\n");
    CHECK_THROWS_AS(load_matrix(single, MatrixFormat::CsvWide, "label"), SingleClassLabels);
}

TEST_CASE("long CSV loading") {
    TempDir tmp;
    auto labels = write_file(tmp.path / "labels.csv",
                             "sample_id,label\ns1,0\ns2,0\ns3,1\ns4,1\n");
    auto data = write_file(tmp.path / "long.csv",
                           "variable,sample_id,value\n"
                           "a,s1,1\na,s2,2\na,s3,3\na,s4,4\n"
                           "b,s4,8\nb,s3,7\nb,s2,6\nb,s1,5\n");
    VariableMatrix m = load_matrix(data, MatrixFormat::CsvLong, labels.string());
    CHECK(m.names == std::vector<std::string>{"a", "b"});
    CHECK(m.columns[1] == std::vector<double>{5, 6, 7, 8});
    CHECK(m.labels == std::vector<int>{0, 0, 1, 1});

    auto missing = write_file(tmp.path / "short.csv",
                              "variable,sample_id,value\na,s1,1\na,s2,2\na,s3,3\n");
    CHECK_THROWS_AS(load_matrix(missing, MatrixFormat::CsvLong, labels.string()), LabelMismatch);

    auto unknown = write_file(tmp.path / "unknown.csv",
                              "variable,sample_id,value\na,zz,1\n");
    CHECK_THROWS_AS(load_matrix(unknown, MatrixFormat::CsvLong, labels.string()), LabelMismatch);
}

TEST_CASE("Benjamini-Hochberg adjustment") {
    auto q = bh_adjust({Rational(1, 25)});
    CHECK(q == std::vector<Rational>{Rational(1, 25)});

    q = bh_adjust({Rational(1, 100), Rational(2, 100), Rational(4, 100)});
    CHECK(q[0] == Rational(3, 100));
    CHECK(q[1] == Rational(3, 100));
    CHECK(q[2] == Rational(1, 25));

    q = bh_adjust({Rational(1), Rational(1), Rational(1)});
    CHECK(q == std::vector<Rational>(3, Rational(1)));

    // the step-up factor m/i caps at one
    q = bh_adjust({Rational(9, 10), Rational(1)});
    CHECK(q[0] == Rational(1));
    CHECK(q[1] == Rational(1));

    CHECK_THROWS_AS(bh_adjust({Rational(2)}), ValueOutOfRange);

    // unsorted input restores to input order
    q = bh_adjust({Rational(1, 25), Rational(1, 100), Rational(2, 100)});
    CHECK(q[0] == Rational(1, 25));
    CHECK(q[1] == Rational(3, 100));
    CHECK(q[2] == Rational(3, 100));
}

TEST_CASE("ranking extremes: perfect separator and constant variable") {
    VariableMatrix m;
    m.names = {"perfect", "flat", "mixed"};
    m.columns = {{1, 2, 3, 10, 11, 12}, {4, 4, 4, 4, 4, 4}, {1, 9, 2, 8, 3, 10}};
    m.labels = {0, 0, 0, 1, 1, 1};

    auto oc = oc_of(1, 1, 1, 2);
    NullDistribution nd = null_distribution(3, 3, oc);
    FilterReport report = rank_variables(m, oc, nd);

    REQUIRE(report.records.size() == 3);
    CHECK(report.records[0].name == "perfect");
    CHECK(report.records[0].rank == 1);
    CHECK(report.records[0].statistic == Rational(0));
    CHECK(report.records[0].p * nd.total == 2);

    const auto& flat = report.records.back();
    CHECK(flat.name == "flat");
    CHECK(flat.statistic == oc.max_statistic());
    CHECK(flat.p == 1);
    CHECK(flat.tie_adjusted);

    for (const auto& r : report.records) CHECK(r.p_adjusted >= r.p);
}

TEST_CASE("ties in the statistic keep input order") {
    VariableMatrix m;
    m.names = {"v1", "v2"};
    m.columns = {{1, 2, 3, 4}, {10, 20, 30, 40}};  // identical rankings
    m.labels = {0, 1, 0, 1};
    auto oc = oc_of(1, 1, 1, 2);
    NullDistribution nd = null_distribution(2, 2, oc);
    FilterReport report = rank_variables(m, oc, nd);
    CHECK(report.records[0].name == "v1");
    CHECK(report.records[1].name == "v2");
    CHECK(report.records[0].p == report.records[1].p);
}

TEST_CASE("ranking agrees with the brute-force null distribution") {
    std::mt19937 gen(41);
    VariableMatrix m;
    m.labels = {1, 1, 1, 1, 1, 0, 0, 0, 0, 0};
    for (int v = 0; v < 10; ++v) {
        m.names.push_back("v" + std::to_string(v));
        std::vector<double> col;
        for (int i = 0; i < 10; ++i) col.push_back((gen() % 100000) / 1000.0);
        m.columns.push_back(col);
    }
    auto oc = oc_of(1, 2, 2, 5);
    NullDistribution engine_nd = null_distribution(5, 5, oc);
    NullDistribution oracle_nd = nulldist_bruteforce(5, 5, oc);
    FilterReport a = rank_variables(m, oc, engine_nd);
    FilterReport b = rank_variables(m, oc, oracle_nd);
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        CHECK(a.records[i].name == b.records[i].name);
        CHECK(a.records[i].p == b.records[i].p);
    }
}

TEST_CASE("mismatched null distribution is rejected") {
    VariableMatrix m;
    m.names = {"a"};
    m.columns = {{1, 2, 3, 4}};
    m.labels = {0, 0, 1, 1};
    auto oc = oc_of(1, 1, 1, 2);
    NullDistribution nd = null_distribution(3, 3, oc);  // wrong sizes
    CHECK_THROWS_AS(rank_variables(m, oc, nd), NdMismatch);
    NullDistribution nd2 = null_distribution(2, 2, oc_of(1, 2, 1, 2));  // wrong oc
    CHECK_THROWS_AS(rank_variables(m, oc, nd2), NdMismatch);
}

TEST_CASE("report serialization") {
    VariableMatrix m;
    m.names = {"x", "y", "z"};
    m.columns = {{1, 2, 3, 10, 11, 12}, {1, 9, 2, 8, 3, 10}, {4, 4, 4, 4, 4, 4}};
    m.labels = {0, 0, 0, 1, 1, 1};
    auto oc = oc_of(1, 1, 1, 2);
    NullDistribution nd = null_distribution(3, 3, oc);
    FilterReport report = rank_variables(m, oc, nd);

    std::ostringstream csv;
    write_report(report, csv, ReportFormat::Csv);
    std::istringstream in(csv.str());
    std::string header;
    std::getline(in, header);
    CHECK(header ==
          "rank,name,statistic_exact,statistic,fn,fp,direction,tie_adjusted,p_exact,p,p_bh");
    std::vector<std::string> rows;
    std::string line;
    while (std::getline(in, line)) rows.push_back(line);
    REQUIRE(rows.size() == 3);
    // rank order and exact strings survive the round trip through text
    for (std::size_t i = 0; i < rows.size(); ++i) {
        std::stringstream row(rows[i]);
        std::string rank, name, stat_exact, stat, fn, fp, dir, tie, p_exact;
        std::getline(row, rank, ',');
        std::getline(row, name, ',');
        std::getline(row, stat_exact, ',');
        std::getline(row, stat, ',');
        std::getline(row, fn, ',');
        std::getline(row, fp, ',');
        std::getline(row, dir, ',');
        std::getline(row, tie, ',');
        std::getline(row, p_exact, ',');
        CHECK(rank == std::to_string(i + 1));
        CHECK(name == report.records[i].name);
        CHECK(stat_exact == rational_str(report.records[i].statistic));
        CHECK(p_exact == rational_str(report.records[i].p));
    }

    // deterministic bytes
    std::ostringstream csv2;
    write_report(report, csv2, ReportFormat::Csv);
    CHECK(csv.str() == csv2.str());

    // truncation and jsonl row counts
    std::ostringstream top2;
    write_report(report, top2, ReportFormat::Csv, 2);
    std::size_t lines = 0;
    std::istringstream t2(top2.str());
    while (std::getline(t2, line)) ++lines;
    CHECK(lines == 3);  // header + 2 rows

    std::ostringstream jl;
    write_report(report, jl, ReportFormat::JsonLines);
    lines = 0;
    std::istringstream jin(jl.str());
    while (std::getline(jin, line)) ++lines;
    CHECK(lines == 3);

    // empty report: header only
    FilterReport empty;
    std::ostringstream eout;
    write_report(empty, eout, ReportFormat::Csv);
    CHECK(eout.str() ==
          "rank,name,statistic_exact,statistic,fn,fp,direction,tie_adjusted,p_exact,p,p_bh\n");
}

TEST_CASE("p-values are sub-uniform when labels carry no information") {
    std::mt19937 gen(99);
    std::normal_distribution<double> normal(0.0, 1.0);
    VariableMatrix m;
    m.labels.assign(18, 0);
    for (int i = 0; i < 9; ++i) m.labels[i] = 1;
    const int vars = 400;
    for (int v = 0; v < vars; ++v) {
        m.names.push_back("v" + std::to_string(v));
        std::vector<double> col;
        for (int i = 0; i < 18; ++i) col.push_back(normal(gen));
        m.columns.push_back(col);
    }
    auto oc = oc_of(1, 2, 1, 2);
    NullDistribution nd = null_distribution(9, 9, oc);
    FilterReport report = rank_variables(m, oc, nd);
    const Rational alpha(1, 20);
    int below = 0;
    for (const auto& r : report.records)
        if (r.p <= alpha) ++below;
    const double rate = static_cast<double>(below) / vars;
    CHECK(rate <= 0.05 + 3.0 * std::sqrt(0.05 * 0.95 / vars));
}

TEST_CASE("parallel ranking matches serial") {
    std::mt19937 gen(57);
    VariableMatrix m;
    m.labels = {0, 1, 0, 1, 0, 1, 0, 1};
    for (int v = 0; v < 24; ++v) {
        m.names.push_back("v" + std::to_string(v));
        std::vector<double> col;
        for (int i = 0; i < 8; ++i) col.push_back((gen() % 100000) / 1000.0);
        m.columns.push_back(col);
    }
    auto oc = oc_of(1, 1, 1, 2);
    NullDistribution nd = null_distribution(4, 4, oc);
    FilterReport serial = rank_variables(m, oc, nd, 1);
    FilterReport parallel = rank_variables(m, oc, nd, 4);
    REQUIRE(serial.records.size() == parallel.records.size());
    for (std::size_t i = 0; i < serial.records.size(); ++i) {
        CHECK(serial.records[i].name == parallel.records[i].name);
        CHECK(serial.records[i].p == parallel.records[i].p);
        CHECK(serial.records[i].rank == parallel.records[i].rank);
    }
}
