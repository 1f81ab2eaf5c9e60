#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "etc/errors.hpp"
#include "etc/estimator.hpp"
#include "etc/filter.hpp"
#include "etc/nulldist.hpp"
#include "etc/simbench.hpp"

namespace fs = std::filesystem;

namespace {

struct OcFlags {
    std::string c0 = "1";
    std::string c1 = "1";
    std::string pi1 = "0.5";

    void attach(CLI::App* cmd) {
        cmd->add_option("--c0", c0, "cost of misclassifying a negative (decimal or p/q)");
        cmd->add_option("--c1", c1, "cost of misclassifying a positive (decimal or p/q)");
        cmd->add_option("--pi1", pi1, "population share of positives (decimal or p/q)");
    }
    etc::OperatingCondition parse() const { return etc::OperatingCondition::parse(c0, c1, pi1); }
};

std::string default_cache_dir() {
    const char* env = std::getenv("ETC_CACHE_DIR");
    return env ? env : "";
}

std::vector<std::string> read_lines(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw etc::IoError("cannot open " + path.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) lines.push_back(line);
    }
    return lines;
}

bool parse_double(const std::string& s, double& out) {
    try {
        std::size_t pos = 0;
        out = std::stod(s, &pos);
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
        return pos == s.size();
    } catch (...) {
        return false;
    }
}

etc::LabeledSample read_test_input(const fs::path& data, const std::string& labels_path) {
    std::vector<double> values;
    std::vector<int> labels;
    auto lines = read_lines(data);
    if (labels_path.empty()) {
        // two comma-separated columns: value,label (header row optional)
        std::size_t row = 0;
        for (const auto& line : lines) {
            ++row;
            auto comma = line.find(',');
            if (comma == std::string::npos)
                throw etc::ParseError("expected value,label", row, 1);
            double v, y;
            if (!parse_double(line.substr(0, comma), v) ||
                !parse_double(line.substr(comma + 1), y)) {
                if (row == 1) continue;  // header
                throw etc::ParseError("non-numeric row '" + line + "'", row, 1);
            }
            if (y != 0.0 && y != 1.0) throw etc::ParseError("label must be 0 or 1", row, 2);
            values.push_back(v);
            labels.push_back(y == 1.0 ? 1 : 0);
        }
    } else {
        auto label_lines = read_lines(labels_path);
        std::size_t row = 0;
        for (const auto& line : lines) {
            ++row;
            double v;
            if (!parse_double(line, v)) {
                if (row == 1) continue;
                throw etc::ParseError("non-numeric value '" + line + "'", row, 1);
            }
            values.push_back(v);
        }
        row = 0;
        for (const auto& line : label_lines) {
            ++row;
            double y;
            if (!parse_double(line, y)) {
                if (row == 1) continue;
                throw etc::ParseError("non-numeric label '" + line + "'", row, 1);
            }
            if (y != 0.0 && y != 1.0) throw etc::ParseError("label must be 0 or 1", row, 1);
            labels.push_back(y == 1.0 ? 1 : 0);
        }
        if (values.size() != labels.size())
            throw etc::LabelMismatch("value and label files disagree on sample count");
    }
    return etc::LabeledSample(std::move(values), std::move(labels));
}

int cmd_test(const fs::path& data, const std::string& labels_path, const OcFlags& ocf,
             const std::string& cache_dir) {
    const etc::OperatingCondition oc = etc::validate_oc(ocf.parse(), true);
    etc::LabeledSample sample = read_test_input(data, labels_path);
    if (sample.n0() == 0 || sample.n1() == 0)
        throw etc::SingleClassSample("input contains a single class");

    etc::EtcEstimate est = etc::etc_hat_conservative(sample, oc);
    etc::NdCache cache{fs::path(cache_dir)};
    const etc::NullDistribution& nd = cache.get(sample.n0(), sample.n1(), oc);
    const etc::Rational p = nd.p_value(est.value);

    std::vector<double> sorted(sample.values);
    std::sort(sorted.begin(), sorted.end());

    nlohmann::ordered_json j;
    j["n0"] = sample.n0();
    j["n1"] = sample.n1();
    j["statistic"] = est.value.get_d();
    j["statistic_exact"] = etc::rational_str(est.value);
    j["direction"] = etc::direction_str(est.rule.direction);
    j["threshold"] = sorted[est.rule.threshold_index - 1];
    j["threshold_index"] = est.rule.threshold_index;
    j["fn"] = est.fn;
    j["fp"] = est.fp;
    j["tie_adjusted"] = est.tie_adjusted;
    j["p"] = p.get_d();
    j["p_exact"] = etc::rational_str(p);
    std::cout << j.dump() << "\n";
    return 0;
}

int cmd_nulldist(int n0, int n1, const OcFlags& ocf, const fs::path& out,
                 const std::string& cache_dir) {
    const etc::OperatingCondition oc = etc::validate_oc(ocf.parse(), true);
    etc::NdCache cache{fs::path(cache_dir)};
    const etc::NullDistribution& nd = cache.get(n0, n1, oc);
    std::ofstream os(out, std::ios::binary | std::ios::trunc);
    if (!os) throw etc::IoError("cannot open " + out.string() + " for writing");
    nd.write_csv(os);
    if (!os) throw etc::IoError("write to " + out.string() + " failed");
    std::cerr << "wrote " << out.string() << " (" << nd.support.size() << " support points, total "
              << nd.total.get_str() << ")\n";
    return 0;
}

int cmd_filter(const fs::path& data, const std::string& format, const std::string& label_column,
               const std::string& labels_path, const OcFlags& ocf, const std::string& cache_dir,
               const fs::path& out, const std::string& out_format, int top,
               const std::string& adjust, int workers) {
    const etc::OperatingCondition oc = etc::validate_oc(ocf.parse(), true);
    const etc::MatrixFormat mf =
        format == "long" ? etc::MatrixFormat::CsvLong : etc::MatrixFormat::CsvWide;
    const std::string label_spec = mf == etc::MatrixFormat::CsvWide ? label_column : labels_path;
    etc::VariableMatrix m = etc::load_matrix(data, mf, label_spec);

    etc::NdCache cache{fs::path(cache_dir)};
    const etc::NullDistribution& nd = cache.get(m.n0(), m.n1(), oc);
    etc::FilterReport report = etc::rank_variables(m, oc, nd, workers);

    const etc::Rational alpha(1, 20);
    std::size_t raw = 0, adjusted = 0;
    for (const auto& r : report.records) {
        if (r.p <= alpha) ++raw;
        if (r.p_adjusted <= alpha) ++adjusted;
    }
    if (adjust == "none") {
        for (auto& r : report.records) r.p_adjusted = r.p;
    }
    etc::write_report(report, out,
                      out_format == "jsonl" ? etc::ReportFormat::JsonLines
                                            : etc::ReportFormat::Csv,
                      top);
    std::cout << "variables=" << report.records.size() << " p<=0.05 raw=" << raw
              << " bh=" << adjusted << "\n";
    return 0;
}

std::vector<double> parse_grid(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        double v;
        if (!parse_double(tok, v)) throw etc::InvalidGridPoint("bad grid value '" + tok + "'");
        out.push_back(v);
    }
    return out;
}

etc::StudyConfig desk_config(etc::Study study) {
    etc::StudyConfig cfg;
    cfg.study = study;
    cfg.axis1 = {0.0, 0.5, 1.0, 1.5, 2.0, 2.5};
    switch (study) {
        case etc::Study::A: cfg.axis2 = {50}; break;
        case etc::Study::B: cfg.axis2 = {0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0}; break;
        case etc::Study::C: cfg.axis2 = {0.0, 0.1, 0.2, 0.3}; break;
        case etc::Study::D:
            cfg.axis2 = {0.35355339059327373, 0.5, 0.7071067811865476, 1.0,
                         1.4142135623730951, 2.0, 2.8284271247461903};
            break;
    }
    return cfg;
}

int cmd_simulate(const std::string& study_name, std::uint64_t seed, const fs::path& outdir,
                 const std::string& scale, int signal, int noise, int reps, int n0, int n1,
                 const std::string& axis1, const std::string& axis2, const OcFlags& ocf,
                 const std::string& cache_dir, int workers) {
    etc::StudyConfig cfg = desk_config(etc::parse_study(study_name));
    cfg.oc = etc::validate_oc(ocf.parse(), true);
    cfg.seed = seed;
    if (scale == "full") {
        cfg.signal_count = 1000;
        cfg.noise_count = 99000;
        cfg.n0 = cfg.n1 = 50;
        if (cfg.study == etc::Study::A) cfg.axis2 = {100};
    }
    if (signal > 0) cfg.signal_count = signal;
    if (noise > 0) cfg.noise_count = noise;
    if (reps > 0) cfg.replications = reps;
    if (n0 > 0) cfg.n0 = n0;
    if (n1 > 0) cfg.n1 = n1;
    if (!axis1.empty()) cfg.axis1 = parse_grid(axis1);
    if (!axis2.empty()) cfg.axis2 = parse_grid(axis2);
    cfg.validate();

    etc::NdCache cache{fs::path(cache_dir)};
    etc::FilteringPerformanceGrid grid = etc::run_study(cfg, cache, workers);

    fs::create_directories(outdir);
    const fs::path out = outdir / ("study_" + etc::study_str(cfg.study) + ".csv");
    std::ofstream os(out, std::ios::binary | std::ios::trunc);
    if (!os) throw etc::IoError("cannot open " + out.string() + " for writing");
    etc::write_study_csv(grid, os);
    std::cout << "wrote " << out.string() << "\n";
    return 0;
}

int cmd_bench(int n_min, int n_max, const std::string& memo, const fs::path& out) {
    const etc::OperatingCondition oc(etc::Rational(1), etc::Rational(2), etc::Rational(1, 2));
    std::ostringstream csv;
    csv << "n0,n1,memo,seconds,recursion_calls\n";
    for (int k = n_min; k <= n_max; ++k) {
        for (const char* mode : {"on", "off"}) {
            if (memo != "both" && memo != mode) continue;
            etc::CountingEngine engine(k, k, oc, std::string(mode) == "on");
            const auto t0 = std::chrono::steady_clock::now();
            etc::NullDistribution nd = engine.distribution();
            const auto t1 = std::chrono::steady_clock::now();
            const double secs = std::chrono::duration<double>(t1 - t0).count();
            csv << k << ',' << k << ',' << mode << ',' << etc::to_decimal(secs) << ','
                << engine.recursion_calls() << '\n';
            std::cout << "n0=n1=" << k << " memo=" << mode << " " << etc::to_decimal(secs)
                      << " s (" << nd.support.size() << " support points)\n";
        }
    }
    if (!out.empty()) {
        std::ofstream os(out, std::ios::binary | std::ios::trunc);
        if (!os) throw etc::IoError("cannot open " + out.string() + " for writing");
        os << csv.str();
    }
    return 0;
}

int run(int argc, char** argv) {
    CLI::App app{"Exact threshold-separability testing and variable filtering"};
    app.require_subcommand(1);

    // test
    auto* test = app.add_subcommand("test", "test one variable and report statistic and p-value");
    std::string test_data, test_labels;
    OcFlags test_oc;
    std::string test_cache = default_cache_dir();
    test->add_option("--data", test_data, "CSV with value,label columns (or values only)")
        ->required();
    test->add_option("--labels", test_labels, "separate label file (one 0/1 per line)");
    test_oc.attach(test);
    test->add_option("--cache-dir", test_cache, "null distribution cache directory");

    // nulldist
    auto* ndc = app.add_subcommand("nulldist", "compute and export an exact null distribution");
    int nd_n0 = 0, nd_n1 = 0;
    OcFlags nd_oc;
    std::string nd_out, nd_cache = default_cache_dir();
    ndc->add_option("--n0", nd_n0, "number of negatives")->required();
    ndc->add_option("--n1", nd_n1, "number of positives")->required();
    nd_oc.attach(ndc);
    ndc->add_option("--out", nd_out, "output CSV path")->required();
    ndc->add_option("--cache-dir", nd_cache, "null distribution cache directory");

    // filter
    auto* flt = app.add_subcommand("filter", "rank the variables of a data matrix");
    std::string f_data, f_format = "wide", f_label_col = "label", f_labels;
    std::string f_out, f_out_format = "csv", f_adjust = "bh", f_cache = default_cache_dir();
    int f_top = 0, f_workers = 1;
    OcFlags f_oc;
    flt->add_option("--data", f_data, "matrix CSV")->required();
    flt->add_option("--matrix-format", f_format, "wide or long")
        ->check(CLI::IsMember({"wide", "long"}));
    flt->add_option("--label-column", f_label_col, "label column name (wide format)");
    flt->add_option("--labels", f_labels, "label file (long format)");
    f_oc.attach(flt);
    flt->add_option("--cache-dir", f_cache, "null distribution cache directory");
    flt->add_option("--out", f_out, "report output path")->required();
    flt->add_option("--format", f_out_format, "report format")
        ->check(CLI::IsMember({"csv", "jsonl"}));
    flt->add_option("--top", f_top, "write only the top K rows");
    flt->add_option("--adjust", f_adjust, "multiplicity adjustment")
        ->check(CLI::IsMember({"none", "bh"}));
    flt->add_option("--workers", f_workers, "parallel workers");

    // simulate
    auto* sim = app.add_subcommand("simulate", "run a simulation study");
    std::string s_study, s_scale = "desk", s_axis1, s_axis2, s_cache = default_cache_dir();
    std::string s_out;
    std::uint64_t s_seed = 1;
    int s_signal = 0, s_noise = 0, s_reps = 0, s_n0 = 0, s_n1 = 0, s_workers = 1;
    OcFlags s_oc;
    sim->add_option("--study", s_study, "A, B, C or D")->required();
    sim->add_option("--seed", s_seed, "RNG seed");
    sim->add_option("--out", s_out, "output directory")->required();
    sim->add_option("--scale", s_scale, "desk or full")->check(CLI::IsMember({"desk", "full"}));
    sim->add_option("--signal", s_signal, "signal variable count override");
    sim->add_option("--noise", s_noise, "noise variable count override");
    sim->add_option("--reps", s_reps, "replication count override");
    sim->add_option("--n0", s_n0, "negatives per sample override");
    sim->add_option("--n1", s_n1, "positives per sample override");
    sim->add_option("--axis1", s_axis1, "comma-separated first-axis grid");
    sim->add_option("--axis2", s_axis2, "comma-separated second-axis grid");
    s_oc.attach(sim);
    sim->add_option("--cache-dir", s_cache, "null distribution cache directory");
    sim->add_option("--workers", s_workers, "parallel workers");

    // bench
    auto* bench = app.add_subcommand("bench", "time null distribution computation");
    int b_min = 6, b_max = 12;
    std::string b_memo = "both", b_out;
    bench->add_option("--n-min", b_min, "smallest per-class size");
    bench->add_option("--n-max", b_max, "largest per-class size");
    bench->add_option("--memo", b_memo, "on, off or both")
        ->check(CLI::IsMember({"on", "off", "both"}));
    bench->add_option("--out", b_out, "timings CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (test->parsed()) return cmd_test(test_data, test_labels, test_oc, test_cache);
    if (ndc->parsed()) return cmd_nulldist(nd_n0, nd_n1, nd_oc, nd_out, nd_cache);
    if (flt->parsed())
        return cmd_filter(f_data, f_format, f_label_col, f_labels, f_oc, f_cache, f_out,
                          f_out_format, f_top, f_adjust, f_workers);
    if (sim->parsed())
        return cmd_simulate(s_study, s_seed, s_out, s_scale, s_signal, s_noise, s_reps, s_n0,
                            s_n1, s_axis1, s_axis2, s_oc, s_cache, s_workers);
    if (bench->parsed()) return cmd_bench(b_min, b_max, b_memo, b_out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const etc::DegenerateOperatingCondition& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const etc::PartitionSumMismatch& e) {
        std::cerr << "internal consistency failure: " << e.what() << "\n";
        return 4;
    } catch (const etc::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
