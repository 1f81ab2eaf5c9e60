#include "etc/filter.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "etc/errors.hpp"
#include "etc/parallel.hpp"

#include "json.hpp"

namespace etc {

int VariableMatrix::n1() const {
    int s = 0;
    for (int y : labels) s += y;
    return s;
}

void VariableMatrix::validate() const {
    if (names.size() != columns.size())
        throw LabelMismatch("one name per column required");
    std::set<std::string> unique(names.begin(), names.end());
    if (unique.size() != names.size()) throw LabelMismatch("variable names must be unique");
    for (const auto& col : columns) {
        if (col.size() != labels.size())
            throw LabelMismatch("all columns must have one value per labeled sample");
    }
    const int ones = n1();
    if (ones == 0 || ones == n()) throw SingleClassLabels("labels contain a single class");
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

double parse_cell(const std::string& text, std::size_t row, std::size_t col) {
    std::string s = text;
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
    if (s.empty()) throw ParseError("empty cell", row, col);
    double v = 0;
    const char* begin = s.data();
    const char* end = begin + s.size();
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end)
        throw ParseError("non-numeric cell '" + s + "'", row, col);
    if (std::isnan(v)) throw ParseError("NaN cell", row, col);
    return v;
}

int parse_label(const std::string& text, std::size_t row, std::size_t col) {
    const double v = parse_cell(text, row, col);
    if (v != 0.0 && v != 1.0) throw ParseError("label must be 0 or 1, got '" + text + "'", row, col);
    return v == 1.0 ? 1 : 0;
}

VariableMatrix load_wide(const std::filesystem::path& path, const std::string& label_column) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty file", 1, 1);
    const auto header = split_csv_line(line);
    int label_idx = -1;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == label_column) label_idx = static_cast<int>(i);
    }
    if (label_idx < 0)
        throw LabelMismatch("label column '" + label_column + "' not found in " + path.string());

    VariableMatrix m;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (static_cast<int>(i) != label_idx) m.names.push_back(header[i]);
    }
    m.columns.resize(m.names.size());

    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != header.size())
            throw ParseError("expected " + std::to_string(header.size()) + " fields, got " +
                                 std::to_string(fields.size()),
                             row, 1);
        std::size_t var = 0;
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (static_cast<int>(i) == label_idx) {
                m.labels.push_back(parse_label(fields[i], row, i + 1));
            } else {
                m.columns[var++].push_back(parse_cell(fields[i], row, i + 1));
            }
        }
    }
    m.validate();
    return m;
}

VariableMatrix load_long(const std::filesystem::path& path, const std::string& label_path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::ifstream lin(label_path);
    if (!lin) throw IoError("cannot open " + label_path);

    // Label file defines the sample order.
    std::vector<std::string> sample_ids;
    std::map<std::string, int> label_of;
    std::map<std::string, int> sample_pos;
    std::string line;
    std::size_t row = 0;
    bool first = true;
    while (std::getline(lin, line)) {
        ++row;
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (first && fields.size() >= 2 && fields[0] == "sample_id") {
            first = false;
            continue;
        }
        first = false;
        if (fields.size() != 2) throw ParseError("expected sample_id,label", row, 1);
        if (label_of.count(fields[0]))
            throw ParseError("duplicate sample_id '" + fields[0] + "'", row, 1);
        sample_pos[fields[0]] = static_cast<int>(sample_ids.size());
        sample_ids.push_back(fields[0]);
        label_of[fields[0]] = parse_label(fields[1], row, 2);
    }
    if (sample_ids.empty()) throw ParseError("no labeled samples", row, 1);

    VariableMatrix m;
    std::map<std::string, std::size_t> var_idx;
    std::vector<std::vector<char>> filled;
    row = 0;
    first = true;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (first && fields.size() >= 3 && fields[0] == "variable") {
            first = false;
            continue;
        }
        first = false;
        if (fields.size() != 3) throw ParseError("expected variable,sample_id,value", row, 1);
        auto pos = sample_pos.find(fields[1]);
        if (pos == sample_pos.end())
            throw LabelMismatch("sample_id '" + fields[1] + "' not present in label file");
        auto [it, inserted] = var_idx.try_emplace(fields[0], m.names.size());
        if (inserted) {
            m.names.push_back(fields[0]);
            m.columns.emplace_back(sample_ids.size());
            filled.emplace_back(sample_ids.size(), 0);
        }
        if (filled[it->second][pos->second])
            throw ParseError("duplicate value for variable '" + fields[0] + "', sample '" +
                                 fields[1] + "'",
                             row, 2);
        m.columns[it->second][pos->second] = parse_cell(fields[2], row, 3);
        filled[it->second][pos->second] = 1;
    }
    for (std::size_t v = 0; v < filled.size(); ++v) {
        for (std::size_t s = 0; s < sample_ids.size(); ++s) {
            if (!filled[v][s])
                throw LabelMismatch("variable '" + m.names[v] + "' missing sample '" +
                                    sample_ids[s] + "'");
        }
    }
    for (const auto& id : sample_ids) m.labels.push_back(label_of[id]);
    m.validate();
    return m;
}

}  // namespace

VariableMatrix load_matrix(const std::filesystem::path& path, MatrixFormat format,
                           const std::string& label_spec) {
    return format == MatrixFormat::CsvWide ? load_wide(path, label_spec)
                                           : load_long(path, label_spec);
}

std::vector<Rational> bh_adjust(const std::vector<Rational>& p_in) {
    std::vector<Rational> p(p_in);
    for (auto& v : p) v.canonicalize();
    const std::size_t m = p.size();
    for (const auto& v : p) {
        if (v < 0 || v > 1) throw ValueOutOfRange("p-value outside [0,1]: " + rational_str(v));
    }
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });
    std::vector<Rational> adjusted(m);
    Rational running(1);
    for (std::size_t i = m; i-- > 0;) {
        Rational q = p[order[i]] * static_cast<long>(m) / static_cast<long>(i + 1);
        if (q < running) running = q;
        adjusted[order[i]] = running;
    }
    return adjusted;
}

FilterReport rank_variables(const VariableMatrix& m, const OperatingCondition& oc,
                            const NullDistribution& nd, int workers) {
    m.validate();
    validate_oc(oc, true);
    if (nd.n0 != m.n0() || nd.n1 != m.n1() || !(nd.oc == oc))
        throw NdMismatch("null distribution computed for " + NdCache::key(nd.n0, nd.n1, nd.oc) +
                         ", matrix needs " + NdCache::key(m.n0(), m.n1(), oc));

    const std::size_t count = m.columns.size();
    std::vector<VariableRecord> records(count);
    parallel_for(count, workers, [&](std::size_t i) {
        LabeledSample sample(m.columns[i], m.labels);
        EtcEstimate est = etc_hat_conservative(sample, oc);
        VariableRecord& r = records[i];
        r.name = m.names[i];
        r.statistic = est.value;
        r.fn = est.fn;
        r.fp = est.fp;
        r.direction = est.rule.direction;
        r.tie_adjusted = est.tie_adjusted;
        r.p = nd.p_value(est.value);
    });

    std::vector<Rational> pvals(count);
    for (std::size_t i = 0; i < count; ++i) pvals[i] = records[i].p;
    const auto adjusted = bh_adjust(pvals);
    for (std::size_t i = 0; i < count; ++i) records[i].p_adjusted = adjusted[i];

    std::vector<std::size_t> order(count);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (records[a].p != records[b].p) return records[a].p < records[b].p;
        if (records[a].statistic != records[b].statistic)
            return records[a].statistic < records[b].statistic;
        return a < b;
    });

    FilterReport report;
    report.n0 = m.n0();
    report.n1 = m.n1();
    report.oc = oc;
    report.nd_id = NdCache::key(nd.n0, nd.n1, nd.oc);
    report.records.reserve(count);
    for (std::size_t rank = 0; rank < count; ++rank) {
        VariableRecord r = records[order[rank]];
        r.rank = static_cast<int>(rank) + 1;
        report.records.push_back(std::move(r));
    }
    // One shared null distribution makes p-order and statistic-order agree;
    // a violation means the lookup is broken.
    for (std::size_t i = 1; i < report.records.size(); ++i) {
        if (report.records[i].statistic < report.records[i - 1].statistic)
            throw std::logic_error("rank/statistic equivalence violated");
    }
    return report;
}

void write_report(const FilterReport& report, std::ostream& out, ReportFormat format, int top) {
    std::size_t limit = report.records.size();
    if (top > 0) limit = std::min<std::size_t>(limit, static_cast<std::size_t>(top));
    if (format == ReportFormat::Csv) {
        out << "rank,name,statistic_exact,statistic,fn,fp,direction,tie_adjusted,p_exact,p,p_bh\n";
        for (std::size_t i = 0; i < limit; ++i) {
            const auto& r = report.records[i];
            out << r.rank << ',' << r.name << ',' << rational_str(r.statistic) << ','
                << to_decimal(r.statistic) << ',' << r.fn << ',' << r.fp << ','
                << direction_str(r.direction) << ',' << (r.tie_adjusted ? "true" : "false") << ','
                << rational_str(r.p) << ',' << to_decimal(r.p) << ',' << to_decimal(r.p_adjusted)
                << '\n';
        }
    } else {
        for (std::size_t i = 0; i < limit; ++i) {
            const auto& r = report.records[i];
            nlohmann::ordered_json j;
            j["rank"] = r.rank;
            j["name"] = r.name;
            j["statistic_exact"] = rational_str(r.statistic);
            j["statistic"] = r.statistic.get_d();
            j["fn"] = r.fn;
            j["fp"] = r.fp;
            j["direction"] = direction_str(r.direction);
            j["tie_adjusted"] = r.tie_adjusted;
            j["p_exact"] = rational_str(r.p);
            j["p"] = r.p.get_d();
            j["p_bh"] = r.p_adjusted.get_d();
            out << j.dump() << '\n';
        }
    }
}

void write_report(const FilterReport& report, const std::filesystem::path& path,
                  ReportFormat format, int top) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    write_report(report, out, format, top);
    if (!out) throw IoError("write to " + path.string() + " failed");
}

}  // namespace etc
