#include "panelhet/panel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "panelhet/errors.hpp"

namespace panelhet {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(trim(cur));
    return out;
}

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

bool parse_number(const std::string& tok, double& out) {
    if (tok.empty()) return false;
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    if (*first == '+') ++first;  // from_chars rejects a leading '+'
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

double parse_value(const std::string& tok, std::size_t line_no) {
    double v;
    if (!parse_number(tok, v) || !std::isfinite(v))
        throw NonNumericValue("'" + tok + "' at line " + std::to_string(line_no) +
                              " is not a finite number");
    return v;
}

// Sorts labels numerically when every label parses as a number, otherwise
// lexicographically; ties between distinct spellings fall back to the string.
void sort_labels(std::vector<std::string>& labels) {
    std::vector<double> nums(labels.size());
    bool all_numeric = true;
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (!parse_number(labels[i], nums[i])) {
            all_numeric = false;
            break;
        }
    if (all_numeric) {
        std::vector<std::size_t> idx(labels.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            if (nums[a] != nums[b]) return nums[a] < nums[b];
            return labels[a] < labels[b];
        });
        std::vector<std::string> out(labels.size());
        for (std::size_t i = 0; i < idx.size(); ++i) out[i] = labels[idx[i]];
        labels = std::move(out);
    } else {
        std::sort(labels.begin(), labels.end());
    }
}

struct Row {
    std::string unit, time;
    double value;
    std::size_t line_no;
};

std::vector<std::string> unique_sorted(std::vector<std::string> labels) {
    sort_labels(labels);
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    return labels;
}

PanelData assemble(const std::vector<Row>& rows) {
    std::vector<std::string> units, times;
    units.reserve(rows.size());
    times.reserve(rows.size());
    for (const auto& r : rows) {
        units.push_back(r.unit);
        times.push_back(r.time);
    }
    units = unique_sorted(std::move(units));
    times = unique_sorted(std::move(times));

    std::unordered_map<std::string, std::size_t> uidx, tidx;
    for (std::size_t i = 0; i < units.size(); ++i) uidx[units[i]] = i;
    for (std::size_t t = 0; t < times.size(); ++t) tidx[times[t]] = t;

    const std::size_t N = units.size(), T = times.size();
    std::vector<double> values(N * T, 0.0);
    std::vector<char> seen(N * T, 0);
    for (const auto& r : rows) {
        std::size_t cell = uidx[r.unit] * T + tidx[r.time];
        if (seen[cell])
            throw DuplicateCell("unit '" + r.unit + "', time '" + r.time +
                                "' appears more than once (line " +
                                std::to_string(r.line_no) + ")");
        seen[cell] = 1;
        values[cell] = r.value;
    }

    std::vector<std::string> offenders;
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t t = 0; t < T; ++t)
            if (!seen[i * T + t]) {
                offenders.push_back(units[i]);
                break;
            }
    if (!offenders.empty()) {
        std::string msg = "units missing observations:";
        std::size_t shown = std::min<std::size_t>(offenders.size(), 10);
        for (std::size_t i = 0; i < shown; ++i) msg += " " + offenders[i];
        if (offenders.size() > shown)
            msg += " (+" + std::to_string(offenders.size() - shown) + " more)";
        throw UnbalancedPanel(msg);
    }

    return PanelData{std::move(units), std::move(times), std::move(values)};
}

PanelData load_long(const std::vector<std::string>& lines) {
    auto header = split_fields(lines[0]);
    if (header.size() != 3 || lower(header[0]) != "unit" || lower(header[1]) != "time" ||
        lower(header[2]) != "value")
        throw MalformedCsv("long layout requires header 'unit,time,value', got '" +
                           lines[0] + "'");
    std::vector<Row> rows;
    rows.reserve(lines.size() - 1);
    for (std::size_t li = 1; li < lines.size(); ++li) {
        auto f = split_fields(lines[li]);
        if (f.size() != 3)
            throw MalformedCsv("expected 3 fields at line " + std::to_string(li + 1) +
                               ", got " + std::to_string(f.size()));
        if (f[0].empty() || f[1].empty())
            throw MalformedCsv("empty unit or time label at line " + std::to_string(li + 1));
        rows.push_back({f[0], f[1], parse_value(f[2], li + 1), li + 1});
    }
    if (rows.empty()) throw EmptyInput("no data rows");
    return assemble(rows);
}

PanelData load_wide(const std::vector<std::string>& lines) {
    auto header = split_fields(lines[0]);
    if (header.size() < 2 || lower(header[0]) != "unit")
        throw MalformedCsv(
            "wide layout requires header 'unit,<time labels...>', got '" + lines[0] + "'");
    std::vector<Row> rows;
    for (std::size_t li = 1; li < lines.size(); ++li) {
        auto f = split_fields(lines[li]);
        if (f.size() != header.size())
            throw MalformedCsv("expected " + std::to_string(header.size()) +
                               " fields at line " + std::to_string(li + 1) + ", got " +
                               std::to_string(f.size()));
        if (f[0].empty())
            throw MalformedCsv("empty unit label at line " + std::to_string(li + 1));
        for (std::size_t c = 1; c < f.size(); ++c)
            rows.push_back({f[0], header[c], parse_value(f[c], li + 1), li + 1});
    }
    if (rows.empty()) throw EmptyInput("no data rows");
    return assemble(rows);
}

}  // namespace

PanelData load_csv(std::istream& in, CsvLayout layout) {
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (!line.empty()) lines.push_back(line);
    }
    if (lines.empty()) throw EmptyInput("input stream is empty");
    return layout == CsvLayout::Long ? load_long(lines) : load_wide(lines);
}

PanelData load_csv_file(const std::string& path, CsvLayout layout) {
    std::ifstream in(path);
    if (!in) throw std::ios_base::failure("cannot open '" + path + "' for reading");
    return load_csv(in, layout);
}

void write_long_csv(const PanelData& p, std::ostream& out) {
    out << "unit,time,value\n";
    char buf[40];
    for (std::size_t i = 0; i < p.n_units(); ++i)
        for (std::size_t t = 0; t < p.n_times(); ++t) {
            std::snprintf(buf, sizeof buf, "%.17g", p.at(i, t));
            out << p.unit_ids[i] << ',' << p.time_ids[t] << ',' << buf << '\n';
        }
}

PanelData subpanel(const PanelData& p, TimeBlock block) {
    const std::size_t T = p.n_times();
    if (block.begin >= block.end || block.end > T)
        throw OutOfDomain("time block [" + std::to_string(block.begin) + "," +
                          std::to_string(block.end) + ") is not inside [0," +
                          std::to_string(T) + ")");
    PanelData out;
    out.unit_ids = p.unit_ids;
    out.time_ids.assign(p.time_ids.begin() + static_cast<std::ptrdiff_t>(block.begin),
                        p.time_ids.begin() + static_cast<std::ptrdiff_t>(block.end));
    const std::size_t L = block.length();
    out.values.resize(p.n_units() * L);
    for (std::size_t i = 0; i < p.n_units(); ++i)
        for (std::size_t t = 0; t < L; ++t) out.values[i * L + t] = p.at(i, block.begin + t);
    return out;
}

SplitPair split_half(const PanelData& p) {
    const std::size_t T = p.n_times();
    if (T < 2) throw PanelTooShort("half split needs T >= 2, panel has T = " + std::to_string(T));
    TimeBlock b1, b2;
    if (T % 2 == 0) {
        b1 = {0, T / 2};
        b2 = {T / 2, T};
    } else {
        std::size_t L = (T + 1) / 2;
        b1 = {0, L};
        b2 = {T - L, T};
    }
    return SplitPair{subpanel(p, b1), subpanel(p, b2), b1, b2};
}

SplitTriple split_thirds(const PanelData& p) {
    const std::size_t T = p.n_times();
    if (T < 3)
        throw PanelTooShort("third split needs T >= 3, panel has T = " + std::to_string(T));
    const std::size_t L = (T + 2) / 3;  // ceil(T/3)
    TimeBlock b1{0, L};
    TimeBlock b2{(T - L) / 2, (T - L) / 2 + L};
    TimeBlock b3{T - L, T};
    return SplitTriple{subpanel(p, b1), subpanel(p, b2), subpanel(p, b3), b1, b2, b3};
}

}  // namespace panelhet
