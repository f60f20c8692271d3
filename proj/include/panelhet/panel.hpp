#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace panelhet {

// Balanced N x T panel.  values is row-major: unit i's series occupies
// values[i*T .. i*T + T).  Labels are kept as strings; loaders normalize
// ordering (numeric-aware) so that equal data always produces equal panels.
struct PanelData {
    std::vector<std::string> unit_ids;  // N labels
    std::vector<std::string> time_ids;  // T labels, strictly increasing
    std::vector<double> values;         // N*T finite reals

    std::size_t n_units() const { return unit_ids.size(); }
    std::size_t n_times() const { return time_ids.size(); }

    double at(std::size_t i, std::size_t t) const { return values[i * n_times() + t]; }
    double& at(std::size_t i, std::size_t t) { return values[i * n_times() + t]; }
};

enum class CsvLayout { Long, Wide };

// Long layout: header "unit,time,value", one observation per row.
// Wide layout: header "unit,<t1>,...,<tT>", one unit per row.
PanelData load_csv(std::istream& in, CsvLayout layout);
PanelData load_csv_file(const std::string& path, CsvLayout layout);

void write_long_csv(const PanelData& p, std::ostream& out);

// Half-open 0-based time range [begin, end).
struct TimeBlock {
    std::size_t begin;
    std::size_t end;
    std::size_t length() const { return end - begin; }
};

struct SplitPair {
    PanelData first, second;
    TimeBlock block1, block2;
};

struct SplitTriple {
    PanelData first, second, third;
    TimeBlock block1, block2, block3;
};

// Copy of the time window [block.begin, block.end).
PanelData subpanel(const PanelData& p, TimeBlock block);

// Even T: two disjoint halves.  Odd T: two overlapping blocks of length
// (T+1)/2 anchored at the start and at the end.
SplitPair split_half(const PanelData& p);

// T divisible by 3: equal consecutive blocks; otherwise three blocks of
// length ceil(T/3) anchored at start, center, end (overlap allowed).
SplitTriple split_thirds(const PanelData& p);

}  // namespace panelhet
