#pragma once

#include <string>
#include <utility>
#include <vector>

#include "qtb/harness.hpp"

namespace qtb {

// Output schema revision; documented in the README and bumped whenever a
// column is added, removed, or reordered.
inline constexpr int k_schema_version = 1;

// 17 significant digits, enough to round-trip any double; NaN spelled as the
// literal token NaN
std::string fmt_g17(double v);

extern const char* const k_record_header;

std::string records_to_csv(const std::vector<SweepPointRecord>& records);
std::string records_to_json(const std::vector<SweepPointRecord>& records);
std::vector<SweepPointRecord> parse_records_csv(const std::string& text);

struct ParetoRow {
    std::string decoder;
    double runtime_s = 0.0;
    double ler = 0.0;
    bool pareto = false;
};

// A row is Pareto iff no other row is <= in both runtime and LER with < in at
// least one.
void pareto_label(std::vector<ParetoRow>& rows);

struct SharedGrid {
    std::vector<std::pair<int, double>> keys;  // (distance, x) present in every table, sorted
    std::vector<long long> dropped;            // per-table count of rows without a counterpart
};

// Inner join of record tables on exact (distance, sweep_value) matches.
SharedGrid merge_shared_grid(const std::vector<std::vector<SweepPointRecord>>& tables);

// Generic small table for the analysis artifacts that are not record dumps.
struct Cell {
    enum class Kind { text, real, integer, unsigned_integer } kind = Kind::text;
    std::string s;
    double d = 0.0;
    long long i = 0;
    uint64_t u = 0;

    Cell(std::string v) : kind(Kind::text), s(std::move(v)) {}
    Cell(const char* v) : kind(Kind::text), s(v) {}
    Cell(double v) : kind(Kind::real), d(v) {}
    Cell(int v) : kind(Kind::integer), i(v) {}
    Cell(long long v) : kind(Kind::integer), i(v) {}
    Cell(uint64_t v) : kind(Kind::unsigned_integer), u(v) {}

    std::string render() const;
};

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    std::string to_csv() const;   // throws EmptyDataError on zero rows
    std::string to_json() const;
};

// Plain-text key/value sweep configuration plus the analysis extras.
struct SpecFile {
    SweepSpec sweep;
    GuideTable guide_storage;  // sweep.guide points here once resolved
    bool has_guide = false;
    std::string guide_table_path;
    std::string loss_map_path;
    std::string component;
    std::vector<double> levels{0.0, 0.0025, 0.005, 0.01};
    long long resamples = 2000;
    double reference = 0.0;
    bool reference_set = false;
};

// Parses `key = value` lines ('#' comments); unknown keys are configuration
// errors. Referenced files are not read here.
SpecFile parse_spec_text(const std::string& text);

// parse_spec_text plus loading loss_map / guide_table files, with relative
// paths resolved against the spec file's directory.
SpecFile load_spec_file(const std::string& path);

// QTB_SEED and QTB_THREADS override the spec file (command-line flags in turn
// override these).
void apply_env_overrides(SpecFile& sf);

std::string read_text_file(const std::string& path);

} // namespace qtb
