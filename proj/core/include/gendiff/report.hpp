#ifndef GENDIFF_REPORT_HPP
#define GENDIFF_REPORT_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace gendiff {

struct ReportRow {
    std::string id;
    double estimate = 0.0;
    double std_error = 0.0;
    double target = 0.0;
    double gap = 0.0;
    double tolerance = 0.0; // the gap bound this row was judged against
    bool pass = false;
    std::string note;
};

/// Machine-readable result container; JSON is the machine contract, CSV the
/// plotting one. Timestamps and wall times live in the metadata block so that
/// reports stay byte-comparable modulo that block.
struct Report {
    std::string suite;
    std::uint64_t seed = 0;
    std::vector<ReportRow> rows;
    std::string version;
    double wall_seconds = 0.0;
    std::string timestamp;

    bool pass() const;
    void add(ReportRow row);
    void write_csv(std::ostream& os, bool include_metadata = true) const;
    void write_json(std::ostream& os) const;
    /// Rows only, fixed formatting: the determinism contract.
    std::string canonical_body() const;
};

} // namespace gendiff

#endif
