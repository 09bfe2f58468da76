#include "gendiff/report.hpp"

#include <json.hpp>

#include <ostream>
#include <sstream>

namespace gendiff {

bool Report::pass() const {
    for (const auto& r : rows)
        if (!r.pass) return false;
    return true;
}

void Report::add(ReportRow row) { rows.push_back(std::move(row)); }

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

} // namespace

std::string Report::canonical_body() const {
    std::ostringstream os;
    os << "id,estimate,std_error,target,gap,tolerance,pass,note\n";
    for (const auto& r : rows) {
        os << r.id << ',' << fmt(r.estimate) << ',' << fmt(r.std_error) << ','
           << fmt(r.target) << ',' << fmt(r.gap) << ',' << fmt(r.tolerance) << ','
           << (r.pass ? "PASS" : "FAIL") << ',' << r.note << '\n';
    }
    return os.str();
}

void Report::write_csv(std::ostream& os, bool include_metadata) const {
    if (include_metadata) {
        os << "# suite=" << suite << " seed=" << seed << " version=" << version
           << " wall_seconds=" << wall_seconds << " timestamp=" << timestamp << '\n';
    }
    os << canonical_body();
}

void Report::write_json(std::ostream& os) const {
    nlohmann::json j;
    j["suite"] = suite;
    j["seed"] = seed;
    j["pass"] = pass();
    j["metadata"] = {{"version", version},
                     {"wall_seconds", wall_seconds},
                     {"timestamp", timestamp}};
    j["rows"] = nlohmann::json::array();
    for (const auto& r : rows) {
        j["rows"].push_back({{"id", r.id},
                             {"estimate", r.estimate},
                             {"std_error", r.std_error},
                             {"target", r.target},
                             {"gap", r.gap},
                             {"tolerance", r.tolerance},
                             {"pass", r.pass},
                             {"note", r.note}});
    }
    os << j.dump(2) << '\n';
}

} // namespace gendiff
