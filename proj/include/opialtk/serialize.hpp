#pragma once

#include <map>
#include <string>

#include "opialtk/opial.hpp"

namespace opialtk {

/// Record of one CLI invocation: command, resolved parameters, tool
/// version, seed, timestamp. Serializes to one JSON line; the timestamp is
/// the only field excluded from golden-file comparison.
struct RunManifest {
    std::string command;
    std::map<std::string, std::string> parameters;
    std::string version;
    std::uint64_t seed = 0;
    std::string timestamp;

    std::string to_json() const;
    static RunManifest from_json(const std::string& text);
};

/// Report as a single JSON object with the fixed field set:
/// theorem, regime, direction, lhs, constant, rhs_core, bound, ratio,
/// satisfied, quad_error, as_printed_flag. Non-finite numbers serialize as
/// null.
std::string report_to_json(const InequalityReport& report);

/// Same fields as one CSV row (LF terminated by the caller).
std::string report_to_csv_row(const InequalityReport& report);
std::string report_csv_header();

} // namespace opialtk
