#include "opialtk/serialize.hpp"

#include <cmath>

#include "json.hpp"
#include "opialtk/errors.hpp"
#include "opialtk/util.hpp"

namespace opialtk {

namespace {

nlohmann::json number_or_null(double v) {
    if (!std::isfinite(v)) return nullptr;
    return v;
}

} // namespace

std::string RunManifest::to_json() const {
    nlohmann::json j;
    j["command"] = command;
    j["parameters"] = parameters;
    j["version"] = version;
    j["seed"] = seed;
    j["timestamp"] = timestamp;
    return j.dump();
}

RunManifest RunManifest::from_json(const std::string& text) {
    RunManifest m;
    try {
        const auto j = nlohmann::json::parse(text);
        m.command = j.at("command").get<std::string>();
        m.parameters = j.at("parameters").get<std::map<std::string, std::string>>();
        m.version = j.at("version").get<std::string>();
        m.seed = j.at("seed").get<std::uint64_t>();
        m.timestamp = j.at("timestamp").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad run manifest: ") + e.what());
    }
    return m;
}

std::string report_to_json(const InequalityReport& report) {
    nlohmann::json j;
    j["theorem"] = report.theorem;
    j["regime"] = to_string(report.regime.tag);
    j["direction"] = to_string(report.regime.direction);
    j["lhs"] = number_or_null(report.lhs);
    j["constant"] = number_or_null(report.constant);
    j["rhs_core"] = number_or_null(report.rhs_core);
    j["bound"] = number_or_null(report.bound);
    j["ratio"] = number_or_null(report.ratio);
    j["satisfied"] = report.satisfied;
    j["quad_error"] = number_or_null(report.quad_error);
    j["as_printed_flag"] = report.as_printed_flag;
    return j.dump();
}

std::string report_csv_header() {
    return "theorem,regime,direction,lhs,constant,rhs_core,bound,ratio,satisfied,quad_error,"
           "as_printed_flag";
}

std::string report_to_csv_row(const InequalityReport& report) {
    std::string row;
    row += report.theorem;
    row += ',';
    row += to_string(report.regime.tag);
    row += ',';
    row += to_string(report.regime.direction);
    for (double v : {report.lhs, report.constant, report.rhs_core, report.bound, report.ratio}) {
        row += ',';
        row += format_double(v);
    }
    row += report.satisfied ? ",true" : ",false";
    row += ',';
    row += format_double(report.quad_error);
    row += report.as_printed_flag ? ",true" : ",false";
    return row;
}

} // namespace opialtk
