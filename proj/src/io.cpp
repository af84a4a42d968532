#include "chacs/io.hpp"

#include "chacs/error.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

namespace chacs {

using nlohmann::json;

std::string format_real(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content)
{
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw std::runtime_error("failed writing " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw std::runtime_error("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
    }
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

namespace {

template <class Seq>
void append_array(std::string& out, const Seq& values)
{
    out += '[';
    bool first = true;
    for (const auto& v : values) {
        if (!first) out += ',';
        first = false;
        if constexpr (std::is_floating_point_v<std::decay_t<decltype(v)>>) {
            if (!std::isfinite(v)) throw InvalidArgument("JSON cannot carry non-finite value");
            out += format_real(v);
        } else {
            out += std::to_string(v);
        }
    }
    out += ']';
}

void append_real(std::string& out, std::string_view key, double v, bool comma = true)
{
    if (!std::isfinite(v)) throw InvalidArgument("JSON cannot carry non-finite value for " + std::string(key));
    out += '"';
    out += key;
    out += "\":";
    out += format_real(v);
    if (comma) out += ',';
}

json parse(std::string_view text, const char* what)
{
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string(what) + ": malformed JSON: " + e.what());
    }
}

template <class T>
T field(const json& doc, const char* key, const char* what)
{
    if (!doc.contains(key)) throw InvalidArgument(std::string(what) + ": missing field '" + key + "'");
    try {
        return doc.at(key).get<T>();
    } catch (const json::exception&) {
        throw InvalidArgument(std::string(what) + ": field '" + key + "' has the wrong type");
    }
}

} // namespace

std::string to_json(const MeasurementRecord& record)
{
    std::string out = "{";
    append_real(out, "a", record.params.a);
    append_real(out, "b", record.params.b);
    out += "\"lambda\":" + std::to_string(record.lambda) + ",";
    out += "\"n\":" + std::to_string(record.n) + ",";
    out += "\"m\":" + std::to_string(record.m) + ",";
    append_real(out, "x0", record.initial.x);
    append_real(out, "y0", record.initial.y);
    append_real(out, "scale", record.scale);
    out += "\"z\":";
    append_array(out, record.z);
    out += "}\n";
    return out;
}

MeasurementRecord measurement_record_from_json(std::string_view text)
{
    constexpr const char* what = "measurement record";
    const json doc = parse(text, what);
    if (!doc.is_object()) throw InvalidArgument("measurement record: expected a JSON object");
    MeasurementRecord r;
    r.params.a = field<double>(doc, "a", what);
    r.params.b = field<double>(doc, "b", what);
    r.lambda = field<std::size_t>(doc, "lambda", what);
    r.n = field<std::size_t>(doc, "n", what);
    r.m = field<std::size_t>(doc, "m", what);
    r.initial.x = field<double>(doc, "x0", what);
    r.initial.y = field<double>(doc, "y0", what);
    r.scale = field<double>(doc, "scale", what);
    r.z = field<std::vector<double>>(doc, "z", what);
    r.validate();
    return r;
}

std::string to_json(const ReconstructionResult& result)
{
    std::string out = "{\"alpha\":";
    append_array(out, result.alpha_hat);
    out += ",\"converged\":";
    out += result.converged ? "true" : "false";
    out += ",\"outer_iterations\":" + std::to_string(result.outer_iterations);
    out += ",\"objective\":";
    append_array(out, result.objective_history);
    out += "}\n";
    return out;
}

ReconstructionResult reconstruction_result_from_json(std::string_view text)
{
    constexpr const char* what = "reconstruction result";
    const json doc = parse(text, what);
    if (!doc.is_object()) throw InvalidArgument("reconstruction result: expected a JSON object");
    ReconstructionResult r;
    r.alpha_hat = field<std::vector<double>>(doc, "alpha", what);
    r.converged = field<bool>(doc, "converged", what);
    r.outer_iterations = field<int>(doc, "outer_iterations", what);
    r.objective_history = field<std::vector<double>>(doc, "objective", what);
    return r;
}

std::string to_json(const GroundTruth& truth)
{
    std::string out = "{\"n\":" + std::to_string(truth.n) + ",";
    out += "\"distribution\":\"" + std::string(to_string(truth.distribution)) + "\",";
    append_real(out, "scale", truth.scale);
    out += "\"support\":";
    append_array(out, truth.support);
    out += ",\"alpha\":";
    append_array(out, truth.alpha);
    out += "}\n";
    return out;
}

GroundTruth ground_truth_from_json(std::string_view text)
{
    constexpr const char* what = "ground truth";
    const json doc = parse(text, what);
    if (!doc.is_object()) throw InvalidArgument("ground truth: expected a JSON object");
    GroundTruth t;
    t.n = field<std::size_t>(doc, "n", what);
    t.distribution = parse_distribution(field<std::string>(doc, "distribution", what));
    t.scale = field<double>(doc, "scale", what);
    t.support = field<std::vector<std::size_t>>(doc, "support", what);
    t.alpha = field<std::vector<double>>(doc, "alpha", what);
    if (t.alpha.size() != t.n) throw DimensionMismatch("ground truth: alpha length does not match n");
    return t;
}

} // namespace chacs
