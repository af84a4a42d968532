#pragma once

#include "chacs/dictionary.hpp"
#include "chacs/irnls.hpp"
#include "chacs/slave.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace chacs {

/// 17 significant digits ("%.17g"); infinities as "inf" / "-inf", NaN as "nan".
std::string format_real(double v);

/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

/// {"a","b","lambda","n","m","x0","y0","scale","z":[...]}
std::string to_json(const MeasurementRecord& record);
MeasurementRecord measurement_record_from_json(std::string_view text);

/// {"alpha":[...],"converged","outer_iterations","objective":[...]}
std::string to_json(const ReconstructionResult& result);
ReconstructionResult reconstruction_result_from_json(std::string_view text);

/// Ground truth kept next to a record so a reconstruction can be scored.
struct GroundTruth {
    std::size_t n = 0;
    Distribution distribution = Distribution::Gaussian;
    double scale = 1.0;
    std::vector<std::size_t> support;
    std::vector<double> alpha;
};

std::string to_json(const GroundTruth& truth);
GroundTruth ground_truth_from_json(std::string_view text);

} // namespace chacs
