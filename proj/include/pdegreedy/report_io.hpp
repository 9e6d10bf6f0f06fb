#pragma once

#include <string>

#include "json.hpp"
#include "pdegreedy/functionals.hpp"

namespace pdegreedy {

inline constexpr const char* kToolName = "pdegreedy";
inline constexpr const char* kToolVersion = "0.1.0";

/// Writes via a temp file in the same directory plus rename, so readers
/// never observe partial output.
void atomic_write_text(const std::string& path, const std::string& content);

/// 17 significant digits, '.' decimal separator, round-trip exact.
std::string csv_number(double v);

nlohmann::ordered_json functional_to_json(const Functional& f);

std::string nu_string(const RadialKernel& kernel);
nlohmann::ordered_json kernel_to_json(const RadialKernel& kernel);

}  // namespace pdegreedy
