#pragma once

#include <optional>
#include <string>

namespace pcornet {

/// Shortest decimal text that reads back to the same double; "NA" for NaN.
std::string format_number(double x);
std::string format_number(const std::optional<double>& x);

}  // namespace pcornet
