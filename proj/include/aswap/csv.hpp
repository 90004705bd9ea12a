#pragma once

#include <string>
#include <vector>

namespace aswap {

/// 15 significant digits, '.' decimal, no locale surprises.
std::string format_double(double v);

/// Comma-separated with a header row; cells are preformatted strings.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

}  // namespace aswap
