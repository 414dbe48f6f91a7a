#pragma once

#include <string>
#include <vector>

namespace vsdag {

/// Shortest-stable text form used in every CSV this project writes
/// (%.12g; "nan", "inf", "-inf" for non-finite values).
std::string format_number(double v);

/// Splits one CSV line on commas. No quoting is supported or needed.
std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace vsdag
