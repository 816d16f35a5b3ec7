#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hdp::csv {

/// Splits one line on commas. Fields are trimmed of surrounding whitespace
/// and one pair of surrounding double quotes. Quoted commas are not supported;
/// none of the defect corpora use them.
std::vector<std::string> split_line(std::string_view line);

std::string_view trim(std::string_view s);

/// Parses a finite double occupying the whole field.
std::optional<double> parse_double(std::string_view s);

std::string to_lower(std::string_view s);

}  // namespace hdp::csv
