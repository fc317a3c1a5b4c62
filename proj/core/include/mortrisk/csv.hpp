#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mortrisk::csv {

/// Splits on a single-character delimiter. No quoting; fields are returned untrimmed.
std::vector<std::string_view> split(std::string_view line, char delimiter);

std::string_view trim(std::string_view s);

/// Shortest decimal text that parses back to exactly `v` ("nan", "inf", "-inf" for specials).
std::string format_double(double v);

std::optional<double> parse_double(std::string_view s);
std::optional<long long> parse_int(std::string_view s);

std::string join(const std::vector<std::string>& fields, char delimiter = ',');

}  // namespace mortrisk::csv
