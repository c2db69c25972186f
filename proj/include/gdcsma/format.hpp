#ifndef GDCSMA_FORMAT_HPP
#define GDCSMA_FORMAT_HPP

#include <span>
#include <string>
#include <vector>

namespace gdcsma {

/// IEEE double with 12 significant digits (printf "%.12g").
std::string format_double(double value);

/// Values joined with `sep` using format_double.
std::string join_doubles(std::span<const double> values, const std::string& sep = " ");

/// Comma-separated list of doubles: "0.25" or "0.1,0.2,0.3". Throws std::invalid_argument.
std::vector<double> parse_double_list(const std::string& text);

}  // namespace gdcsma

#endif  // GDCSMA_FORMAT_HPP
