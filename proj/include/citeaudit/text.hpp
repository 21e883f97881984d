#ifndef CITEAUDIT_TEXT_HPP
#define CITEAUDIT_TEXT_HPP

#include <string>
#include <string_view>
#include <vector>

namespace citeaudit::text {

std::string_view trim(std::string_view s);
std::string to_lower(std::string_view s);
std::vector<std::string> split(std::string_view s, char delim);
void replace_all(std::string& s, std::string_view from, std::string_view to);

/// Lowercased runs of ASCII letters/digits; everything else separates.
std::vector<std::string> alnum_tokens(std::string_view s);

/// Maps en-dash, em-dash, minus sign and non-breaking spaces to ASCII.
std::string ascii_punctuation(std::string_view s);

/// Positions where `token` occurs with no ASCII letter or digit on
/// either side.
std::vector<std::size_t> standalone_occurrences(std::string_view haystack, std::string_view token);

/// File-name safe slug: lowercase alphanumerics joined by '-'.
std::string slug(std::string_view s);

}  // namespace citeaudit::text

#endif  // CITEAUDIT_TEXT_HPP
