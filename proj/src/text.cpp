#include "citeaudit/text.hpp"

#include <cctype>

namespace citeaudit::text {

namespace {
bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }
}  // namespace

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::vector<std::string> split(std::string_view s, char delim) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    auto p = s.find(delim, start);
    if (p == std::string_view::npos) {
      out.emplace_back(s.substr(start));
      return out;
    }
    out.emplace_back(s.substr(start, p - start));
    start = p + 1;
  }
}

void replace_all(std::string& s, std::string_view from, std::string_view to) {
  if (from.empty()) return;
  std::size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
}

std::vector<std::string> alnum_tokens(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (is_alnum(c)) {
      cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::string ascii_punctuation(std::string_view s) {
  std::string out(s);
  replace_all(out, "\xE2\x80\x93", "-");  // en dash
  replace_all(out, "\xE2\x80\x94", "-");  // em dash
  replace_all(out, "\xE2\x88\x92", "-");  // minus sign
  replace_all(out, "\xE2\x80\x90", "-");  // hyphen
  replace_all(out, "\xC2\xA0", " ");      // nbsp
  return out;
}

std::vector<std::size_t> standalone_occurrences(std::string_view haystack, std::string_view token) {
  std::vector<std::size_t> hits;
  if (token.empty()) return hits;
  std::size_t pos = 0;
  while ((pos = haystack.find(token, pos)) != std::string_view::npos) {
    bool left_ok = pos == 0 || !is_alnum(haystack[pos - 1]);
    std::size_t end = pos + token.size();
    bool right_ok = end >= haystack.size() || !is_alnum(haystack[end]);
    if (left_ok && right_ok) hits.push_back(pos);
    ++pos;
  }
  return hits;
}

std::string slug(std::string_view s) {
  std::string out;
  for (const auto& tok : alnum_tokens(s)) {
    if (!out.empty()) out.push_back('-');
    out += tok;
  }
  return out.empty() ? std::string("unnamed") : out;
}

}  // namespace citeaudit::text
