#include "citeaudit/xml.hpp"

#include <cctype>
#include <cstdint>

#include "citeaudit/error.hpp"

namespace citeaudit::xml {

std::string_view Node::local_name() const {
  std::string_view n = name;
  auto colon = n.find(':');
  return colon == std::string_view::npos ? n : n.substr(colon + 1);
}

std::optional<std::string> Node::attribute(std::string_view key) const {
  for (const auto& [k, v] : attributes)
    if (k == key) return v;
  return std::nullopt;
}

const Node* Node::child(std::string_view local) const {
  for (const auto& c : children)
    if (c.kind == Kind::element && c.local_name() == local) return &c;
  return nullptr;
}

std::vector<const Node*> Node::children_named(std::string_view local) const {
  std::vector<const Node*> out;
  for (const auto& c : children)
    if (c.kind == Kind::element && c.local_name() == local) out.push_back(&c);
  return out;
}

const Node* Node::find(std::string_view local) const {
  if (kind == Kind::element && local_name() == local) return this;
  for (const auto& c : children)
    if (const Node* hit = c.find(local)) return hit;
  return nullptr;
}

void Node::find_all(std::string_view local, std::vector<const Node*>& out) const {
  if (kind == Kind::element && local_name() == local) out.push_back(this);
  for (const auto& c : children) c.find_all(local, out);
}

std::string Node::all_text() const {
  if (kind == Kind::text) return text;
  std::string out;
  for (const auto& c : children) out += c.all_text();
  return out;
}

std::string Node::trimmed_text() const {
  std::string raw = all_text();
  std::string out;
  bool pending_space = false;
  for (char ch : raw) {
    if (std::isspace(static_cast<unsigned char>(ch))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(ch);
  }
  return out;
}

namespace {

class Parser {
 public:
  explicit Parser(std::string_view in) : in_(in) {}

  Node document() {
    skip_prolog();
    if (at_end() || peek() != '<') fail("expected root element");
    Node root = element();
    skip_misc();
    if (!at_end()) fail("content after root element");
    return root;
  }

 private:
  std::string_view in_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw error(errc::malformed_payload, "xml: " + what + " at offset " + std::to_string(pos_));
  }

  bool at_end() const { return pos_ >= in_.size(); }
  char peek() const { return in_[pos_]; }
  bool starts_with(std::string_view s) const { return in_.substr(pos_, s.size()) == s; }

  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
  }

  void skip_until(std::string_view terminator) {
    auto p = in_.find(terminator, pos_);
    if (p == std::string_view::npos) fail("unterminated construct");
    pos_ = p + terminator.size();
  }

  void skip_doctype() {
    // <!DOCTYPE name ... [ internal subset ]>
    pos_ += 9;
    int bracket = 0;
    while (!at_end()) {
      char c = peek();
      if (c == '[') ++bracket;
      else if (c == ']') --bracket;
      else if (c == '"' || c == '\'') {
        auto close = in_.find(c, pos_ + 1);
        if (close == std::string_view::npos) fail("unterminated literal in DOCTYPE");
        pos_ = close;
      } else if (c == '>' && bracket == 0) {
        ++pos_;
        return;
      }
      ++pos_;
    }
    fail("unterminated DOCTYPE");
  }

  void skip_misc() {
    for (;;) {
      skip_ws();
      if (starts_with("<?")) skip_until("?>");
      else if (starts_with("<!--")) skip_until("-->");
      else return;
    }
  }

  void skip_prolog() {
    if (starts_with("\xEF\xBB\xBF")) pos_ += 3;
    for (;;) {
      skip_misc();
      if (starts_with("<!DOCTYPE")) skip_doctype();
      else return;
    }
  }

  static bool name_char(char c) {
    auto u = static_cast<unsigned char>(c);
    return std::isalnum(u) || c == '_' || c == ':' || c == '-' || c == '.' || u >= 0x80;
  }

  std::string name() {
    std::size_t start = pos_;
    if (at_end()) fail("expected name");
    auto first = static_cast<unsigned char>(peek());
    if (!(std::isalpha(first) || peek() == '_' || peek() == ':' || first >= 0x80)) fail("invalid name start");
    while (!at_end() && name_char(peek())) ++pos_;
    return std::string(in_.substr(start, pos_ - start));
  }

  static void append_utf8(std::string& out, std::uint32_t cp) {
    if (cp < 0x80) {
      out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
      out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
  }

  // Expects pos_ at '&'.
  void entity(std::string& out) {
    auto semi = in_.find(';', pos_);
    if (semi == std::string_view::npos || semi - pos_ > 12) fail("bad entity reference");
    std::string_view ent = in_.substr(pos_ + 1, semi - pos_ - 1);
    pos_ = semi + 1;
    if (ent == "lt") out += '<';
    else if (ent == "gt") out += '>';
    else if (ent == "amp") out += '&';
    else if (ent == "quot") out += '"';
    else if (ent == "apos") out += '\'';
    else if (ent.size() > 1 && ent[0] == '#') {
      std::uint32_t cp = 0;
      bool hex = ent[1] == 'x' || ent[1] == 'X';
      std::string_view digits = ent.substr(hex ? 2 : 1);
      if (digits.empty()) fail("empty character reference");
      for (char d : digits) {
        int v;
        if (d >= '0' && d <= '9') v = d - '0';
        else if (hex && d >= 'a' && d <= 'f') v = d - 'a' + 10;
        else if (hex && d >= 'A' && d <= 'F') v = d - 'A' + 10;
        else fail("bad character reference");
        cp = cp * (hex ? 16 : 10) + static_cast<std::uint32_t>(v);
        if (cp > 0x10FFFF) fail("character reference out of range");
      }
      append_utf8(out, cp);
    } else {
      // Named entities from a DTD (e.g. &nbsp;) are kept verbatim; we never
      // load external DTDs.
      out += '&';
      out += ent;
      out += ';';
    }
  }

  std::string attribute_value() {
    if (at_end() || (peek() != '"' && peek() != '\'')) fail("expected quoted attribute value");
    char quote = peek();
    ++pos_;
    std::string value;
    while (!at_end() && peek() != quote) {
      if (peek() == '<') fail("'<' in attribute value");
      if (peek() == '&') entity(value);
      else value.push_back(in_[pos_++]);
    }
    if (at_end()) fail("unterminated attribute value");
    ++pos_;
    return value;
  }

  Node element() {
    ++pos_;  // '<'
    Node node;
    node.name = name();
    for (;;) {
      bool had_ws = !at_end() && std::isspace(static_cast<unsigned char>(peek()));
      skip_ws();
      if (at_end()) fail("unterminated start tag");
      if (starts_with("/>")) {
        pos_ += 2;
        return node;
      }
      if (peek() == '>') {
        ++pos_;
        break;
      }
      if (!had_ws) fail("expected whitespace before attribute");
      std::string key = name();
      skip_ws();
      if (at_end() || peek() != '=') fail("expected '=' after attribute name");
      ++pos_;
      skip_ws();
      std::string value = attribute_value();
      if (node.attribute(key)) fail("duplicate attribute " + key);
      node.attributes.emplace_back(std::move(key), std::move(value));
    }
    content(node);
    return node;
  }

  void flush_text(Node& parent, std::string& text) {
    if (text.empty()) return;
    Node t;
    t.kind = Node::Kind::text;
    t.text = std::move(text);
    parent.children.push_back(std::move(t));
    text.clear();
  }

  void content(Node& node) {
    std::string text;
    for (;;) {
      if (at_end()) fail("missing end tag for <" + node.name + ">");
      char c = peek();
      if (c == '<') {
        if (starts_with("</")) {
          flush_text(node, text);
          pos_ += 2;
          std::string closing = name();
          skip_ws();
          if (at_end() || peek() != '>') fail("malformed end tag");
          ++pos_;
          if (closing != node.name) fail("end tag </" + closing + "> does not match <" + node.name + ">");
          return;
        }
        if (starts_with("<!--")) {
          skip_until("-->");
        } else if (starts_with("<![CDATA[")) {
          auto end = in_.find("]]>", pos_ + 9);
          if (end == std::string_view::npos) fail("unterminated CDATA");
          text.append(in_.substr(pos_ + 9, end - pos_ - 9));
          pos_ = end + 3;
        } else if (starts_with("<?")) {
          skip_until("?>");
        } else {
          flush_text(node, text);
          node.children.push_back(element());
        }
      } else if (c == '&') {
        entity(text);
      } else {
        text.push_back(c);
        ++pos_;
      }
    }
  }
};

}  // namespace

Node parse(std::string_view text) { return Parser(text).document(); }

}  // namespace citeaudit::xml
