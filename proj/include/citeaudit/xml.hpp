#ifndef CITEAUDIT_XML_HPP
#define CITEAUDIT_XML_HPP

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

// Small non-validating XML reader for metadata payloads (JATS, PAM).
// Checks well-formedness (tag balance, attribute syntax, entities) and
// builds an in-memory tree. DOCTYPE declarations are skipped, external
// entities are never resolved.
namespace citeaudit::xml {

struct Node {
  enum class Kind { element, text };

  Kind kind = Kind::element;
  std::string name;  // qualified name for elements, empty for text
  std::vector<std::pair<std::string, std::string>> attributes;
  std::vector<Node> children;
  std::string text;  // text nodes only

  std::string_view local_name() const;
  std::optional<std::string> attribute(std::string_view name) const;

  /// First direct element child whose local name matches.
  const Node* child(std::string_view local) const;
  std::vector<const Node*> children_named(std::string_view local) const;

  /// Depth-first search (including this node) by local name.
  const Node* find(std::string_view local) const;
  void find_all(std::string_view local, std::vector<const Node*>& out) const;

  /// Concatenated text of the subtree in document order.
  std::string all_text() const;
  /// all_text() with whitespace runs collapsed and ends trimmed.
  std::string trimmed_text() const;
};

/// Throws citeaudit::error(malformed_payload) when the input is not
/// well-formed. Returns the document element.
Node parse(std::string_view text);

}  // namespace citeaudit::xml

#endif  // CITEAUDIT_XML_HPP
