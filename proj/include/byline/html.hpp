#pragma once

// Error-recovering HTML parser. It never rejects input: stray end tags are
// dropped, unclosed elements are closed at end of input, and raw-text
// elements (script, style, textarea, title) swallow everything up to their
// matching end tag. The result is a flat node arena addressed by index.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace byline::html {

using NodeId = std::uint32_t;
inline constexpr NodeId kRoot = 0;

enum class NodeKind { document, element, text, comment };

struct Attribute {
    std::string name;   // lowercased
    std::string value;  // entity-decoded
};

struct Node {
    NodeKind kind = NodeKind::element;
    std::string tag;  // lowercased; empty for non-elements
    std::vector<Attribute> attributes;
    std::string text;  // text and comment nodes; entity-decoded for text
    NodeId parent = kRoot;
    std::vector<NodeId> children;
};

class Document {
public:
    static Document parse(std::string_view html);

    const Node& node(NodeId id) const { return nodes_.at(id); }
    std::size_t size() const { return nodes_.size(); }

    // Attribute lookup on an element; name must be lowercase.
    std::optional<std::string_view> attribute(NodeId id, std::string_view name) const;

    // Pre-order walk over elements under (and including) `from`.
    void for_each_element(const std::function<void(NodeId, const Node&)>& fn, NodeId from = kRoot) const;

    std::vector<NodeId> elements_by_tag(std::string_view tag) const;

    // Concatenated text of all descendant text nodes, no separators added.
    std::string raw_text(NodeId id) const;

    // Visible text: skips script/style/noscript/template/head content and
    // comments; block-level elements and <br> start a new line; whitespace
    // inside a line is collapsed.
    std::string visible_text(NodeId id = kRoot) const;

    // Visible text of <body>, or of the whole document when there is none.
    std::string body_text() const;

    bool is_ancestor(NodeId ancestor, NodeId node) const;

private:
    std::vector<Node> nodes_;
};

// Decodes named (common subset) and numeric character references.
std::string decode_entities(std::string_view s);

}  // namespace byline::html
