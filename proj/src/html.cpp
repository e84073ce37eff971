#include "byline/html.hpp"

#include "byline/text.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdlib>
#include <unordered_map>

namespace byline::html {

namespace {

bool is_ascii_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool is_ascii_alnum(char c) { return is_ascii_alpha(c) || (c >= '0' && c <= '9'); }
bool is_html_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f'; }

std::string ascii_lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
}

template <std::size_t N>
bool one_of(std::string_view tag, const std::array<std::string_view, N>& set) {
    return std::find(set.begin(), set.end(), tag) != set.end();
}

constexpr std::array<std::string_view, 16> kVoid{"area", "base",  "br",    "col",   "embed", "hr",
                                                  "img",  "input", "link",  "meta",  "param", "source",
                                                  "track", "wbr", "basefont", "keygen"};
constexpr std::array<std::string_view, 8> kRawText{"script", "style",    "textarea", "title",
                                                    "xmp",    "iframe", "noembed",  "noframes"};
constexpr std::array<std::string_view, 26> kClosesParagraph{
    "address", "article", "aside",  "blockquote", "details", "div",    "dl",      "fieldset", "figure",
    "footer",  "form",    "h1",     "h2",         "h3",      "h4",     "h5",      "h6",       "header",
    "hr",      "main",    "nav",    "ol",         "p",       "pre",    "section", "ul"};
constexpr std::array<std::string_view, 10> kScopeBoundary{"html",   "body",   "td",       "th",     "table",
                                                          "caption", "button", "template", "object", "marquee"};
constexpr std::array<std::string_view, 37> kBlock{
    "address", "article", "aside",  "blockquote", "br",      "dd",     "details", "dialog", "div",
    "dl",      "dt",      "figcaption", "figure", "footer",  "form",   "h1",      "h2",     "h3",
    "h4",      "h5",      "h6",     "header",     "hr",      "li",     "main",    "nav",    "ol",
    "p",       "pre",     "section", "table",     "tr",      "td",     "th",      "ul",     "summary",
    "caption"};
constexpr std::array<std::string_view, 6> kInvisible{"script", "style", "noscript", "template", "head", "title"};

const std::unordered_map<std::string_view, char32_t>& named_entities() {
    static const std::unordered_map<std::string_view, char32_t> table = [] {
        std::unordered_map<std::string_view, char32_t> t{
            {"amp", U'&'},        {"lt", U'<'},         {"gt", U'>'},         {"quot", U'"'},
            {"apos", U'\''},      {"nbsp", U'\u00A0'},  {"copy", U'©'},  {"reg", U'®'},
            {"trade", U'™'}, {"hellip", U'…'}, {"mdash", U'—'}, {"ndash", U'–'},
            {"lsquo", U'‘'}, {"rsquo", U'’'}, {"sbquo", U'‚'}, {"ldquo", U'“'},
            {"rdquo", U'”'}, {"bdquo", U'„'}, {"laquo", U'«'}, {"raquo", U'»'},
            {"middot", U'·'}, {"bull", U'•'}, {"times", U'×'}, {"divide", U'÷'},
            {"euro", U'€'},  {"pound", U'£'}, {"yen", U'¥'},   {"cent", U'¢'},
            {"sect", U'§'},  {"para", U'¶'},  {"deg", U'°'},   {"plusmn", U'±'},
            {"shy", U'\u00AD'},   {"thinsp", U'\u2009'}, {"ensp", U'\u2002'}, {"emsp", U'\u2003'},
            {"zwnj", U'\u200C'},  {"zwj", U'\u200D'},   {"lrm", U'\u200E'},   {"rlm", U'\u200F'},
            {"iexcl", U'¡'}, {"iquest", U'¿'}, {"ordf", U'ª'}, {"ordm", U'º'},
        };
        // Latin-1 letters U+00C0..U+00FF in code point order (x marks the
        // two non-letters, times and divide, already listed above).
        static constexpr std::array<std::string_view, 64> latin1{
            "Agrave", "Aacute", "Acirc",  "Atilde", "Auml",   "Aring",  "AElig",  "Ccedil",
            "Egrave", "Eacute", "Ecirc",  "Euml",   "Igrave", "Iacute", "Icirc",  "Iuml",
            "ETH",    "Ntilde", "Ograve", "Oacute", "Ocirc",  "Otilde", "Ouml",   "x",
            "Oslash", "Ugrave", "Uacute", "Ucirc",  "Uuml",   "Yacute", "THORN",  "szlig",
            "agrave", "aacute", "acirc",  "atilde", "auml",   "aring",  "aelig",  "ccedil",
            "egrave", "eacute", "ecirc",  "euml",   "igrave", "iacute", "icirc",  "iuml",
            "eth",    "ntilde", "ograve", "oacute", "ocirc",  "otilde", "ouml",   "x",
            "oslash", "ugrave", "uacute", "ucirc",  "uuml",   "yacute", "thorn",  "yuml"};
        for (std::size_t i = 0; i < latin1.size(); ++i) {
            if (latin1[i] != "x") t.emplace(latin1[i], static_cast<char32_t>(0xC0 + i));
        }
        return t;
    }();
    return table;
}

// Legacy references browsers accept without the trailing semicolon.
constexpr std::array<std::string_view, 6> kSemicolonOptional{"amp", "lt", "gt", "quot", "nbsp", "copy"};

void append_cp(std::string& out, char32_t c) { out += text::to_utf8(std::u32string_view(&c, 1)); }

class TreeBuilder {
public:
    explicit TreeBuilder(std::vector<Node>& nodes) : nodes_(nodes) {
        nodes_.push_back(Node{NodeKind::document, {}, {}, {}, kRoot, {}});
        stack_.push_back(kRoot);
    }

    void text(std::string s) {
        if (s.empty()) return;
        const NodeId parent = stack_.back();
        auto& kids = nodes_[parent].children;
        if (!kids.empty() && nodes_[kids.back()].kind == NodeKind::text) {
            nodes_[kids.back()].text += s;
            return;
        }
        add(Node{NodeKind::text, {}, {}, std::move(s), parent, {}});
    }

    void comment(std::string s) { add(Node{NodeKind::comment, {}, {}, std::move(s), stack_.back(), {}}); }

    // Returns the new element id.
    NodeId start(std::string tag, std::vector<Attribute> attrs, bool self_closing) {
        implicit_close(tag);
        const bool is_void = one_of(tag, kVoid) || self_closing;
        const NodeId id = add(Node{NodeKind::element, std::move(tag), std::move(attrs), {}, stack_.back(), {}});
        if (!is_void) stack_.push_back(id);
        return id;
    }

    void end(std::string_view tag) {
        for (std::size_t i = stack_.size(); i-- > 1;) {
            if (nodes_[stack_[i]].tag == tag) {
                stack_.resize(i);
                return;
            }
        }
    }

private:
    NodeId add(Node n) {
        const auto id = static_cast<NodeId>(nodes_.size());
        n.parent = stack_.back();
        nodes_.push_back(std::move(n));
        nodes_[stack_.back()].children.push_back(id);
        return id;
    }

    // Pops back to (and including) the nearest open `tag` unless one of
    // `stop` (or, for flow content, a scope boundary) comes first.
    template <std::size_t N>
    void close_in_scope(std::string_view tag, const std::array<std::string_view, N>& stop,
                        bool flow_scope = true) {
        for (std::size_t i = stack_.size(); i-- > 1;) {
            const auto& t = nodes_[stack_[i]].tag;
            if (t == tag) {
                stack_.resize(i);
                return;
            }
            if ((flow_scope && one_of(t, kScopeBoundary)) || one_of(t, stop)) return;
        }
    }

    void implicit_close(std::string_view tag) {
        static constexpr std::array<std::string_view, 0> none{};
        static constexpr std::array<std::string_view, 1> table{"table"};
        static constexpr std::array<std::string_view, 2> row{"tr", "table"};
        if (one_of(tag, kClosesParagraph)) close_in_scope("p", none);
        if (tag == "li") close_in_scope("li", std::array<std::string_view, 2>{"ul", "ol"});
        if (tag == "dt" || tag == "dd") {
            close_in_scope("dt", std::array<std::string_view, 1>{"dl"});
            close_in_scope("dd", std::array<std::string_view, 1>{"dl"});
        }
        if (tag == "option") close_in_scope("option", std::array<std::string_view, 1>{"select"});
        if (tag == "tr" || tag == "td" || tag == "th") {
            close_in_scope("td", row, false);
            close_in_scope("th", row, false);
        }
        if (tag == "tr") close_in_scope("tr", table, false);
    }

    std::vector<Node>& nodes_;
    std::vector<NodeId> stack_;
};

class Tokenizer {
public:
    Tokenizer(std::string_view in, TreeBuilder& builder) : in_(in), b_(builder) {}

    void run() {
        while (pos_ < in_.size()) {
            const auto lt = in_.find('<', pos_);
            if (lt == std::string_view::npos) {
                b_.text(decode_entities(in_.substr(pos_)));
                break;
            }
            if (lt > pos_) b_.text(decode_entities(in_.substr(pos_, lt - pos_)));
            pos_ = lt;
            if (!markup()) {
                b_.text("<");
                ++pos_;
            }
        }
    }

private:
    bool starts_with(std::string_view s) const { return in_.substr(pos_, s.size()) == s; }

    // Consumes one markup construct at pos_; false when '<' is literal text.
    bool markup() {
        if (starts_with("<!--")) {
            const auto e = in_.find("-->", pos_ + 4);
            const auto stop = e == std::string_view::npos ? in_.size() : e;
            b_.comment(std::string(in_.substr(pos_ + 4, stop - pos_ - 4)));
            pos_ = e == std::string_view::npos ? in_.size() : e + 3;
            return true;
        }
        if (starts_with("<!") || starts_with("<?")) {
            skip_past('>');
            return true;
        }
        if (starts_with("</")) {
            if (pos_ + 2 >= in_.size() || !is_ascii_alpha(in_[pos_ + 2])) {
                skip_past('>');
                return true;
            }
            pos_ += 2;
            const auto name = read_name();
            skip_past('>');
            b_.end(name);
            return true;
        }
        if (pos_ + 1 >= in_.size() || !is_ascii_alpha(in_[pos_ + 1])) return false;
        ++pos_;
        std::string name = read_name();
        std::vector<Attribute> attrs;
        bool self_closing = false;
        read_attributes(attrs, self_closing);
        const bool raw = one_of(name, kRawText);
        b_.start(name, std::move(attrs), self_closing && !raw);
        if (raw && !self_closing) raw_text(name);
        return true;
    }

    void skip_past(char c) {
        const auto e = in_.find(c, pos_);
        pos_ = e == std::string_view::npos ? in_.size() : e + 1;
    }

    std::string read_name() {
        const auto b = pos_;
        while (pos_ < in_.size() && !is_html_space(in_[pos_]) && in_[pos_] != '>' && in_[pos_] != '/')
            ++pos_;
        return ascii_lower(in_.substr(b, pos_ - b));
    }

    void skip_space() {
        while (pos_ < in_.size() && is_html_space(in_[pos_])) ++pos_;
    }

    void read_attributes(std::vector<Attribute>& attrs, bool& self_closing) {
        while (true) {
            skip_space();
            if (pos_ >= in_.size()) return;
            const char c = in_[pos_];
            if (c == '>') {
                ++pos_;
                return;
            }
            if (c == '/') {
                ++pos_;
                skip_space();
                if (pos_ < in_.size() && in_[pos_] == '>') {
                    self_closing = true;
                    ++pos_;
                    return;
                }
                continue;
            }
            const auto nb = pos_;
            while (pos_ < in_.size() && !is_html_space(in_[pos_]) && in_[pos_] != '>' && in_[pos_] != '=' &&
                   !(in_[pos_] == '/' && pos_ + 1 < in_.size() && in_[pos_ + 1] == '>'))
                ++pos_;
            if (pos_ == nb) {  // stray '='
                ++pos_;
                continue;
            }
            Attribute attr{ascii_lower(in_.substr(nb, pos_ - nb)), {}};
            skip_space();
            if (pos_ < in_.size() && in_[pos_] == '=') {
                ++pos_;
                skip_space();
                attr.value = decode_entities(read_value());
            }
            const bool seen = std::any_of(attrs.begin(), attrs.end(),
                                          [&](const Attribute& a) { return a.name == attr.name; });
            if (!seen) attrs.push_back(std::move(attr));
        }
    }

    std::string_view read_value() {
        if (pos_ >= in_.size()) return {};
        const char q = in_[pos_];
        if (q == '"' || q == '\'') {
            const auto e = in_.find(q, pos_ + 1);
            const auto stop = e == std::string_view::npos ? in_.size() : e;
            const auto v = in_.substr(pos_ + 1, stop - pos_ - 1);
            pos_ = e == std::string_view::npos ? in_.size() : e + 1;
            return v;
        }
        const auto b = pos_;
        while (pos_ < in_.size() && !is_html_space(in_[pos_]) && in_[pos_] != '>') ++pos_;
        return in_.substr(b, pos_ - b);
    }

    void raw_text(std::string_view tag) {
        auto search = pos_;
        while (true) {
            const auto lt = in_.find("</", search);
            if (lt == std::string_view::npos) break;
            const auto name = ascii_lower(in_.substr(lt + 2, tag.size()));
            const auto after = lt + 2 + tag.size();
            if (name == tag && (after >= in_.size() || is_html_space(in_[after]) || in_[after] == '>' ||
                                in_[after] == '/')) {
                emit_raw(tag, in_.substr(pos_, lt - pos_));
                pos_ = lt;
                return;  // the end tag is handled by the main loop
            }
            search = lt + 2;
        }
        emit_raw(tag, in_.substr(pos_));
        pos_ = in_.size();
    }

    void emit_raw(std::string_view tag, std::string_view body) {
        if (tag == "textarea" || tag == "title") {
            b_.text(decode_entities(body));
        } else {
            b_.text(std::string(body));
        }
    }

    std::string_view in_;
    std::size_t pos_ = 0;
    TreeBuilder& b_;
};

}  // namespace

std::string decode_entities(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        const auto amp = s.find('&', i);
        if (amp == std::string_view::npos) {
            out.append(s.substr(i));
            break;
        }
        out.append(s.substr(i, amp - i));
        i = amp + 1;
        if (i < s.size() && s[i] == '#') {
            std::size_t j = i + 1;
            int base = 10;
            if (j < s.size() && (s[j] == 'x' || s[j] == 'X')) {
                base = 16;
                ++j;
            }
            const auto digits_begin = j;
            while (j < s.size() && (base == 16 ? std::isxdigit(static_cast<unsigned char>(s[j]))
                                               : std::isdigit(static_cast<unsigned char>(s[j]))))
                ++j;
            if (j == digits_begin || j - digits_begin > 8) {
                out += '&';
                continue;
            }
            unsigned long cp = std::strtoul(std::string(s.substr(digits_begin, j - digits_begin)).c_str(), nullptr, base);
            if (cp == 0 || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) cp = 0xFFFD;
            append_cp(out, static_cast<char32_t>(cp));
            i = (j < s.size() && s[j] == ';') ? j + 1 : j;
            continue;
        }
        std::size_t j = i;
        while (j < s.size() && is_ascii_alnum(s[j]) && j - i < 32) ++j;
        const auto name = s.substr(i, j - i);
        const auto& table = named_entities();
        const auto it = table.find(name);
        const bool has_semi = j < s.size() && s[j] == ';';
        if (it != table.end() && (has_semi || one_of(name, kSemicolonOptional))) {
            append_cp(out, it->second);
            i = has_semi ? j + 1 : j;
        } else {
            out += '&';
        }
    }
    return out;
}

Document Document::parse(std::string_view html) {
    Document doc;
    TreeBuilder builder(doc.nodes_);
    Tokenizer(html, builder).run();
    return doc;
}

std::optional<std::string_view> Document::attribute(NodeId id, std::string_view name) const {
    for (const auto& a : nodes_.at(id).attributes) {
        if (a.name == name) return std::string_view(a.value);
    }
    return std::nullopt;
}

void Document::for_each_element(const std::function<void(NodeId, const Node&)>& fn, NodeId from) const {
    std::vector<NodeId> todo{from};
    while (!todo.empty()) {
        const NodeId id = todo.back();
        todo.pop_back();
        const Node& n = nodes_[id];
        if (n.kind == NodeKind::element) fn(id, n);
        for (auto it = n.children.rbegin(); it != n.children.rend(); ++it) todo.push_back(*it);
    }
}

std::vector<NodeId> Document::elements_by_tag(std::string_view tag) const {
    std::vector<NodeId> out;
    for_each_element([&](NodeId id, const Node& n) {
        if (n.tag == tag) out.push_back(id);
    });
    return out;
}

std::string Document::raw_text(NodeId id) const {
    std::string out;
    std::vector<NodeId> todo{id};
    while (!todo.empty()) {
        const NodeId cur = todo.back();
        todo.pop_back();
        const Node& n = nodes_[cur];
        if (n.kind == NodeKind::text) out += n.text;
        for (auto it = n.children.rbegin(); it != n.children.rend(); ++it) todo.push_back(*it);
    }
    return out;
}

std::string Document::visible_text(NodeId id) const {
    std::string buf;
    const std::function<void(NodeId)> walk = [&](NodeId cur) {
        const Node& n = nodes_[cur];
        switch (n.kind) {
            case NodeKind::text:
                buf += n.text;
                return;
            case NodeKind::comment:
                return;
            case NodeKind::document:
            case NodeKind::element:
                break;
        }
        if (one_of(n.tag, kInvisible)) return;
        const bool block = one_of(n.tag, kBlock);
        if (block) buf += '\n';
        for (NodeId c : n.children) walk(c);
        if (block) buf += '\n';
    };
    walk(id);

    std::string out;
    std::size_t start = 0;
    while (start <= buf.size()) {
        auto nl = buf.find('\n', start);
        if (nl == std::string::npos) nl = buf.size();
        auto line = text::collapse_whitespace(std::string_view(buf).substr(start, nl - start));
        if (!line.empty()) {
            if (!out.empty()) out += '\n';
            out += line;
        }
        start = nl + 1;
    }
    return out;
}

std::string Document::body_text() const {
    const auto bodies = elements_by_tag("body");
    return visible_text(bodies.empty() ? kRoot : bodies.front());
}

bool Document::is_ancestor(NodeId ancestor, NodeId node) const {
    while (node != kRoot) {
        node = nodes_.at(node).parent;
        if (node == ancestor) return true;
    }
    return ancestor == kRoot;
}

}  // namespace byline::html
