#include "bowforge/diagram.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>
#include <sstream>

namespace bowforge {

int BowDiagram::position(int node_id) const {
    for (int i = 0; i < size(); ++i)
        if (nodes[i].id == node_id) return i;
    throw std::invalid_argument("unknown node id " + std::to_string(node_id));
}

bool BowDiagram::has_node(int node_id) const {
    return std::any_of(nodes.begin(), nodes.end(), [&](const Node& n) { return n.id == node_id; });
}

int BowDiagram::next_id() const {
    int m = -1;
    for (const auto& n : nodes) m = std::max(m, n.id);
    return m + 1;
}

int BowDiagram::count(NodeKind k) const {
    return static_cast<int>(std::count_if(nodes.begin(), nodes.end(), [&](const Node& n) { return n.kind == k; }));
}

Int BowDiagram::min_dim() const {
    if (dims.empty()) return 0;
    return *std::min_element(dims.begin(), dims.end());
}

char kind_char(NodeKind k) { return k == NodeKind::Arrow ? 'o' : 'x'; }

namespace {

struct Token {
    std::string text;
    std::size_t offset;
};

std::vector<Token> tokenize(const std::string& text) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < text.size()) {
        unsigned char c = static_cast<unsigned char>(text[i]);
        if (std::isspace(c)) {
            ++i;
            continue;
        }
        if (c == '(' || c == ')' || c == '[' || c == ']') {
            out.push_back({std::string(1, text[i]), i});
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j])) && text[j] != '(' &&
               text[j] != ')' && text[j] != '[' && text[j] != ']')
            ++j;
        out.push_back({text.substr(i, j - i), i});
        i = j;
    }
    return out;
}

Int parse_int(const Token& t) {
    Int v = 0;
    const char* b = t.text.data();
    const char* e = b + t.text.size();
    if (b != e && *b == '+') ++b;
    auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || p != e) throw ParseError("expected integer, got '" + t.text + "'", t.offset);
    return v;
}

NodeKind parse_kind(const Token& t) {
    if (t.text == "o" || t.text == "O") return NodeKind::Arrow;
    if (t.text == "x" || t.text == "X") return NodeKind::XPoint;
    throw ParseError("expected node 'o' or 'x', got '" + t.text + "'", t.offset);
}

}  // namespace

BowDiagram parse_diagram(const std::string& text) {
    auto toks = tokenize(text);
    if (toks.size() < 2) throw ParseError("diagram too short", text.size());
    const auto& open = toks.front();
    const auto& close = toks.back();
    bool affine;
    if (open.text == "(") {
        affine = true;
        if (close.text != ")") throw ParseError("expected ')'", close.offset);
    } else if (open.text == "[") {
        affine = false;
        if (close.text != "]") throw ParseError("expected ']'", close.offset);
    } else {
        throw ParseError("diagram must start with '(' or '['", open.offset);
    }
    std::vector<Token> body(toks.begin() + 1, toks.end() - 1);
    for (const auto& t : body)
        if (t.text.size() == 1 && std::string("()[]").find(t.text[0]) != std::string::npos)
            throw ParseError("unexpected bracket", t.offset);

    std::vector<NodeKind> kinds;
    std::vector<Int> vals;
    for (std::size_t i = 0; i < body.size(); ++i) {
        if (i % 2 == 0)
            vals.push_back(parse_int(body[i]));
        else
            kinds.push_back(parse_kind(body[i]));
    }

    BowDiagram d;
    if (affine) {
        if (body.size() % 2 != 0)
            throw ParseError("affine diagram needs equal numbers of dims and nodes", close.offset);
        if (kinds.empty()) throw ParseError("diagram has no nodes", close.offset);
        const int L = static_cast<int>(kinds.size());
        d.shape = Shape::Affine;
        d.dims.assign(L, 0);
        for (int i = 0; i < L; ++i) {
            d.nodes.push_back({i, kinds[i]});
            // vals[i] precedes node i, i.e. sits between node i-1 and node i
            d.dims[(i - 1 + L) % L] = vals[i];
        }
        return d;
    }

    if (body.size() % 2 != 1)
        throw ParseError("finite diagram must start and end with a dim", close.offset);
    if (kinds.empty()) throw ParseError("diagram has no nodes", close.offset);
    if (vals.front() != 0) {
        kinds.insert(kinds.begin(), NodeKind::Arrow);
        vals.insert(vals.begin(), 0);
    }
    if (vals.back() != 0) {
        kinds.push_back(NodeKind::Arrow);
        vals.push_back(0);
    }
    const int L = static_cast<int>(kinds.size());
    d.shape = Shape::Finite;
    for (int i = 0; i < L; ++i) d.nodes.push_back({i, kinds[i]});
    for (int i = 1; i < L; ++i) d.dims.push_back(vals[i]);
    d.dims.push_back(0);
    return d;
}

std::string render_diagram(const BowDiagram& d) {
    require_valid(d);
    std::ostringstream os;
    const int L = d.size();
    if (d.finite()) {
        os << "[ 0";
        for (int i = 0; i < L; ++i) {
            os << ' ' << kind_char(d.nodes[i].kind);
            os << ' ' << (i + 1 < L ? d.dims[i] : 0);
        }
        os << " ]";
    } else {
        os << '(';
        for (int i = 0; i < L; ++i) os << ' ' << d.dims[(i - 1 + L) % L] << ' ' << kind_char(d.nodes[i].kind);
        os << " )";
    }
    return os.str();
}

std::vector<std::string> validate(const BowDiagram& d) {
    std::vector<std::string> out;
    if (d.nodes.empty()) out.push_back("diagram has no nodes");
    if (d.dims.size() != d.nodes.size()) out.push_back("number of dims differs from number of nodes");
    std::set<int> ids;
    for (const auto& n : d.nodes)
        if (!ids.insert(n.id).second) out.push_back("duplicate node id " + std::to_string(n.id));
    if (d.finite() && !d.dims.empty() && d.dims.size() == d.nodes.size() && d.dims.back() != 0)
        out.push_back("cut segment nonzero");
    return out;
}

void require_valid(const BowDiagram& d) {
    auto v = validate(d);
    if (!v.empty()) throw std::invalid_argument("invalid diagram: " + v.front());
}

Int SeparatedForm::v(int s) const {
    if (s >= 0) return v_arr.at(s);
    return v_x.at(-s);
}

bool SeparatedForm::finite_layout() const {
    return diagram.finite() && arr_seg.at(n) == diagram.size() - 1;
}

std::optional<SeparatedForm> separated_view(const BowDiagram& d) {
    require_valid(d);
    const int L = d.size();
    SeparatedForm s;
    s.diagram = d;
    s.n = d.n_arrows();
    s.w = d.n_xpoints();
    auto mod = [L](int p) { return ((p % L) + L) % L; };
    auto seg_left = [&](int p) { return mod(p - 1); };

    std::vector<int> e_pos, x_pos;
    if (s.n > 0 && s.w > 0) {
        int starts = 0, p1 = -1;
        for (int p = 0; p < L; ++p)
            if (d.nodes[p].kind == NodeKind::XPoint && d.nodes[mod(p - 1)].kind == NodeKind::Arrow) {
                ++starts;
                p1 = p;
            }
        if (starts != 1) return std::nullopt;
        for (int k = 0; k < s.w; ++k) x_pos.push_back(mod(p1 + k));
        for (int j = 1; j <= s.n; ++j) e_pos.push_back(mod(p1 - j));
    } else if (s.w == 0) {
        for (int j = 1; j <= s.n; ++j) e_pos.push_back(L - j);
    } else {
        for (int k = 0; k < s.w; ++k) x_pos.push_back(k);
    }
    for (int p : e_pos) s.e_ids.push_back(d.nodes[p].id);
    for (int p : x_pos) s.x_ids.push_back(d.nodes[p].id);

    int seg0 = s.w > 0 ? seg_left(x_pos.front()) : e_pos.front();
    s.arr_seg.push_back(seg0);
    for (int j = 0; j < s.n; ++j) s.arr_seg.push_back(seg_left(e_pos[j]));
    s.x_seg.push_back(seg0);
    for (int k = 0; k < s.w; ++k) s.x_seg.push_back(x_pos[k]);
    for (int seg : s.arr_seg) s.v_arr.push_back(d.dims[seg]);
    for (int seg : s.x_seg) s.v_x.push_back(d.dims[seg]);
    return s;
}

SeparatedForm require_separated(const BowDiagram& d) {
    auto s = separated_view(d);
    if (!s) throw std::invalid_argument("diagram is not separated: " + render_diagram(d));
    return *s;
}

BowDiagram s_dual(const BowDiagram& d) {
    BowDiagram r = d;
    for (auto& n : r.nodes) n.kind = n.kind == NodeKind::Arrow ? NodeKind::XPoint : NodeKind::Arrow;
    return r;
}

BowDiagram cut_at(const BowDiagram& d, int segment) {
    require_valid(d);
    const int L = d.size();
    if (segment < 0 || segment >= L) throw std::invalid_argument("cut segment out of range");
    if (d.finite()) throw std::invalid_argument("diagram already has a cut");
    if (d.dims[segment] != 0) throw std::invalid_argument("cannot cut at a nonzero segment");
    BowDiagram r;
    r.shape = Shape::Finite;
    for (int i = 0; i < L; ++i) {
        int p = (segment + 1 + i) % L;
        r.nodes.push_back(d.nodes[p]);
        r.dims.push_back(d.dims[p]);
    }
    return r;
}

BowDiagram uncut(const BowDiagram& d) {
    BowDiagram r = d;
    r.shape = Shape::Affine;
    return r;
}

bool structurally_equal(const BowDiagram& a, const BowDiagram& b) {
    if (a.shape != b.shape || a.size() != b.size() || a.dims != b.dims) return false;
    for (int i = 0; i < a.size(); ++i)
        if (a.nodes[i].kind != b.nodes[i].kind) return false;
    return true;
}

}  // namespace bowforge
