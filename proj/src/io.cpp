#include "bowforge/io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace bowforge::io {

namespace {

template <class T>
T field(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw std::invalid_argument(std::string("missing field '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("bad field '") + key + "': " + e.what());
    }
}

const char* dir_name(Direction d) { return d == Direction::Cw ? "cw" : "acw"; }

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

const char* op_name(MoveOp op) {
    switch (op) {
        case MoveOp::HW: return "hw";
        case MoveOp::IncrementArrows: return "increment_arrows";
        case MoveOp::IncrementX: return "increment_x";
        case MoveOp::SubtractArrowArc: return "subtract_arrow_arc";
        case MoveOp::CutAt: return "cut";
        case MoveOp::Uncut: return "uncut";
    }
    return "?";
}

json to_json(const BowDiagram& d) {
    json nodes = json::array(), ids = json::array();
    for (const auto& n : d.nodes) {
        nodes.push_back(std::string(1, kind_char(n.kind)));
        ids.push_back(n.id);
    }
    return {{"shape", d.finite() ? "finite" : "affine"}, {"nodes", nodes}, {"dims", d.dims}, {"ids", ids}};
}

BowDiagram diagram_from_json(const json& j) {
    BowDiagram d;
    auto shape = field<std::string>(j, "shape");
    if (shape == "affine")
        d.shape = Shape::Affine;
    else if (shape == "finite")
        d.shape = Shape::Finite;
    else
        throw std::invalid_argument("shape must be affine or finite");
    auto nodes = field<std::vector<std::string>>(j, "nodes");
    d.dims = field<std::vector<Int>>(j, "dims");
    std::vector<int> ids;
    if (j.contains("ids")) ids = field<std::vector<int>>(j, "ids");
    if (!ids.empty() && ids.size() != nodes.size()) throw std::invalid_argument("ids and nodes differ in length");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        NodeKind k;
        if (nodes[i] == "o")
            k = NodeKind::Arrow;
        else if (nodes[i] == "x")
            k = NodeKind::XPoint;
        else
            throw std::invalid_argument("node must be 'o' or 'x'");
        d.nodes.push_back({ids.empty() ? static_cast<int>(i) : ids[i], k});
    }
    auto bad = validate(d);
    if (!bad.empty()) throw std::invalid_argument("invalid diagram: " + bad.front());
    return d;
}

json to_json(const Move& m) {
    json j{{"op", op_name(m.op)}};
    switch (m.op) {
        case MoveOp::HW:
            j["left"] = m.left;
            j["right"] = m.right;
            break;
        case MoveOp::IncrementArrows:
        case MoveOp::IncrementX:
            j["left"] = m.left;
            j["right"] = m.right;
            j["amount"] = m.amount;
            break;
        case MoveOp::SubtractArrowArc: j["amount"] = m.amount; break;
        case MoveOp::CutAt: j["segment"] = m.segment; break;
        case MoveOp::Uncut: break;
    }
    return j;
}

Move move_from_json(const json& j) {
    auto op = field<std::string>(j, "op");
    Move m;
    if (op == "hw") {
        m = Move::hw(field<int>(j, "left"), field<int>(j, "right"));
    } else if (op == "increment_arrows" || op == "increment_x") {
        m.op = op == "increment_x" ? MoveOp::IncrementX : MoveOp::IncrementArrows;
        m.left = field<int>(j, "left");
        m.right = field<int>(j, "right");
        m.amount = field<Int>(j, "amount");
    } else if (op == "subtract_arrow_arc") {
        m = Move::subtract(field<Int>(j, "amount"));
    } else if (op == "cut") {
        m = Move::cut(field<int>(j, "segment"));
    } else if (op == "uncut") {
        m.op = MoveOp::Uncut;
    } else {
        throw std::invalid_argument("unknown move op '" + op + "'");
    }
    return m;
}

json to_json(const MoveLog& log) {
    json a = json::array();
    for (const auto& m : log) a.push_back(to_json(m));
    return a;
}

MoveLog log_from_json(const json& j) {
    const json& arr = j.is_object() && j.contains("moves") ? j.at("moves") : j;
    if (!arr.is_array()) throw std::invalid_argument("move log must be an array");
    MoveLog log;
    for (const auto& e : arr) log.push_back(move_from_json(e));
    return log;
}

json to_json(const SeparatedForm& s) {
    return {{"diagram", to_json(s.diagram)}, {"n", s.n},         {"w", s.w},
            {"v_arr", s.v_arr},              {"v_x", s.v_x},     {"e_ids", s.e_ids},
            {"x_ids", s.x_ids},              {"rendered", render_diagram(s.diagram)}};
}

json to_json(const NegativeWitness& w) {
    return {{"moves", to_json(w.moves)}, {"segment", w.segment}, {"value", w.value}};
}

json to_json(const Certificate& c) {
    json wit = std::visit(
        [](const auto& x) -> json {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, InequalityViolation>) {
                return {{"type", "inequality"}, {"dir", dir_name(x.dir)}, {"t", x.t},
                        {"s", x.s},             {"k", x.k},               {"value", x.value}};
            } else if constexpr (std::is_same_v<T, NegativeWitness>) {
                json j = to_json(x);
                j["type"] = "negative_dimension";
                return j;
            } else if constexpr (std::is_same_v<T, FiniteCheckPassed>) {
                json a = json::array();
                for (const auto& q : x.checked) a.push_back({{"s", q.s}, {"k", q.k}, {"value", q.value}});
                return {{"type", "inequalities_hold"}, {"checked", a}};
            } else {
                return {{"type", "single_kind"}, {"min_dim", x.min_dim}};
            }
        },
        c.witness);
    return {{"susy", c.susy}, {"witness", wit}, {"pipeline", to_json(c.pipeline)}, {"witness_stage", c.witness_stage}};
}

json to_json(const BraneLedger& l) {
    json a = json::array();
    for (const auto& b : l.branes)
        a.push_back({{"start", b.start},
                     {"end", b.end},
                     {"span", b.span},
                     {"mult", b.mult},
                     {"dir", dir_name(brane_dir(b))},
                     {"laps", brane_laps(b, l.host.size())},
                     {"fixed", is_fixed(l.host, b)}});
    return {{"host", to_json(l.host)}, {"branes", a}};
}

BraneLedger ledger_from_json(const json& j) {
    BraneLedger l;
    l.host = diagram_from_json(field<json>(j, "host"));
    for (const auto& e : field<json>(j, "branes")) {
        Brane b;
        b.start = field<int>(e, "start");
        b.end = field<int>(e, "end");
        b.span = field<Int>(e, "span");
        b.mult = e.contains("mult") ? field<Int>(e, "mult") : 1;
        if (!l.host.has_node(b.start) || !l.host.has_node(b.end)) throw std::invalid_argument("brane endpoint not in host");
        if (b.span == 0 || b.mult < 1) throw std::invalid_argument("brane needs nonzero span and mult >= 1");
        l.branes.push_back(b);
    }
    return l;
}

json to_json(const AffineWeight& w) {
    return {{"values", w.values}, {"level", w.level}, {"dpair", w.dpair}, {"charge", w.charge()}};
}

AffineWeight weight_from_json(const json& j) {
    return {field<std::vector<Int>>(j, "values"), field<Int>(j, "level"), field<Int>(j, "dpair")};
}

json to_json(const Mat& m) {
    std::vector<double> re, im;
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            re.push_back(m(r, c).real());
            im.push_back(m(r, c).imag());
        }
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"re", re}, {"im", im}};
}

Mat mat_from_json(const json& j) {
    const auto rows = field<Eigen::Index>(j, "rows"), cols = field<Eigen::Index>(j, "cols");
    auto re = field<std::vector<double>>(j, "re");
    auto im = field<std::vector<double>>(j, "im");
    if (rows < 0 || cols < 0 || re.size() != std::size_t(rows * cols) || im.size() != re.size())
        throw std::invalid_argument("matrix entries do not match its shape");
    Mat m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = cd(re[r * cols + c], im[r * cols + c]);
    return m;
}

json to_json(const BowDiagram& d, const Solution& s) {
    json tri = json::array(), arr = json::array(), lam = json::array();
    for (const auto& [id, t] : s.triangles)
        tri.push_back({{"node", id},
                       {"A", to_json(t.A)},
                       {"Bm", to_json(t.Bm)},
                       {"Bp", to_json(t.Bp)},
                       {"a", to_json(t.a)},
                       {"b", to_json(t.b)}});
    for (const auto& [id, a] : s.arrows) arr.push_back({{"node", id}, {"C", to_json(a.C)}, {"D", to_json(a.D)}});
    for (const cd& l : s.lambda) lam.push_back({l.real(), l.imag()});
    return {{"diagram", to_json(d)}, {"triangles", tri},    {"arrows", arr},
            {"lambda", lam},         {"seed", s.seed},      {"residual", s.residual},
            {"stable", s.stable},    {"iterations", s.iterations}};
}

Solution solution_from_json(const json& j) {
    Solution s;
    for (const auto& e : field<json>(j, "triangles"))
        s.triangles[field<int>(e, "node")] = {mat_from_json(field<json>(e, "A")), mat_from_json(field<json>(e, "Bm")),
                                              mat_from_json(field<json>(e, "Bp")), mat_from_json(field<json>(e, "a")),
                                              mat_from_json(field<json>(e, "b"))};
    for (const auto& e : field<json>(j, "arrows"))
        s.arrows[field<int>(e, "node")] = {mat_from_json(field<json>(e, "C")), mat_from_json(field<json>(e, "D"))};
    if (j.contains("lambda"))
        for (const auto& l : j.at("lambda")) {
            auto p = l.get<std::vector<double>>();
            if (p.size() != 2) throw std::invalid_argument("lambda entries are [re, im]");
            s.lambda.emplace_back(p[0], p[1]);
        }
    if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("residual")) s.residual = j.at("residual").get<double>();
    if (j.contains("stable")) s.stable = j.at("stable").get<bool>();
    if (j.contains("iterations")) s.iterations = j.at("iterations").get<int>();
    return s;
}

json read_json_file(const std::string& path) {
    try {
        return json::parse(slurp(path));
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(path + ": " + e.what());
    }
}

BowDiagram read_diagram(const std::string& arg) {
    auto first = arg.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && (arg[first] == '(' || arg[first] == '[')) return parse_diagram(arg);
    if (!std::filesystem::exists(arg)) throw std::runtime_error("no such file: " + arg);
    std::string text = slurp(arg);
    first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        json j = json::parse(text);
        // accept a bare diagram or anything that embeds one
        for (const char* key : {"diagram", "host"})
            if (j.contains(key)) return diagram_from_json(j.at(key));
        return diagram_from_json(j);
    }
    return parse_diagram(text);
}

}  // namespace bowforge::io
