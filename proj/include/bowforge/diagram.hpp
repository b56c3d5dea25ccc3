#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace bowforge {

using Int = std::int64_t;

enum class NodeKind { Arrow, XPoint };

// Cw = clockwise = leftward in the textual layout, Acw = rightward.
enum class Direction { Cw, Acw };

struct Node {
    int id = 0;
    NodeKind kind = NodeKind::Arrow;
    bool operator==(const Node&) const = default;
};

enum class Shape { Affine, Finite };

// Segment i sits between nodes[i] and nodes[(i + 1) % size()].  A finite
// diagram always keeps its cut as the last segment, so nodes[0] is the first
// node after the cut.
struct BowDiagram {
    std::vector<Node> nodes;
    std::vector<Int> dims;
    Shape shape = Shape::Affine;

    int size() const { return static_cast<int>(nodes.size()); }
    bool finite() const { return shape == Shape::Finite; }
    int cut() const { return finite() ? size() - 1 : -1; }
    int position(int node_id) const;  // throws std::invalid_argument
    bool has_node(int node_id) const;
    int next_id() const;
    int count(NodeKind k) const;
    int n_arrows() const { return count(NodeKind::Arrow); }
    int n_xpoints() const { return count(NodeKind::XPoint); }
    Int min_dim() const;

    bool operator==(const BowDiagram&) const = default;
};

class ParseError : public std::invalid_argument {
public:
    ParseError(const std::string& msg, std::size_t offset)
        : std::invalid_argument(msg + " at offset " + std::to_string(offset)), offset_(offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

BowDiagram parse_diagram(const std::string& text);
std::string render_diagram(const BowDiagram& d);

// Empty result means the diagram is well formed.
std::vector<std::string> validate(const BowDiagram& d);
void require_valid(const BowDiagram& d);

// Labels follow the picture  v_0 x_1 v_{-1} ... x_w v_{-w}=v_n e_n v_{n-1} ... e_1 (back to v_0),
// read anticlockwise, i.e. left to right in text.
struct SeparatedForm {
    BowDiagram diagram;
    int n = 0;
    int w = 0;
    std::vector<Int> v_arr;    // v_0 .. v_n
    std::vector<Int> v_x;      // v_0, v_{-1}, .., v_{-w}
    std::vector<int> e_ids;    // e_1 .. e_n
    std::vector<int> x_ids;    // x_1 .. x_w
    std::vector<int> arr_seg;  // segment index holding v_s
    std::vector<int> x_seg;    // segment index holding v_{-k}

    // v(s) for s in [-w, n]
    Int v(int s) const;
    int e(int s) const { return e_ids.at(s - 1); }
    int x(int k) const { return x_ids.at(k - 1); }
    // finite diagram laid out as [ 0 e_n .. e_1 v_0 x_1 .. x_w 0 ]
    bool finite_layout() const;
};

std::optional<SeparatedForm> separated_view(const BowDiagram& d);
SeparatedForm require_separated(const BowDiagram& d);

BowDiagram s_dual(const BowDiagram& d);

// Rotate an affine diagram so that `segment` becomes the last one and mark it as the cut.
BowDiagram cut_at(const BowDiagram& d, int segment);
// Forget the cut.
BowDiagram uncut(const BowDiagram& d);

// Same shape, kinds and dims position by position; ids ignored.
bool structurally_equal(const BowDiagram& a, const BowDiagram& b);

char kind_char(NodeKind k);

}  // namespace bowforge
