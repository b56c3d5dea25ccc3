#pragma once

#include <string>

#include "json.hpp"

#include "bowforge/brane.hpp"
#include "bowforge/diagram.hpp"
#include "bowforge/hw.hpp"
#include "bowforge/moment.hpp"
#include "bowforge/susy.hpp"
#include "bowforge/weights.hpp"

namespace bowforge::io {

using json = nlohmann::json;

// {"shape": "affine"|"finite", "nodes": ["o", "x", ..], "dims": [..], "ids": [..]}
json to_json(const BowDiagram& d);
BowDiagram diagram_from_json(const json& j);  // throws std::invalid_argument

json to_json(const Move& m);
Move move_from_json(const json& j);
json to_json(const MoveLog& log);
MoveLog log_from_json(const json& j);

json to_json(const SeparatedForm& s);
json to_json(const NegativeWitness& w);
json to_json(const Certificate& c);

json to_json(const BraneLedger& l);
BraneLedger ledger_from_json(const json& j);

json to_json(const AffineWeight& w);
AffineWeight weight_from_json(const json& j);

// Matrices as {"rows", "cols", "re": [..], "im": [..]} in row-major order.
json to_json(const Mat& m);
Mat mat_from_json(const json& j);
// The solution carries its diagram so that it can be checked on its own.
json to_json(const BowDiagram& d, const Solution& s);
Solution solution_from_json(const json& j);

// Inline text such as "[ 0 o 2 x 0 ]", or a path to a file holding either
// that text or the JSON form.
BowDiagram read_diagram(const std::string& arg);
json read_json_file(const std::string& path);

const char* op_name(MoveOp op);

}  // namespace bowforge::io
