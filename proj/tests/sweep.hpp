#pragma once

#include <functional>
#include <set>
#include <string>
#include <vector>

#include "bowforge/diagram.hpp"
#include "bowforge/hw.hpp"

namespace sweep {

using bowforge::BowDiagram;
using bowforge::Int;
using bowforge::NodeKind;

// Every affine diagram with 1 <= nodes <= max_nodes and dims in [0, max_dim],
// one representative per rotation class.
inline void affine_diagrams(int max_nodes, Int max_dim, const std::function<void(const BowDiagram&)>& fn) {
    std::set<std::string> seen;
    for (int L = 1; L <= max_nodes; ++L) {
        for (int mask = 0; mask < (1 << L); ++mask) {
            std::vector<Int> dims(L, 0);
            for (;;) {
                BowDiagram d;
                d.shape = bowforge::Shape::Affine;
                for (int i = 0; i < L; ++i)
                    d.nodes.push_back({i, (mask >> i) & 1 ? NodeKind::XPoint : NodeKind::Arrow});
                d.dims = dims;
                if (seen.insert(bowforge::canonical_encoding(d)).second) fn(d);
                int i = 0;
                while (i < L && dims[i] == max_dim) dims[i++] = 0;
                if (i == L) break;
                ++dims[i];
            }
        }
    }
}

// Finite separated layouts [ 0 o .. o v_0 x .. x 0 ] with n + w <= max_nodes.
inline void finite_separated(int max_nodes, Int max_dim, const std::function<void(const BowDiagram&)>& fn) {
    for (int n = 0; n <= max_nodes; ++n)
        for (int w = 0; n + w <= max_nodes; ++w) {
            int L = n + w;
            if (L == 0) continue;
            int free = L - 1;
            std::vector<Int> inner(free, 0);
            for (;;) {
                BowDiagram d;
                d.shape = bowforge::Shape::Finite;
                for (int i = 0; i < L; ++i) d.nodes.push_back({i, i < n ? NodeKind::Arrow : NodeKind::XPoint});
                d.dims = inner;
                d.dims.push_back(0);
                fn(d);
                int i = 0;
                while (i < free && inner[i] == max_dim) inner[i++] = 0;
                if (i == free) break;
                ++inner[i];
            }
        }
}

}  // namespace sweep
