#pragma once

#include <optional>
#include <vector>

#include "bowforge/diagram.hpp"
#include "bowforge/hw.hpp"

namespace bowforge {

// A D3-brane stored by its signed lifted length: span > 0 runs anticlockwise
// from `start` over segments pos(start), pos(start)+1, ...; span < 0 runs
// clockwise over pos(start)-1, pos(start)-2, ...  The end node sits |span|
// steps away, so laps = |span| / L.
struct Brane {
    int start = -1;
    int end = -1;
    Int span = 0;
    Int mult = 1;
    bool operator==(const Brane&) const = default;
};

struct BraneLedger {
    BowDiagram host;
    std::vector<Brane> branes;
};

Direction brane_dir(const Brane& b);
Int brane_laps(const Brane& b, int L);
bool is_fixed(const BowDiagram& host, const Brane& b);

// Build a brane from (start, end, dir, laps).
Brane make_brane(const BowDiagram& host, int start, int end, Direction dir, Int laps, Int mult = 1);

// Fixed branes start at the arrow, unfixed ones run clockwise; equal branes are merged.
void normalize_ledger(BraneLedger& l);

std::vector<Int> coverage(const BraneLedger& l);

BraneLedger synthesize_finite(const SeparatedForm& s);

BraneLedger ledger_apply_move(const BraneLedger& l, const Move& entry, bool inverse);

struct LedgerSusy {
    bool ok = true;
    // offending (arrow, x-point, dir, laps) when !ok
    int arrow = -1;
    int xpoint = -1;
    Direction dir = Direction::Cw;
    Int laps = 0;
};

LedgerSusy check_ledger_susy(const BraneLedger& l);

BraneLedger synthesize(const BowDiagram& d);

// Ledger for a diagram with no arrows or no x-points (all dims >= 0).
BraneLedger synthesize_single_kind(const BowDiagram& d);

}  // namespace bowforge
