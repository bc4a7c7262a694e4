#pragma once

#include "equiloc/bounds/bounds.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace equiloc::bounds {

/// Brute-force 1D placement enumeration, independent of the closed forms.
///  Encoder: every placement of a length-s_filter window that overlaps a
///           length-s_o object by at least one pixel; max |centre offset|.
///  Decoder: every placement of the object fully inside the window.
/// Throws DomainError for s_filter < 1, s_o < 1, or (decoder) s_o > s_filter.
Half oracle_max_shift(Side side, int s_filter, int s_o);

struct OracleMismatch {
    int s_psi, s_phi, s_o;
    Side side;
    Half oracle;
    Half formula;
};

struct OracleReport {
    std::uint64_t cases = 0;  // feasible (s_psi, s_phi, s_o) triples checked
    std::vector<OracleMismatch> mismatches;
    bool ok() const { return mismatches.empty(); }
};

/// Every odd s_psi, s_phi in [1, max_rf] and integer s_o in [1, min(max_s_o, s_phi)]:
/// both oracle sides against the theorem terms.
OracleReport oracle_grid_check(int max_rf = 31, int max_s_o = 25);

}  // namespace equiloc::bounds
