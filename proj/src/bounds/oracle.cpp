#include "equiloc/bounds/oracle.hpp"

#include "equiloc/error.hpp"

#include <algorithm>
#include <string>

namespace equiloc::bounds {

namespace {

// Placements are integer pixel offsets; centres are compared in doubled
// coordinates so every quantity is an exact integer.
std::int64_t doubled_offset(std::int64_t window_start, int s_filter, std::int64_t object_start, int s_o) {
    const std::int64_t window_centre2 = 2 * window_start + s_filter;
    const std::int64_t object_centre2 = 2 * object_start + s_o;
    const std::int64_t d = window_centre2 - object_centre2;
    return d < 0 ? -d : d;
}

bool overlaps(std::int64_t a0, int alen, std::int64_t b0, int blen) { return a0 < b0 + blen && b0 < a0 + alen; }

bool contains(std::int64_t outer0, int outer_len, std::int64_t inner0, int inner_len) {
    return outer0 <= inner0 && inner0 + inner_len <= outer0 + outer_len;
}

}  // namespace

Half oracle_max_shift(Side side, int s_filter, int s_o) {
    if (s_filter < 1) throw DomainError("oracle_max_shift: filter size must be >= 1");
    if (s_o < 1) throw DomainError("oracle_max_shift: object size must be >= 1");
    if (side == Side::Decoder && s_o > s_filter)
        throw DomainError("oracle_max_shift: object of size " + std::to_string(s_o) +
                          " cannot fit a decoder field of size " + std::to_string(s_filter));

    // Object fixed at [0, s_o); sweep the window across every start that could matter.
    std::int64_t best = -1;
    const std::int64_t lo = -static_cast<std::int64_t>(s_filter) - 1;
    const std::int64_t hi = static_cast<std::int64_t>(s_o) + 1;
    for (std::int64_t w = lo; w <= hi; ++w) {
        const bool admissible =
            side == Side::Encoder ? overlaps(w, s_filter, 0, s_o) : contains(w, s_filter, 0, s_o);
        if (!admissible) continue;
        best = std::max(best, doubled_offset(w, s_filter, 0, s_o));
    }
    return Half::from_twice(best);
}

OracleReport oracle_grid_check(int max_rf, int max_s_o) {
    OracleReport report;
    for (int s_psi = 1; s_psi <= max_rf; s_psi += 2) {
        for (int s_phi = 1; s_phi <= max_rf; s_phi += 2) {
            for (int s_o = 1; s_o <= std::min(max_s_o, s_phi); ++s_o) {
                ++report.cases;
                const BoundValue b = theorem_bound({s_psi, s_phi, s_o, 0.0, 0.0, {}}, 0.0);
                const Half enc = oracle_max_shift(Side::Encoder, s_psi, s_o);
                const Half dec = oracle_max_shift(Side::Decoder, s_phi, s_o);
                if (enc != b.encoder_term) report.mismatches.push_back({s_psi, s_phi, s_o, Side::Encoder, enc, b.encoder_term});
                if (dec != b.decoder_term_mean)
                    report.mismatches.push_back({s_psi, s_phi, s_o, Side::Decoder, dec, b.decoder_term_mean});
            }
        }
    }
    return report;
}

}  // namespace equiloc::bounds
