#pragma once

#include "equiloc/bounds/half.hpp"

#include <optional>
#include <string>
#include <vector>

namespace equiloc::bounds {

enum class Side { Encoder, Decoder };
enum class Vary { EncoderRF, DecoderRF, ObjectSize, GaussianSD };

std::string to_string(Side s);
std::string to_string(Vary v);
/// Accepts "enc-rf", "dec-rf", "obj-size", "sigma-g" (and the enum names).
Vary parse_vary(const std::string& s);

struct SizeRange {
    int min = 1;
    int max = 1;
};

/// Receptive fields, object size and Gaussian width feeding every bound, all in px.
struct BoundInputs {
    int s_psi = 9;
    int s_phi = 25;
    int s_o = 9;
    double sigma_g = 0.8;
    double n_sigma = 4.0;
    std::optional<SizeRange> size_range;

    /// Odd positive receptive fields, s_o >= 1, sigma_g >= 0, n_sigma >= 0,
    /// and (if `need_fit`) s_o <= s_phi. Throws DomainError.
    void validate(bool need_fit = true) const;
};

struct BoundValue {
    Half encoder_term;        // s_psi/2 + s_o/2 - 1
    Half decoder_term_mean;   // s_phi/2 - s_o/2
    double delta_g = 0.0;     // realized Gaussian offset added to the decoder term
    double decoder_band = 0;  // n_sigma * sigma_g
    double overall = 0;       // min(encoder_term, decoder_term_mean + delta_g)
    Half overall_mean;        // min(encoder_term, decoder_term_mean)
    double overall_worst = 0; // min(encoder_term, decoder_term_mean + decoder_band)
    Side active_side = Side::Decoder;  // side attaining `overall`; ties go to the decoder

    double decoder_term() const { return decoder_term_mean.value() + delta_g; }
};

/// Maximum position error min(s_psi/2 + s_o/2 - 1, s_phi/2 - s_o/2 + delta_g).
BoundValue theorem_bound(const BoundInputs& in, double delta_g);

struct CurvePoint {
    double value = 0;                // the varied quantity
    Half mean;                       // piecewise corollary formula at delta_G = 0
    Side active_side = Side::Decoder;
    std::vector<double> band_upper;  // envelope at delta_G = k * sigma_G, k = 1..bands
};

struct BoundCurve {
    Vary vary = Vary::EncoderRF;
    BoundInputs fixed;
    std::vector<CurvePoint> points;
    std::vector<double> breakpoints;  // dashed-line locations inside the sampled domain
    int bands = 4;
};

/// Corollaries for a single object size, varying one quantity over `domain`
/// (strictly increasing). Throws DomainError for a point outside the formula's validity.
BoundCurve corollary_bound(Vary vary, const std::vector<double>& domain, const BoundInputs& in);

/// Three-branch corollaries for a range of object sizes; `vary` must be
/// EncoderRF or DecoderRF and `in.size_range` must be set.
BoundCurve sizerange_bound(Vary vary, const std::vector<double>& domain, const BoundInputs& in);

/// Gaussian-offset corollary read with delta_G = n * sigma_g: decoder branch while n*sigma_g is
/// below s_psi/2 - s_phi/2 + s_o - 1, encoder cap afterwards.
double gaussian_sd_formula(const BoundInputs& in, double sigma_g, double n);

/// Largest theorem envelope over integer sizes in `in.size_range` at the given offset.
double sizerange_envelope(const BoundInputs& in, double delta_g);

/// Number of shaded bands drawn for n_sigma (floor, at least 0).
int band_count(double n_sigma);

}  // namespace equiloc::bounds
