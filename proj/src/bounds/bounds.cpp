#include "equiloc/bounds/bounds.hpp"

#include "equiloc/error.hpp"

#include <algorithm>
#include <cmath>

namespace equiloc::bounds {

std::string to_string(Side s) { return s == Side::Encoder ? "encoder" : "decoder"; }

std::string to_string(Vary v) {
    switch (v) {
        case Vary::EncoderRF: return "enc-rf";
        case Vary::DecoderRF: return "dec-rf";
        case Vary::ObjectSize: return "obj-size";
        case Vary::GaussianSD: return "sigma-g";
    }
    return "?";
}

Vary parse_vary(const std::string& s) {
    if (s == "enc-rf" || s == "EncoderRF" || s == "s_psi") return Vary::EncoderRF;
    if (s == "dec-rf" || s == "DecoderRF" || s == "s_phi") return Vary::DecoderRF;
    if (s == "obj-size" || s == "ObjectSize" || s == "s_o") return Vary::ObjectSize;
    if (s == "sigma-g" || s == "GaussianSD" || s == "sigma_g") return Vary::GaussianSD;
    throw DomainError("unknown varied quantity '" + s + "' (expected enc-rf, dec-rf, obj-size or sigma-g)");
}

namespace {

void require_odd_rf(int rf, const char* name) {
    if (rf < 1 || rf % 2 == 0)
        throw DomainError(std::string(name) + " must be an odd receptive field >= 1, got " + std::to_string(rf));
}

int integral(double v, const char* name) {
    if (!std::isfinite(v) || std::floor(v) != v)
        throw DomainError(std::string(name) + " must be an integer, got " + std::to_string(v));
    return static_cast<int>(v);
}

Half encoder_term(int s_psi, int s_o) { return half_of(s_psi + s_o - 2); }
Half decoder_mean(int s_phi, int s_o) { return half_of(s_phi - s_o); }

void require_increasing(const std::vector<double>& domain) {
    if (domain.empty()) throw DomainError("bound curve: empty domain");
    for (std::size_t i = 1; i < domain.size(); ++i) {
        if (!(domain[i] > domain[i - 1])) throw DomainError("bound curve: domain values must be strictly increasing");
    }
}

void keep_in_domain(BoundCurve& curve, const std::vector<double>& domain, std::vector<double> candidates) {
    for (double b : candidates) {
        if (b >= domain.front() && b <= domain.back()) curve.breakpoints.push_back(b);
    }
}

}  // namespace

int band_count(double n_sigma) { return n_sigma > 0 ? static_cast<int>(std::floor(n_sigma)) : 0; }

void BoundInputs::validate(bool need_fit) const {
    require_odd_rf(s_psi, "s_psi");
    require_odd_rf(s_phi, "s_phi");
    if (s_o < 1) throw DomainError("s_o must be >= 1, got " + std::to_string(s_o));
    if (!(sigma_g >= 0.0) || !std::isfinite(sigma_g)) throw DomainError("sigma_g must be >= 0");
    if (!(n_sigma >= 0.0) || !std::isfinite(n_sigma)) throw DomainError("n_sigma must be >= 0");
    if (need_fit && s_o > s_phi)
        throw DomainError("object size s_o = " + std::to_string(s_o) + " exceeds decoder receptive field s_phi = " +
                          std::to_string(s_phi));
    if (size_range) {
        if (size_range->min < 1 || size_range->min > size_range->max)
            throw DomainError("size range must satisfy 1 <= s_o_min <= s_o_max");
        if (need_fit && size_range->max > s_phi)
            throw DomainError("s_o_max = " + std::to_string(size_range->max) +
                              " exceeds decoder receptive field s_phi = " + std::to_string(s_phi));
    }
}

BoundValue theorem_bound(const BoundInputs& in, double delta_g) {
    BoundInputs single = in;
    single.size_range.reset();
    single.validate(true);
    if (!std::isfinite(delta_g)) throw DomainError("delta_G must be finite");

    BoundValue b;
    b.encoder_term = encoder_term(in.s_psi, in.s_o);
    b.decoder_term_mean = decoder_mean(in.s_phi, in.s_o);
    b.delta_g = delta_g;
    b.decoder_band = in.n_sigma * in.sigma_g;
    b.overall_mean = min(b.encoder_term, b.decoder_term_mean);
    b.overall = std::min(b.encoder_term.value(), b.decoder_term());
    b.overall_worst = std::min(b.encoder_term.value(), b.decoder_term_mean.value() + b.decoder_band);
    b.active_side = b.encoder_term.value() < b.decoder_term() ? Side::Encoder : Side::Decoder;
    return b;
}

double gaussian_sd_formula(const BoundInputs& in, double sigma_g, double n) {
    const Half enc = encoder_term(in.s_psi, in.s_o);
    const Half dec = decoder_mean(in.s_phi, in.s_o);
    const double threshold = (enc - dec).value();  // s_psi/2 - s_phi/2 + s_o - 1
    return n * sigma_g < threshold ? dec.value() + n * sigma_g : enc.value();
}

double sizerange_envelope(const BoundInputs& in, double delta_g) {
    if (!in.size_range) throw DomainError("sizerange_envelope: size range not set");
    double best = 0.0;
    BoundInputs p = in;
    p.size_range.reset();
    for (int s = in.size_range->min; s <= in.size_range->max; ++s) {
        p.s_o = s;
        best = std::max(best, theorem_bound(p, delta_g).overall);
    }
    return best;
}

BoundCurve corollary_bound(Vary vary, const std::vector<double>& domain, const BoundInputs& in) {
    require_increasing(domain);
    BoundCurve curve;
    curve.vary = vary;
    curve.fixed = in;
    curve.bands = band_count(in.n_sigma);

    for (double v : domain) {
        BoundInputs p = in;
        p.size_range.reset();
        CurvePoint pt;
        pt.value = v;
        switch (vary) {
            case Vary::EncoderRF: {
                p.s_psi = integral(v, "s_psi");
                p.validate(true);
                const int bp = p.s_phi - 2 * p.s_o + 2;
                const bool enc_branch = p.s_psi <= bp;
                pt.mean = enc_branch ? encoder_term(p.s_psi, p.s_o) : decoder_mean(p.s_phi, p.s_o);
                pt.active_side = p.s_psi < bp ? Side::Encoder : Side::Decoder;
                break;
            }
            case Vary::DecoderRF: {
                p.s_phi = integral(v, "s_phi");
                p.validate(true);
                const int bp = p.s_psi + 2 * p.s_o - 2;
                const bool dec_branch = p.s_phi < bp;
                pt.mean = dec_branch ? decoder_mean(p.s_phi, p.s_o) : encoder_term(p.s_psi, p.s_o);
                pt.active_side = p.s_phi > bp ? Side::Encoder : Side::Decoder;
                break;
            }
            case Vary::ObjectSize: {
                p.s_o = integral(v, "s_o");
                p.validate(true);
                const Half bp = half_of(p.s_phi - p.s_psi + 2);  // s_phi/2 - s_psi/2 + 1
                const Half so = Half::from_int(p.s_o);
                pt.mean = so <= bp ? encoder_term(p.s_psi, p.s_o) : decoder_mean(p.s_phi, p.s_o);
                pt.active_side = so < bp ? Side::Encoder : Side::Decoder;
                break;
            }
            case Vary::GaussianSD: {
                p.sigma_g = v;
                p.validate(true);
                const Half threshold = encoder_term(p.s_psi, p.s_o) - decoder_mean(p.s_phi, p.s_o);
                // delta_G = 0: the decoder branch holds while 0 < threshold.
                pt.mean = Half::from_twice(0) < threshold ? decoder_mean(p.s_phi, p.s_o) : encoder_term(p.s_psi, p.s_o);
                pt.active_side = threshold < Half::from_twice(0) ? Side::Encoder : Side::Decoder;
                break;
            }
        }
        for (int k = 1; k <= curve.bands; ++k) pt.band_upper.push_back(theorem_bound(p, k * p.sigma_g).overall);
        curve.points.push_back(std::move(pt));
    }

    switch (vary) {
        case Vary::EncoderRF: keep_in_domain(curve, domain, {double(in.s_phi - 2 * in.s_o + 2)}); break;
        case Vary::DecoderRF: keep_in_domain(curve, domain, {double(in.s_psi + 2 * in.s_o - 2)}); break;
        case Vary::ObjectSize: keep_in_domain(curve, domain, {half_of(in.s_phi - in.s_psi + 2).value()}); break;
        case Vary::GaussianSD:
            keep_in_domain(curve, domain, {(encoder_term(in.s_psi, in.s_o) - decoder_mean(in.s_phi, in.s_o)).value()});
            break;
    }
    return curve;
}

BoundCurve sizerange_bound(Vary vary, const std::vector<double>& domain, const BoundInputs& in) {
    if (vary != Vary::EncoderRF && vary != Vary::DecoderRF)
        throw DomainError("sizerange_bound: only enc-rf and dec-rf curves have a size-range form");
    if (!in.size_range) throw DomainError("sizerange_bound: size range [s_o_min, s_o_max] not set");
    require_increasing(domain);

    const int lo = in.size_range->min;
    const int hi = in.size_range->max;
    BoundCurve curve;
    curve.vary = vary;
    curve.fixed = in;
    curve.bands = band_count(in.n_sigma);

    for (double v : domain) {
        BoundInputs p = in;
        p.s_o = hi;
        CurvePoint pt;
        pt.value = v;
        if (vary == Vary::EncoderRF) {
            p.s_psi = integral(v, "s_psi");
            p.validate(true);
            const int bp1 = p.s_phi - 2 * hi + 2;
            const int bp2 = p.s_phi - 2 * lo + 2;
            if (p.s_psi <= bp1) {
                pt.mean = encoder_term(p.s_psi, hi);
                pt.active_side = p.s_psi < bp1 ? Side::Encoder : Side::Decoder;
            } else if (p.s_psi <= bp2) {
                pt.mean = half_of((p.s_psi + p.s_phi - 2) / 2);  // s_psi/4 + s_phi/4 - 1/2
                pt.active_side = Side::Decoder;
            } else {
                pt.mean = decoder_mean(p.s_phi, lo);
                pt.active_side = Side::Decoder;
            }
        } else {
            p.s_phi = integral(v, "s_phi");
            p.validate(true);
            const int bp1 = p.s_psi + 2 * lo - 2;
            const int bp2 = p.s_psi + 2 * hi - 2;
            if (p.s_phi <= bp1) {
                pt.mean = decoder_mean(p.s_phi, lo);
                pt.active_side = Side::Decoder;
            } else if (p.s_phi <= bp2) {
                pt.mean = half_of((p.s_psi + p.s_phi - 2) / 2);
                pt.active_side = Side::Decoder;
            } else {
                pt.mean = encoder_term(p.s_psi, hi);
                pt.active_side = Side::Encoder;
            }
        }
        for (int k = 1; k <= curve.bands; ++k) pt.band_upper.push_back(sizerange_envelope(p, k * p.sigma_g));
        curve.points.push_back(std::move(pt));
    }

    if (vary == Vary::EncoderRF) {
        keep_in_domain(curve, domain, {double(in.s_phi - 2 * hi + 2), double(in.s_phi - 2 * lo + 2)});
    } else {
        keep_in_domain(curve, domain, {double(in.s_psi + 2 * lo - 2), double(in.s_psi + 2 * hi - 2)});
    }
    return curve;
}

}  // namespace equiloc::bounds
