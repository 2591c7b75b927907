#include "fvbs/bfunction.hpp"

#include <cmath>

#include "fvbs/errors.hpp"

namespace fvbs {

std::string to_string(BKind kind) {
    switch (kind) {
        case BKind::Upwind: return "upwind";
        case BKind::ScharfetterGummel: return "scharfetter-gummel";
        case BKind::Centered: return "centered";
        case BKind::Custom: return "custom";
    }
    return "?";
}

namespace {

double sg(double s) {
    // s/(e^s - 1) cancels catastrophically near 0; switch to the series.
    if (std::abs(s) < 1e-5) {
        double s2 = s * s;
        return 1.0 - s / 2.0 + s2 / 12.0 - s2 * s2 / 720.0;
    }
    return s / std::expm1(s);
}

}  // namespace

double b_eval_raw(const BFunction& B, double s) {
    switch (B.kind) {
        case BKind::Upwind: return 1.0 + std::max(-s, 0.0);
        case BKind::ScharfetterGummel: return sg(s);
        case BKind::Centered: return 1.0 - s / 2.0;
        case BKind::Custom: return B.custom(s);
    }
    return 0.0;
}

double b_eval(const BFunction& B, double s) {
    if (B.kind == BKind::Centered && std::abs(s) >= 2.0)
        throw AssemblyError("centered scheme positivity violated: |s| = " + std::to_string(std::abs(s)) +
                            " >= 2 (requires |U_{K,sigma}| d_sigma < 2)");
    return b_eval_raw(B, s);
}

BPropertyReport check_b_properties(const BFunction& B, std::span<const double> samples) {
    BPropertyReport rep;
    rep.b0_ok = std::abs(b_eval_raw(B, 0.0) - 1.0) <= 1e-14;
    rep.positivity_ok = true;
    rep.difference_ok = true;
    for (double s : samples) {
        if (!(b_eval_raw(B, s) > 0.0)) rep.positivity_ok = false;
        double diff = b_eval_raw(B, s) - b_eval_raw(B, -s) + s;
        if (!(std::abs(diff) <= 1e-12 * std::max(1.0, std::abs(s)))) rep.difference_ok = false;
    }
    return rep;
}

std::vector<double> default_b_samples(int per_decade) {
    std::vector<double> out;
    out.push_back(0.0);
    const double lo = -12.0, hi = 2.0;
    int n = static_cast<int>((hi - lo) * per_decade);
    for (int i = 0; i <= n; ++i) {
        double mag = std::pow(10.0, lo + (hi - lo) * i / n);
        out.push_back(mag);
        out.push_back(-mag);
    }
    return out;
}

}  // namespace fvbs
