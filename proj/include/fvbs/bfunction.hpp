#ifndef FVBS_BFUNCTION_HPP
#define FVBS_BFUNCTION_HPP

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace fvbs {

enum class BKind { Upwind, ScharfetterGummel, Centered, Custom };

std::string to_string(BKind kind);

/// Flux-shape function B of the B-scheme. Upwind and Scharfetter-Gummel
/// satisfy B(0)=1, B>0, B(s)-B(-s)=-s on all of R; Centered loses
/// positivity at |s| >= 2 and is guarded accordingly.
struct BFunction {
    BKind kind = BKind::Upwind;
    std::function<double(double)> custom;

    bool requires_positivity_guard() const { return kind == BKind::Centered; }

    static BFunction upwind() { return {BKind::Upwind, nullptr}; }
    static BFunction scharfetter_gummel() { return {BKind::ScharfetterGummel, nullptr}; }
    static BFunction centered() { return {BKind::Centered, nullptr}; }
    static BFunction make_custom(std::function<double(double)> fn) {
        return {BKind::Custom, std::move(fn)};
    }
};

/// Raw evaluation of B(s); no validity guard (used by property checks).
double b_eval_raw(const BFunction& B, double s);

/// Guarded evaluation: throws AssemblyError for Centered with |s| >= 2.
double b_eval(const BFunction& B, double s);

struct BPropertyReport {
    bool b0_ok = false;          // |B(0)-1| <= 1e-14
    bool positivity_ok = false;  // B(s) > 0 at all samples
    bool difference_ok = false;  // |B(s)-B(-s)+s| <= 1e-12 max(1,|s|)
    bool all_ok() const { return b0_ok && positivity_ok && difference_ok; }
};

BPropertyReport check_b_properties(const BFunction& B, std::span<const double> samples);

/// Logarithmically spaced magnitudes 1e-12..1e2, both signs, plus 0.
std::vector<double> default_b_samples(int per_decade = 50);

}  // namespace fvbs

#endif
