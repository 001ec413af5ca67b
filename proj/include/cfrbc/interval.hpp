#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>

namespace cfrbc {

/// Closed subinterval [lower, upper] of the unit interval.
///
/// This is the truth-value carrier for interval-valued inference. Type-1
/// values are represented as degenerate intervals (lower == upper), so both
/// inference paths share the same arithmetic.
class Interval {
public:
    constexpr Interval() = default;

    /// Throws std::invalid_argument unless 0 <= lower <= upper <= 1.
    Interval(double lower, double upper) : lower_(lower), upper_(upper) {
        if (!(0.0 <= lower && lower <= upper && upper <= 1.0)) {
            throw std::invalid_argument("interval [" + std::to_string(lower) + ", " +
                                        std::to_string(upper) + "] is not in L([0,1])");
        }
    }

    static Interval degenerate(double value) { return {value, value}; }

    [[nodiscard]] constexpr double lower() const noexcept { return lower_; }
    [[nodiscard]] constexpr double upper() const noexcept { return upper_; }
    [[nodiscard]] constexpr double width() const noexcept { return upper_ - lower_; }
    [[nodiscard]] constexpr bool is_degenerate() const noexcept { return lower_ == upper_; }

    friend constexpr bool operator==(const Interval&, const Interval&) = default;

private:
    double lower_ = 0.0;
    double upper_ = 0.0;
};

/// Parameters (alpha, beta) of the lexicographic admissible order.
///
/// Not to be confused with the conformal significance level.
struct OrderParams {
    double alpha = 0.5;
    double beta = 1.0;

    /// Throws std::invalid_argument if alpha == beta or either is outside [0,1].
    void validate() const;

    friend constexpr bool operator==(const OrderParams&, const OrderParams&) = default;
};

/// K_a(x) = (1-a)·lower + a·upper, clamped to [lower, upper].
///
/// Each term is monotone in its endpoint, so the result is monotone in both
/// endpoints under IEEE rounding; the product-order refinement of the
/// admissible order depends on that.
[[nodiscard]] inline double k_a(const Interval& x, double a) noexcept {
    const double v = (1.0 - a) * x.lower() + a * x.upper();
    return std::clamp(v, x.lower(), x.upper());
}

/// x <=_{alpha,beta} y. Ties on K_alpha are compared exactly (no epsilon).
[[nodiscard]] inline bool leq_admissible(const Interval& x, const Interval& y,
                                         const OrderParams& p) noexcept {
    const double kx = k_a(x, p.alpha);
    const double ky = k_a(y, p.alpha);
    if (kx < ky) return true;
    if (kx > ky) return false;
    return k_a(x, p.beta) <= k_a(y, p.beta);
}

/// Strict part of the admissible order: x <= y and not y <= x.
[[nodiscard]] inline bool less_admissible(const Interval& x, const Interval& y,
                                          const OrderParams& p) noexcept {
    const double kx = k_a(x, p.alpha);
    const double ky = k_a(y, p.alpha);
    if (kx < ky) return true;
    if (kx > ky) return false;
    return k_a(x, p.beta) < k_a(y, p.beta);
}

/// Strict-weak-ordering adaptor for std::sort and friends.
struct AdmissibleLess {
    OrderParams params;
    bool operator()(const Interval& x, const Interval& y) const noexcept {
        return less_admissible(x, y, params);
    }
};

/// (1,1) - x = [1 - upper, 1 - lower].
[[nodiscard]] inline Interval sub_from_one(const Interval& x) {
    return {1.0 - x.upper(), 1.0 - x.lower()};
}

/// Endpoint-wise product; both operands are nonnegative so this is the
/// interval product restricted to L([0,1]).
[[nodiscard]] inline Interval product(const Interval& x, const Interval& y) {
    return {x.lower() * y.lower(), x.upper() * y.upper()};
}

/// Larger of the two under the admissible order (x on ties).
[[nodiscard]] inline const Interval& max_admissible(const Interval& x, const Interval& y,
                                                    const OrderParams& p) noexcept {
    return less_admissible(x, y, p) ? y : x;
}

std::string to_string(const Interval& x);

}  // namespace cfrbc
