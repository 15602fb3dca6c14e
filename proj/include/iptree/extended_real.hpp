#pragma once

#include <cmath>
#include <compare>
#include <limits>
#include <string>

#include "iptree/errors.hpp"

namespace iptree {

/// A value in [-inf, +inf]. NaN is not representable.
///
/// Arithmetic follows the conventions used for extended-real gambles:
/// +inf + (-inf) = +inf and 0 * (+-inf) = 0.
class ExtendedReal {
public:
    constexpr ExtendedReal() = default;
    ExtendedReal(double v) : v_(v) {  // NOLINT: implicit from double is intended
        if (std::isnan(v)) throw InvalidInput("ExtendedReal: NaN is not an extended real");
    }

    static ExtendedReal pos_inf() { return ExtendedReal(std::numeric_limits<double>::infinity()); }
    static ExtendedReal neg_inf() { return ExtendedReal(-std::numeric_limits<double>::infinity()); }

    double value() const noexcept { return v_; }
    bool is_finite() const noexcept { return std::isfinite(v_); }
    bool is_pos_inf() const noexcept { return v_ == std::numeric_limits<double>::infinity(); }
    bool is_neg_inf() const noexcept { return v_ == -std::numeric_limits<double>::infinity(); }

    friend ExtendedReal operator+(ExtendedReal a, ExtendedReal b) {
        if (a.is_pos_inf() || b.is_pos_inf()) return pos_inf();
        return ExtendedReal(a.v_ + b.v_);
    }
    friend ExtendedReal operator-(ExtendedReal a) { return ExtendedReal(-a.v_); }
    friend ExtendedReal operator-(ExtendedReal a, ExtendedReal b) { return a + (-b); }

    // Scaling by a real; 0 * inf = 0.
    friend ExtendedReal operator*(double lambda, ExtendedReal a) {
        if (lambda == 0.0) return ExtendedReal(0.0);
        return ExtendedReal(lambda * a.v_);
    }

    friend bool operator==(ExtendedReal a, ExtendedReal b) noexcept { return a.v_ == b.v_; }
    friend std::partial_ordering operator<=>(ExtendedReal a, ExtendedReal b) noexcept { return a.v_ <=> b.v_; }

private:
    double v_ = 0.0;
};

/// "+inf", "-inf", or the shortest round-trip decimal form.
std::string to_string(ExtendedReal x);

}  // namespace iptree
