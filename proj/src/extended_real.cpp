#include "iptree/extended_real.hpp"

#include <array>
#include <charconv>

namespace iptree {

std::string to_string(ExtendedReal x) {
    if (x.is_pos_inf()) return "+inf";
    if (x.is_neg_inf()) return "-inf";
    std::array<char, 32> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x.value());
    return std::string(buf.data(), end);
}

}  // namespace iptree
