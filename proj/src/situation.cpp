#include "iptree/situation.hpp"

#include <algorithm>
#include <sstream>

namespace iptree {

Situation Situation::prefix(std::size_t n) const {
    n = std::min(n, states_.size());
    return Situation(std::vector<StateIndex>(states_.begin(), states_.begin() + static_cast<std::ptrdiff_t>(n)));
}

Situation Situation::extended(StateIndex x) const {
    auto copy = states_;
    copy.push_back(x);
    return Situation(std::move(copy));
}

bool Situation::precedes(const Situation& other) const {
    return states_.size() <= other.states_.size() && std::equal(states_.begin(), states_.end(), other.states_.begin());
}

void Situation::validate(std::size_t k) const {
    for (auto x : states_) {
        if (x >= k) throw InvalidInput("state index " + std::to_string(x) + " out of range for " + std::to_string(k) + " states");
    }
}

std::string format_situation(const Situation& s, const StateSpace& space) {
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i) out += ',';
        out += space.label(s[i]);
    }
    return out;
}

std::vector<std::string> split_labels(std::string_view text) {
    std::vector<std::string> out;
    if (text.empty()) return out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = text.find(',', start);
        out.emplace_back(text.substr(start, comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

Situation parse_situation(const std::string& text, const StateSpace& space) {
    return situation_from_labels(split_labels(text), space);
}

Situation situation_from_labels(const std::vector<std::string>& labels, const StateSpace& space) {
    std::vector<StateIndex> states;
    states.reserve(labels.size());
    for (const auto& l : labels) states.push_back(space.index_of(l));
    return Situation(std::move(states));
}

std::size_t string_index(std::span<const StateIndex> states, std::size_t k) {
    std::size_t idx = 0;
    for (auto x : states) idx = idx * k + x;
    return idx;
}

Situation string_at(std::size_t index, std::size_t length, std::size_t k) {
    std::vector<StateIndex> states(length);
    for (std::size_t i = length; i-- > 0;) {
        states[i] = static_cast<StateIndex>(index % k);
        index /= k;
    }
    return Situation(std::move(states));
}

std::size_t checked_power(std::size_t k, std::size_t n, std::size_t cap) {
    std::size_t result = 1;
    for (std::size_t i = 0; i < n; ++i) {
        if (k != 0 && result > cap / k) throw ResourceLimit("k^n table size", cap + 1, cap);
        result *= k;
    }
    if (result > cap) throw ResourceLimit("k^n table size", result, cap);
    return result;
}

PrefixCoder::PrefixCoder(std::size_t k, std::size_t depth) : k_(k), depth_(depth) {
    constexpr std::size_t cap = std::size_t{1} << 26;
    offsets_.push_back(0);
    std::size_t level = 1;
    for (std::size_t j = 0; j <= depth; ++j) {
        offsets_.push_back(offsets_.back() + level);
        if (offsets_.back() > cap) throw ResourceLimit("situation table", offsets_.back(), cap);
        level *= k;
    }
}

std::size_t PrefixCoder::length(std::size_t code) const {
    auto it = std::upper_bound(offsets_.begin(), offsets_.end(), code);
    return static_cast<std::size_t>(it - offsets_.begin()) - 1;
}

std::size_t PrefixCoder::next(std::size_t code, StateIndex x) const {
    if (code == deep()) return code;
    const std::size_t len = length(code);
    if (len >= depth_) return deep();
    const std::size_t idx = code - offsets_[len];
    return offsets_[len + 1] + idx * k_ + x;
}

std::size_t PrefixCoder::code_of(const Situation& s) const {
    if (s.size() > depth_) return deep();
    return offsets_[s.size()] + string_index(s.states(), k_);
}

}  // namespace iptree
