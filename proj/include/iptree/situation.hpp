#pragma once

#include <compare>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "iptree/local_model.hpp"

namespace iptree {

/// A finite history x_1 ... x_n of state indices; the empty history is the initial situation.
class Situation {
public:
    Situation() = default;
    explicit Situation(std::vector<StateIndex> states) : states_(std::move(states)) {}
    Situation(std::initializer_list<StateIndex> states) : states_(states) {}

    std::size_t size() const noexcept { return states_.size(); }
    bool empty() const noexcept { return states_.empty(); }
    StateIndex operator[](std::size_t i) const { return states_[i]; }
    std::span<const StateIndex> states() const noexcept { return states_; }
    auto begin() const noexcept { return states_.begin(); }
    auto end() const noexcept { return states_.end(); }

    Situation prefix(std::size_t n) const;
    Situation extended(StateIndex x) const;
    /// True if this situation is a prefix of (or equal to) `other`.
    bool precedes(const Situation& other) const;
    /// Throws InvalidInput if any index is >= k.
    void validate(std::size_t k) const;

    friend bool operator==(const Situation&, const Situation&) = default;
    friend auto operator<=>(const Situation&, const Situation&) = default;

private:
    std::vector<StateIndex> states_;
};

/// Comma-separated labels; the initial situation prints as the empty string.
std::string format_situation(const Situation& s, const StateSpace& space);
/// Splits "a,b,c" at commas; the empty string gives no labels.
std::vector<std::string> split_labels(std::string_view text);
/// Inverse of format_situation. Throws InvalidInput on unknown labels.
Situation parse_situation(const std::string& text, const StateSpace& space);
Situation situation_from_labels(const std::vector<std::string>& labels, const StateSpace& space);

/// Index of a length-n string in lexicographic order, first state most significant.
std::size_t string_index(std::span<const StateIndex> states, std::size_t k);
/// Inverse of string_index for strings of the given length.
Situation string_at(std::size_t index, std::size_t length, std::size_t k);
/// k^n, throwing ResourceLimit if it exceeds `cap`.
std::size_t checked_power(std::size_t k, std::size_t n, std::size_t cap);

/// Dense numbering of all situations of length <= depth, plus one shared
/// code for every deeper situation. Used as a context automaton.
class PrefixCoder {
public:
    PrefixCoder(std::size_t k, std::size_t depth);

    std::size_t root() const noexcept { return 0; }
    std::size_t next(std::size_t code, StateIndex x) const;
    std::size_t deep() const noexcept { return offsets_.back(); }
    std::size_t count() const noexcept { return offsets_.back() + 1; }
    std::size_t code_of(const Situation& s) const;
    std::size_t length(std::size_t code) const;

private:
    std::size_t k_;
    std::size_t depth_;
    std::vector<std::size_t> offsets_;  // offsets_[j] = number of situations shorter than j
};

}  // namespace iptree
