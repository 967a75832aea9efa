#pragma once

// Full shift on k symbols: the uniformly hyperbolic base.
//
// Points are eventually periodic bi-infinite sequences, stored as
//   ... left left left | core | right right right ...
// with core[0] sitting at index `origin`. The symbol just before the core is
// the last symbol of `left`; the symbol just after is the first of `right`.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "rng.hpp"

namespace symplab {

using Symbol = std::uint8_t;
using Word = std::vector<Symbol>;

inline Word parse_word(std::string_view s) {
    Word w;
    w.reserve(s.size());
    for (char c : s) {
        if (c < '0' || c > '9') throw DomainError("parse_word: symbols must be decimal digits, got '" + std::string(1, c) + "'");
        w.push_back(static_cast<Symbol>(c - '0'));
    }
    return w;
}

inline std::string word_string(const Word& w) {
    std::string s;
    s.reserve(w.size());
    for (Symbol c : w) s.push_back(static_cast<char>('0' + c));
    return s;
}

struct ShiftSpace {
    int k = 2;
    double lambda = 0.5;
    std::vector<double> weights{0.5, 0.5};

    static ShiftSpace make(int k, double lambda = 0.5, std::vector<double> weights = {}) {
        if (k < 2 || k > 10) throw DomainError("ShiftSpace: alphabet size must lie in [2, 10]");
        if (!(lambda > 0.0 && lambda < 1.0)) throw DomainError("ShiftSpace: lambda must lie in (0, 1)");
        if (weights.empty()) weights.assign(static_cast<std::size_t>(k), 1.0 / k);
        if (static_cast<int>(weights.size()) != k) throw DomainError("ShiftSpace: need one weight per symbol");
        double total = 0.0;
        for (double w : weights) {
            if (!(w >= 0.0)) throw DomainError("ShiftSpace: weights must be non-negative");
            total += w;
        }
        if (std::abs(total - 1.0) > 1e-12) throw DomainError("ShiftSpace: weights must sum to 1");
        return ShiftSpace{k, lambda, std::move(weights)};
    }

    /// Hyperbolicity constants (K, tau) of the shift metric.
    double K() const { return 1.0; }
    double tau() const { return -std::log(lambda); }
};

class SymbolicPoint {
public:
    SymbolicPoint() : SymbolicPoint(Word{0}, Word{}, Word{0}, 0) {}

    SymbolicPoint(Word left, Word core, Word right, long origin)
        : left_(std::move(left)), core_(std::move(core)), right_(std::move(right)), origin_(origin) {
        if (left_.empty() || right_.empty()) throw DomainError("SymbolicPoint: tail words must be non-empty");
    }

    const Word& left() const { return left_; }
    const Word& core() const { return core_; }
    const Word& right() const { return right_; }
    long origin() const { return origin_; }
    /// One past the last core index.
    long end() const { return origin_ + static_cast<long>(core_.size()); }

    Symbol operator[](long i) const {
        if (i >= origin_ && i < end()) return core_[static_cast<std::size_t>(i - origin_)];
        if (i >= end()) {
            const long t = i - end();
            return right_[static_cast<std::size_t>(t % static_cast<long>(right_.size()))];
        }
        const long t = origin_ - 1 - i;
        const auto n = static_cast<long>(left_.size());
        return left_[static_cast<std::size_t>(n - 1 - t % n)];
    }

    /// Copies coordinates [lo, hi).
    Word slice(long lo, long hi) const {
        Word w;
        if (hi <= lo) return w;
        w.reserve(static_cast<std::size_t>(hi - lo));
        for (long i = lo; i < hi; ++i) w.push_back((*this)[i]);
        return w;
    }

    Symbol max_symbol() const {
        Symbol m = 0;
        for (const Word* w : {&left_, &core_, &right_})
            for (Symbol c : *w) m = std::max(m, c);
        return m;
    }

    /// Same sequence, re-anchored so that the core covers [lo, hi) (lo <= origin, hi >= end).
    SymbolicPoint widened(long lo, long hi) const {
        lo = std::min(lo, origin_);
        hi = std::max(hi, end());
        const auto nl = static_cast<long>(left_.size());
        const auto nr = static_cast<long>(right_.size());
        return SymbolicPoint(slice(lo - nl, lo), slice(lo, hi), slice(hi, hi + nr), lo);
    }

private:
    Word left_, core_, right_;
    long origin_ = 0;
};

namespace detail {

inline long lcm_len(std::size_t a, std::size_t b) {
    return static_cast<long>(std::lcm(a, b));
}

/// Index range outside of which both sequences are purely periodic, padded by
/// one joint period on each side so that tail comparisons are conclusive.
inline std::pair<long, long> comparison_window(const SymbolicPoint& x, const SymbolicPoint& y) {
    const long lo = std::min(x.origin(), y.origin()) - lcm_len(x.left().size(), y.left().size());
    const long hi = std::max(x.end(), y.end()) + lcm_len(x.right().size(), y.right().size());
    return {lo, hi};
}

} // namespace detail

inline bool operator==(const SymbolicPoint& x, const SymbolicPoint& y) {
    const auto [lo, hi] = detail::comparison_window(x, y);
    for (long i = lo; i < hi; ++i)
        if (x[i] != y[i]) return false;
    return true;
}

/// Largest index where the sequences differ; nullopt if they never differ.
/// Throws NotOnLeaf if they differ at arbitrarily large indices.
inline std::optional<long> last_disagreement(const SymbolicPoint& x, const SymbolicPoint& y) {
    const auto [lo, hi] = detail::comparison_window(x, y);
    for (long i = hi - 1; i >= std::max(x.end(), y.end()); --i)
        if (x[i] != y[i]) throw NotOnLeaf("futures never agree: points are not on a common stable leaf");
    for (long i = std::max(x.end(), y.end()) - 1; i >= lo; --i)
        if (x[i] != y[i]) return i;
    return std::nullopt;
}

/// Smallest index where the sequences differ; nullopt if they never differ.
/// Throws NotOnLeaf if they differ at arbitrarily negative indices.
inline std::optional<long> first_disagreement(const SymbolicPoint& x, const SymbolicPoint& y) {
    const auto [lo, hi] = detail::comparison_window(x, y);
    const long tail_start = std::min(x.origin(), y.origin());
    for (long i = lo; i < tail_start; ++i)
        if (x[i] != y[i]) throw NotOnLeaf("pasts never agree: points are not on a common unstable leaf");
    for (long i = tail_start; i < hi; ++i)
        if (x[i] != y[i]) return i;
    return std::nullopt;
}

/// Coordinate i of the result is coordinate i + n of x.
inline SymbolicPoint shift(const SymbolicPoint& x, long n = 1) {
    return SymbolicPoint(x.left(), x.core(), x.right(), x.origin() - n);
}

inline SymbolicPoint unshift(const SymbolicPoint& x) { return shift(x, -1); }

/// Largest N such that x_i = y_i for all |i| < N; nullopt when x == y.
inline std::optional<long> agreement_radius(const SymbolicPoint& x, const SymbolicPoint& y) {
    const auto [lo, hi] = detail::comparison_window(x, y);
    const long reach = std::max(-lo, hi) + 1;
    for (long n = 0; n <= reach; ++n) {
        if (x[n] != y[n] || x[-n] != y[-n]) return n;
    }
    return std::nullopt;
}

/// lambda^N with N the agreement radius; 0 iff x == y.
inline double dist(const SymbolicPoint& x, const SymbolicPoint& y, const ShiftSpace& space) {
    const auto n = agreement_radius(x, y);
    if (!n) return 0.0;
    return std::pow(space.lambda, static_cast<double>(*n));
}

/// [x, y]: the point with the past of x (i < 0) and the future of y (i >= 0).
/// Requires dist(x, y) < delta (default lambda).
inline SymbolicPoint bracket(const SymbolicPoint& x, const SymbolicPoint& y, const ShiftSpace& space,
                             std::optional<double> delta = std::nullopt) {
    const double d = dist(x, y, space);
    const double limit = delta.value_or(space.lambda);
    if (!(d < limit))
        throw DomainError("bracket: points too far apart (dist " + std::to_string(d) + " >= " + std::to_string(limit) + ")");
    const SymbolicPoint xw = x.widened(std::min(x.origin(), 0L), 0);
    const SymbolicPoint yw = y.widened(0, std::max(y.end(), 0L));
    Word core = xw.slice(xw.origin(), 0);
    const Word fut = yw.slice(0, yw.end());
    core.insert(core.end(), fut.begin(), fut.end());
    return SymbolicPoint(xw.left(), std::move(core), yw.right(), xw.origin());
}

struct PeriodicPoint {
    Word word;

    std::size_t period() const { return word.size(); }
    SymbolicPoint point() const { return SymbolicPoint(word, Word{}, word, 0); }
};

inline PeriodicPoint periodic_point(Word word) {
    if (word.empty()) throw DomainError("periodic_point: word must be non-empty");
    return PeriodicPoint{std::move(word)};
}

inline PeriodicPoint periodic_point(std::string_view word) { return periodic_point(parse_word(word)); }

/// The point of W^u_loc(q) intersected with W^s_loc(p): past of q, future (i >= 0) of p.
inline SymbolicPoint heteroclinic_point(const PeriodicPoint& p, const PeriodicPoint& q) {
    if (p.point() == q.point()) throw DomainError("heteroclinic_point: p and q must be distinct");
    return SymbolicPoint(q.word, Word{}, p.word, 0);
}

/// Bernoulli sample: core of length 2*depth+1 centered at 0, tails fixed to symbol 0.
inline SymbolicPoint sample_point(const ShiftSpace& space, std::uint64_t seed, long depth) {
    if (depth < 1) throw DomainError("sample_point: depth must be >= 1");
    Rng rng(seed);
    Word core(static_cast<std::size_t>(2 * depth + 1));
    for (auto& c : core) c = static_cast<Symbol>(rng.categorical(space.weights));
    return SymbolicPoint(Word{0}, std::move(core), Word{0}, -depth);
}

} // namespace symplab
