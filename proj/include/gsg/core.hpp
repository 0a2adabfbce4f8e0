// Shared vocabulary: letters, nodes, players, horizons, error types and
// enumeration caps. Everything downstream builds on the canonical node
// order defined here.

#pragma once

#include <compare>
#include <cstdlib>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace gsg {

// A letter is an index into the ambient alphabet. Unraveled games index
// into letter tables that easily exceed single digits, so plain int.
using Letter = int;

// A node is a finite sequence of letters; the empty node is the root.
using Node = std::vector<Letter>;

// Canonical node order: by length first, then lexicographic. All
// enumerations and tie-breaks in the library use this order.
struct NodeOrder {
    bool operator()(const Node& a, const Node& b) const {
        if (a.size() != b.size()) return a.size() < b.size();
        return a < b;
    }
};

using NodeSet = std::set<Node, NodeOrder>;
template <typename T>
using NodeMap = std::map<Node, T, NodeOrder>;

inline Node concat(const Node& a, const Node& b) {
    Node r = a;
    r.insert(r.end(), b.begin(), b.end());
    return r;
}

inline Node extend(const Node& a, Letter l) {
    Node r = a;
    r.push_back(l);
    return r;
}

inline bool is_prefix(const Node& x, const Node& y) {
    if (x.size() > y.size()) return false;
    return std::equal(x.begin(), x.end(), y.begin());
}

enum class Player : int { zero = 0, one = 1 };

inline Player opponent(Player p) {
    return p == Player::zero ? Player::one : Player::zero;
}

inline int player_index(Player p) { return static_cast<int>(p); }

// Player p moves at positions whose length has parity p; the empty
// position belongs to player zero.
inline bool is_position(const Node& x, Player p) {
    return static_cast<int>(x.size() % 2) == player_index(p);
}

struct Horizon {
    int value = 1;
};

inline Horizon horizon(int h) {
    if (h < 1) throw std::invalid_argument("horizon must be >= 1");
    return Horizon{h};
}

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A constructed value or call argument violates a stated invariant.
struct ValidationError : Error {
    using Error::Error;
};

// An enumeration would exceed the configured cap; carries the count.
struct CapExceeded : Error {
    long long count;
    long long cap;
    CapExceeded(const std::string& what, long long count_, long long cap_)
        : Error(what + " (count " + std::to_string(count_) + " exceeds cap " +
                std::to_string(cap_) + ")"),
          count(count_), cap(cap_) {}
};

// A simulated lift lost track of the play: no consistent source node
// projects onto the observed target move.
struct LiftStranded : Error {
    using Error::Error;
};

// A law the construction is supposed to guarantee failed to hold. These
// are theorem probes, never silently swallowed.
struct Falsification : Error {
    using Error::Error;
};

struct ParseError : Error {
    int line = 0;
    int column = 0;
    ParseError(const std::string& what, int line_ = 0, int column_ = 0)
        : Error(what), line(line_), column(column_) {}
};

namespace caps {

// Default cap on objects produced by a single enumeration sweep. The
// GS_CAPS environment variable overrides it.
inline long long enumeration_cap() {
    static const long long cap = [] {
        if (const char* env = std::getenv("GS_CAPS")) {
            long long v = std::atoll(env);
            if (v > 0) return v;
        }
        return 1000000LL;
    }();
    return cap;
}

inline void check(long long count, const char* what) {
    if (count > enumeration_cap() || count < 0)
        throw CapExceeded(what, count, enumeration_cap());
}

}  // namespace caps

}  // namespace gsg
