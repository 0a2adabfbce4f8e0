// Games: a tree pruned to its horizon plus a payoff in one of four
// representations. At horizon scale every payoff is extensionally clopen;
// the representation kind is still tracked because the constructions
// downstream are representation-directed.

#pragma once

#include <optional>
#include <variant>

#include "gsg/borel_code.hpp"
#include "gsg/core.hpp"
#include "gsg/tree.hpp"

namespace gsg {

// Drops generators that have a proper prefix among the generators; the
// unraveling branches on generator hits, and a generator below another
// can never be the first hit.
inline NodeSet normalize_generators(const NodeSet& gens) {
    NodeSet out;
    for (const Node& u : gens) {
        bool shadowed = false;
        for (const Node& v : gens)
            if (v != u && is_prefix(v, u)) {
                shadowed = true;
                break;
            }
        if (!shadowed) out.insert(u);
    }
    return out;
}

struct Payoff {
    struct Clopen {
        NodeSet accept;  // depth-H leaves won by player zero
    };
    struct Closed {
        NodeSet generators;  // leaf in P iff no generator is a prefix
    };
    struct Open {
        NodeSet generators;  // leaf in P iff some generator is a prefix
    };
    struct Borel {
        BorelCode code;
    };

    std::variant<Clopen, Closed, Open, Borel> rep;

    static Payoff clopen(NodeSet accept) { return {Clopen{std::move(accept)}}; }
    static Payoff closed(NodeSet gens) {
        return {Closed{normalize_generators(gens)}};
    }
    static Payoff open(NodeSet gens) {
        return {Open{normalize_generators(gens)}};
    }
    static Payoff borel(BorelCode code) { return {Borel{std::move(code)}}; }

    bool is_clopen() const { return std::holds_alternative<Clopen>(rep); }
    bool is_closed() const { return std::holds_alternative<Closed>(rep); }
    bool is_open() const { return std::holds_alternative<Open>(rep); }
    bool is_borel() const { return std::holds_alternative<Borel>(rep); }
};

struct Game {
    Tree tree;
    Horizon horizon;
    Payoff payoff;
};

namespace detail {

inline void check_code(const Game& g, const BorelCode& code);

inline void check_payoff_nodes(const Game& g) {
    const int H = g.horizon.value;
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, Payoff::Clopen>) {
                for (const Node& x : p.accept) {
                    if (static_cast<int>(x.size()) != H)
                        throw ValidationError(
                            "clopen accept node is not a depth-H leaf");
                    if (!g.tree.contains(x))
                        throw ValidationError(
                            "clopen accept node outside game tree");
                }
            } else if constexpr (std::is_same_v<T, Payoff::Closed> ||
                                 std::is_same_v<T, Payoff::Open>) {
                for (const Node& x : p.generators) {
                    if (static_cast<int>(x.size()) > H)
                        throw ValidationError("generator longer than horizon");
                    if (!g.tree.contains(x))
                        throw ValidationError("generator outside game tree");
                }
            } else {
                // Borel: generator nodes checked here as well.
                check_code(g, p.code);
            }
        },
        g.payoff.rep);
}

inline void check_code(const Game& g, const BorelCode& code) {
    const int H = g.horizon.value;
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, BorelCode::Cylinder>) {
                if (static_cast<int>(n.node.size()) > H)
                    throw ValidationError("cylinder node longer than horizon");
                if (!g.tree.contains(n.node))
                    throw ValidationError("cylinder node outside game tree");
            } else if constexpr (std::is_same_v<T, BorelCode::ClosedSet>) {
                for (const Node& u : n.generators) {
                    if (static_cast<int>(u.size()) > H)
                        throw ValidationError("generator longer than horizon");
                    if (!g.tree.contains(u))
                        throw ValidationError("generator outside game tree");
                }
            } else if constexpr (std::is_same_v<T, BorelCode::Complement>) {
                check_code(g, *n.child);
            } else {
                for (const BorelCode& c : n.children) check_code(g, c);
            }
        },
        code.node);
}

}  // namespace detail

inline Game make_game(Tree tree, Horizon h, Payoff payoff) {
    if (h.value < 1) throw ValidationError("horizon must be >= 1");
    for (const Node& x : tree.nodes())
        if (static_cast<int>(x.size()) > h.value)
            throw ValidationError("game tree has nodes beyond the horizon");
    if (tree.depth_bound() < h.value)
        tree = Tree::from_nodes(tree.alphabet_size(), h.value, tree.nodes());
    if (!is_pruned_to_horizon(tree, h))
        throw ValidationError("game tree is not pruned to the horizon");
    // Depth bound pinned to the horizon so subgame bounds line up.
    Game g{level_restrict(tree, h.value), h, std::move(payoff)};
    detail::check_payoff_nodes(g);
    return g;
}

// Winner of the branch through a depth-H leaf: zero iff the branch lies
// in the payoff set.
inline Player eval_payoff(const Game& g, const Node& leaf) {
    if (static_cast<int>(leaf.size()) != g.horizon.value ||
        !g.tree.contains(leaf))
        throw ValidationError("eval_payoff: malformed leaf");
    bool in_p = std::visit(
        [&](const auto& p) -> bool {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, Payoff::Clopen>) {
                return p.accept.count(leaf) > 0;
            } else if constexpr (std::is_same_v<T, Payoff::Closed>) {
                for (const Node& u : p.generators)
                    if (is_prefix(u, leaf)) return false;
                return true;
            } else if constexpr (std::is_same_v<T, Payoff::Open>) {
                for (const Node& u : p.generators)
                    if (is_prefix(u, leaf)) return true;
                return false;
            } else {
                return eval_code(p.code, leaf);
            }
        },
        g.payoff.rep);
    return in_p ? Player::zero : Player::one;
}

// Least d >= |x| such that all depth-H leaves below each depth-d
// descendant of x agree on the payoff. At horizon scale d = H always
// qualifies; the optional is reserved for payoffs that are not
// horizon-decided.
inline std::optional<int> decision_depth(const Game& g, const Node& x) {
    if (!g.tree.contains(x))
        throw ValidationError("decision_depth: node outside game tree");
    const int H = g.horizon.value;
    for (int d = static_cast<int>(x.size()); d <= H; ++d) {
        bool decided = true;
        for (const Node& y : g.tree.nodes()) {
            if (static_cast<int>(y.size()) != d || !is_prefix(x, y)) continue;
            std::optional<Player> seen;
            for (const Node& leaf : g.tree.nodes()) {
                if (static_cast<int>(leaf.size()) != H || !is_prefix(y, leaf))
                    continue;
                Player w = eval_payoff(g, leaf);
                if (!seen) {
                    seen = w;
                } else if (*seen != w) {
                    decided = false;
                    break;
                }
            }
            if (!decided) break;
        }
        if (decided) return d;
    }
    return std::nullopt;
}

// Complement swaps the winner on every leaf: clopen accept sets are
// complemented, closed and open swap, Borel codes gain a Complement.
inline Payoff complement_payoff(const Game& g) {
    const int H = g.horizon.value;
    return std::visit(
        [&](const auto& p) -> Payoff {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, Payoff::Clopen>) {
                NodeSet accept;
                for (const Node& leaf : g.tree.nodes())
                    if (static_cast<int>(leaf.size()) == H &&
                        !p.accept.count(leaf))
                        accept.insert(leaf);
                return Payoff::clopen(std::move(accept));
            } else if constexpr (std::is_same_v<T, Payoff::Closed>) {
                return Payoff{Payoff::Open{p.generators}};
            } else if constexpr (std::is_same_v<T, Payoff::Open>) {
                return Payoff{Payoff::Closed{p.generators}};
            } else {
                return Payoff::borel(BorelCode::complement(p.code));
            }
        },
        g.payoff.rep);
}

// Extensional clopen expansion: the accept set spelled out leaf by leaf.
inline Payoff clopen_expansion(const Game& g) {
    NodeSet accept;
    for (const Node& leaf : g.tree.nodes())
        if (static_cast<int>(leaf.size()) == g.horizon.value &&
            eval_payoff(g, leaf) == Player::zero)
            accept.insert(leaf);
    return Payoff::clopen(std::move(accept));
}

}  // namespace gsg
