// The three strategy notions: prestrategy (any choice sets, possibly
// empty), quasistrategy (nonempty choices at reachable own positions),
// strategy (singleton choices at reachable own positions). Functional
// strategies are primary; strategy trees are derived by strategy_subtree.

#pragma once

#include <set>
#include <vector>

#include "gsg/core.hpp"
#include "gsg/game.hpp"
#include "gsg/tree.hpp"

namespace gsg {

struct PreStrategy {
    Player player = Player::zero;
    NodeMap<std::set<Letter>> choices;

    // Absent keys denote the empty choice set.
    const std::set<Letter>& at(const Node& x) const {
        static const std::set<Letter> empty;
        auto it = choices.find(x);
        return it == choices.end() ? empty : it->second;
    }
};

// Keys must be own-parity nodes of t shorter than the horizon, choices
// must be legal one-step extensions.
inline void check_keyed_over(const PreStrategy& s, const Tree& t, Horizon h) {
    for (const auto& [x, ls] : s.choices) {
        if (!is_position(x, s.player))
            throw ValidationError("prestrategy key has opponent parity");
        if (static_cast<int>(x.size()) >= h.value)
            throw ValidationError("prestrategy key at or beyond the horizon");
        if (!t.contains(x))
            throw ValidationError("prestrategy key outside the tree");
        for (Letter a : ls)
            if (!t.contains(extend(x, a)))
                throw ValidationError("prestrategy choice leaves the tree");
    }
}

// The tree of positions reachable while the strategy's own moves follow
// its choice sets; opponent moves are unrestricted.
inline Tree strategy_subtree(const PreStrategy& s, const Tree& t, Horizon h) {
    NodeSet nodes;
    for (const Node& x : t.nodes()) {
        bool ok = true;
        Node prefix;
        for (std::size_t i = 0; i < x.size() && ok; ++i) {
            if (is_position(prefix, s.player) &&
                static_cast<int>(prefix.size()) < h.value &&
                !s.at(prefix).count(x[i]))
                ok = false;
            prefix.push_back(x[i]);
        }
        if (ok) nodes.insert(x);
    }
    return Tree::from_nodes(t.alphabet_size(), t.depth_bound(),
                            std::move(nodes));
}

// Depth-H nodes of the strategy subtree: the plays consistent with s.
inline NodeSet consistent_leaves(const PreStrategy& s, const Tree& t,
                                 Horizon h) {
    NodeSet out;
    Tree sub = strategy_subtree(s, t, h);
    for (const Node& x : sub.nodes())
        if (static_cast<int>(x.size()) == h.value) out.insert(x);
    return out;
}

// Winning: every consistent play is won by the strategy's player. The
// empty prestrategy is vacuously winning.
inline bool is_winning(const PreStrategy& s, const Game& g) {
    for (const Node& leaf : consistent_leaves(s, g.tree, g.horizon))
        if (eval_payoff(g, leaf) != s.player) return false;
    return true;
}

// Keys of length < n survive, everything else is dropped.
inline PreStrategy restrict_levels(const PreStrategy& s, int n) {
    PreStrategy out;
    out.player = s.player;
    for (const auto& [x, ls] : s.choices)
        if (static_cast<int>(x.size()) < n) out.choices[x] = ls;
    return out;
}

struct QuasiStrategy {
    PreStrategy base;
    const PreStrategy& pre() const { return base; }
};

struct Strategy {
    QuasiStrategy base;
    const PreStrategy& pre() const { return base.base; }
    Player player() const { return base.base.player; }

    // Canonical least choice at a key; keys are expected present.
    Letter choice(const Node& x) const {
        const auto& ls = base.base.at(x);
        if (ls.empty())
            throw ValidationError("strategy has no choice at a position");
        return *ls.begin();
    }
};

inline QuasiStrategy as_quasistrategy(PreStrategy s, const Tree& t, Horizon h) {
    check_keyed_over(s, t, h);
    Tree sub = strategy_subtree(s, t, h);
    for (const Node& x : sub.nodes()) {
        if (!is_position(x, s.player) ||
            static_cast<int>(x.size()) >= h.value)
            continue;
        bool any = false;
        for (Letter a : s.at(x))
            if (t.contains(extend(x, a))) any = true;
        if (!any)
            throw ValidationError(
                "quasistrategy has an empty choice at a reachable position");
    }
    return QuasiStrategy{std::move(s)};
}

inline Strategy as_strategy(PreStrategy s, const Tree& t, Horizon h) {
    QuasiStrategy q = as_quasistrategy(std::move(s), t, h);
    Tree sub = strategy_subtree(q.base, t, h);
    for (const Node& x : sub.nodes()) {
        if (!is_position(x, q.base.player) ||
            static_cast<int>(x.size()) >= h.value)
            continue;
        if (q.base.at(x).size() != 1)
            throw ValidationError(
                "strategy choice is not a singleton at a reachable position");
    }
    return Strategy{std::move(q)};
}

namespace detail {

inline std::vector<Node> own_positions(const Tree& t, Horizon h, Player p) {
    std::vector<Node> keys;
    for (const Node& x : t.nodes())
        if (is_position(x, p) && static_cast<int>(x.size()) < h.value)
            keys.push_back(x);
    return keys;  // NodeOrder via tree iteration
}

}  // namespace detail

// Lazily yields every total functional strategy of p in canonical order:
// keys in node order, the last key's choice varying fastest.
class StrategyEnumerator {
public:
    StrategyEnumerator(const Tree& t, Horizon h, Player p)
        : tree_(&t), horizon_(h), player_(p),
          keys_(detail::own_positions(t, h, p)) {
        for (const Node& x : keys_) {
            options_.push_back(t.child_letters(x));
            if (options_.back().empty())
                throw ValidationError(
                    "tree is not pruned: own position with no extension");
        }
        pick_.assign(keys_.size(), 0);
    }

    long long total_count() const {
        long long n = 1;
        for (const auto& o : options_) {
            if (n > caps::enumeration_cap() / static_cast<long long>(o.size()))
                return caps::enumeration_cap() + 1;
            n *= static_cast<long long>(o.size());
        }
        return n;
    }

    bool next(Strategy& out) {
        if (done_) return false;
        PreStrategy s;
        s.player = player_;
        for (std::size_t i = 0; i < keys_.size(); ++i)
            s.choices[keys_[i]] = {options_[i][pick_[i]]};
        out = Strategy{QuasiStrategy{std::move(s)}};
        int i = static_cast<int>(keys_.size()) - 1;
        while (i >= 0 && pick_[i] + 1 == options_[i].size()) pick_[i--] = 0;
        if (i < 0)
            done_ = true;
        else
            ++pick_[i];
        return true;
    }

private:
    const Tree* tree_;
    Horizon horizon_;
    Player player_;
    std::vector<Node> keys_;
    std::vector<std::vector<Letter>> options_;
    std::vector<std::size_t> pick_;
    bool done_ = false;
};

// Every total functional strategy of p, canonically ordered. The count is
// the product of branching degrees over all own positions.
inline std::vector<Strategy> enumerate_strategies(const Tree& t, Horizon h,
                                                  Player p) {
    StrategyEnumerator en(t, h, p);
    caps::check(en.total_count(), "enumerate_strategies");
    std::vector<Strategy> out;
    Strategy s;
    while (en.next(s)) out.push_back(s);
    return out;
}

}  // namespace gsg
