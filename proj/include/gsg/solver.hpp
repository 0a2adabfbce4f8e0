// Determinacy engines: backward induction over the horizon (Zermelo) and
// the defensive construction for closed payoffs, which never moves into
// the opponent's winning region.

#pragma once

#include <vector>

#include "gsg/core.hpp"
#include "gsg/game.hpp"
#include "gsg/strategy.hpp"

namespace gsg {

namespace detail {

// Winner of the residual game at every node, by backward induction from
// the depth-H leaves.
inline NodeMap<Player> residual_winners(const Game& g) {
    const int H = g.horizon.value;
    NodeMap<Player> value;
    for (int d = H; d >= 0; --d) {
        for (const Node& x : g.tree.nodes()) {
            if (static_cast<int>(x.size()) != d) continue;
            if (d == H) {
                value[x] = eval_payoff(g, x);
                continue;
            }
            Player mover = x.size() % 2 == 0 ? Player::zero : Player::one;
            Player v = opponent(mover);
            for (Letter a : g.tree.child_letters(x))
                if (value.at(extend(x, a)) == mover) {
                    v = mover;
                    break;
                }
            value[x] = v;
        }
    }
    return value;
}

}  // namespace detail

// Nodes from which p wins the residual game.
inline NodeSet winning_region(const Game& g, Player p) {
    NodeSet out;
    for (const auto& [x, w] : detail::residual_winners(g))
        if (w == p) out.insert(x);
    return out;
}

struct SolveResult {
    Player winner = Player::zero;
    Strategy strategy;      // winning strategy for the winner
    NodeSet region;         // positions where player one wins
};

inline SolveResult backward_induction(const Game& g) {
    NodeMap<Player> value = detail::residual_winners(g);
    Player winner = value.at(Node{});

    // At the winner's own nodes pick the least child that stays in the
    // winning region; off the region any legal child does.
    PreStrategy s;
    s.player = winner;
    for (const Node& x : g.tree.nodes()) {
        if (!is_position(x, winner) ||
            static_cast<int>(x.size()) >= g.horizon.value)
            continue;
        Letter pick = -1;
        for (Letter a : g.tree.child_letters(x)) {
            if (pick < 0) pick = a;
            if (value.at(extend(x, a)) == winner) {
                pick = a;
                break;
            }
        }
        s.choices[x] = {pick};
    }

    SolveResult r{winner, as_strategy(std::move(s), g.tree, g.horizon), {}};
    for (const auto& [x, w] : value)
        if (w == Player::one) r.region.insert(x);
    return r;
}

// Player zero's quasistrategy allowing exactly the moves outside player
// one's winning region. Every strategy refining it is winning for zero.
inline QuasiStrategy defensive_quasistrategy(const Game& g) {
    if (!g.payoff.is_closed())
        throw ValidationError("defensive quasistrategy needs a closed payoff");
    NodeSet region_one = winning_region(g, Player::one);
    if (region_one.count(Node{}))
        throw ValidationError(
            "player one wins from the root; no defensive quasistrategy");

    PreStrategy s;
    s.player = Player::zero;
    for (const Node& x : g.tree.nodes()) {
        if (!is_position(x, Player::zero) ||
            static_cast<int>(x.size()) >= g.horizon.value)
            continue;
        std::set<Letter> allowed;
        for (Letter a : g.tree.child_letters(x))
            if (!region_one.count(extend(x, a))) allowed.insert(a);
        if (!allowed.empty()) s.choices[x] = std::move(allowed);
    }
    return as_quasistrategy(std::move(s), g.tree, g.horizon);
}

// Winning strategies of p, canonically ordered, at most budget of them.
// At reachable own nodes inside the region the choice ranges over the
// region-staying children; off-path freedom is collapsed to the least
// letter, which never affects the consistent plays.
inline std::vector<Strategy> enumerate_winning_strategies(const Game& g,
                                                          Player p,
                                                          long long budget) {
    NodeMap<Player> value = detail::residual_winners(g);
    if (value.at(Node{}) != p) return {};

    std::vector<Node> keys =
        detail::own_positions(g.tree, g.horizon, p);
    std::vector<std::vector<Letter>> options;
    for (const Node& x : keys) {
        std::vector<Letter> region_children;
        for (Letter a : g.tree.child_letters(x))
            if (value.at(extend(x, a)) == p) region_children.push_back(a);
        if (value.at(x) == p && !region_children.empty())
            options.push_back(std::move(region_children));
        else
            options.push_back({g.tree.child_letters(x).front()});
    }

    std::vector<Strategy> out;
    std::vector<std::size_t> pick(keys.size(), 0);
    while (static_cast<long long>(out.size()) < budget) {
        PreStrategy s;
        s.player = p;
        for (std::size_t i = 0; i < keys.size(); ++i)
            s.choices[keys[i]] = {options[i][pick[i]]};
        out.push_back(Strategy{QuasiStrategy{std::move(s)}});
        int i = static_cast<int>(keys.size()) - 1;
        while (i >= 0 && pick[i] + 1 == options[i].size()) pick[i--] = 0;
        if (i < 0) break;
        ++pick[i];
    }
    return out;
}

}  // namespace gsg
