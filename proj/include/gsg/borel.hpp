// The sigma-algebra step at finite scale. Borel codes are unraveled by
// structural recursion: closed generators run the unraveling
// construction, complements reuse the child's covering unchanged, and
// finite unions chain one covering per member at increasing fixing
// levels, route the chain through the inverse-limit machinery, and
// finish by unraveling the closed complement of the pulled-back union.
// At finite scale that complement is already settled by the time the
// chain ends, so the last stage degenerates to the identity covering.

#pragma once

#include <vector>

#include "gsg/borel_code.hpp"
#include "gsg/core.hpp"
#include "gsg/covering.hpp"
#include "gsg/game.hpp"
#include "gsg/solver.hpp"
#include "gsg/unravel.hpp"

namespace gsg {

// Preimage of a coded set under a morphism, as a code. Cylinders are
// rewritten through their closed complement, which pulls back generator
// by generator.
inline BorelCode pull_back(const BorelCode& code, const TreeMorphism& pi) {
    auto preimage_set = [&](const NodeSet& gens) {
        NodeSet out;
        for (const Node& y : pi.source.nodes())
            if (gens.count(pi.apply(y))) out.insert(y);
        return out;
    };
    return std::visit(
        [&](const auto& n) -> BorelCode {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, BorelCode::Cylinder>) {
                NodeSet one{NodeOrder{}};
                one.insert(n.node);
                return BorelCode::complement(
                    BorelCode::closed_set(preimage_set(one)));
            } else if constexpr (std::is_same_v<T, BorelCode::ClosedSet>) {
                return BorelCode::closed_set(preimage_set(n.generators));
            } else if constexpr (std::is_same_v<T, BorelCode::Complement>) {
                return BorelCode::complement(pull_back(*n.child, pi));
            } else {
                std::vector<BorelCode> children;
                for (const BorelCode& c : n.children)
                    children.push_back(pull_back(c, pi));
                return BorelCode::union_of(std::move(children));
            }
        },
        code.node);
}

// Genuine unraveling stages a code consumes: one per generator leaf,
// none for complements.
inline int required_stages(const BorelCode& code) {
    return std::visit(
        [&](const auto& n) -> int {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, BorelCode::Cylinder> ||
                          std::is_same_v<T, BorelCode::ClosedSet>) {
                return 1;
            } else if constexpr (std::is_same_v<T, BorelCode::Complement>) {
                return required_stages(*n.child);
            } else {
                int m = 0;
                for (const BorelCode& c : n.children) m += required_stages(c);
                return m;
            }
        },
        code.node);
}

struct CodeUnravelResult {
    Covering covering;              // composite, source -> the game tree
    Game unraveled;                 // clopen preimage of the coded set
    int stages = 0;                 // genuine stages consumed
    std::vector<Covering> chain;    // individual steps, base upwards
};

namespace detail {

// All depth-H leaves above every length-d node agree on the predicate.
template <typename Eval>
bool decided_at(const Tree& t, int horizon, int d, Eval&& eval) {
    for (const Node& x : t.nodes()) {
        if (static_cast<int>(x.size()) != d) continue;
        std::optional<bool> seen;
        for (const Node& leaf : t.nodes()) {
            if (static_cast<int>(leaf.size()) != horizon ||
                !is_prefix(x, leaf))
                continue;
            bool v = eval(leaf);
            if (!seen)
                seen = v;
            else if (*seen != v)
                return false;
        }
    }
    return true;
}

// Antichain of minimal nodes all of whose depth-H leaves satisfy the
// predicate: the generator set of the open set it defines.
template <typename Eval>
NodeSet open_generators(const Tree& t, int horizon, Eval&& eval) {
    NodeMap<bool> all;
    for (int d = horizon; d >= 0; --d)
        for (const Node& x : t.nodes()) {
            if (static_cast<int>(x.size()) != d) continue;
            if (d == horizon) {
                all[x] = eval(x);
            } else {
                bool a = true;
                for (Letter c : t.child_letters(x))
                    if (!all.at(extend(x, c))) {
                        a = false;
                        break;
                    }
                all[x] = a;
            }
        }
    NodeSet gens;
    for (const Node& x : t.nodes()) {
        if (!all.at(x)) continue;
        bool minimal = x.empty() || !all.at(Node(x.begin(), x.end() - 1));
        if (minimal) gens.insert(x);
    }
    return gens;
}

}  // namespace detail

inline CodeUnravelResult unravel_code(const Game& g, const BorelCode& code,
                                      int k) {
    const Horizon h = g.horizon;
    const int H = h.value;

    auto clopen_over = [&](const TreeMorphism& pi) {
        NodeSet accept;
        for (const Node& leaf : pi.source.nodes())
            if (static_cast<int>(leaf.size()) == H &&
                eval_code(code, pi.apply(leaf)))
                accept.insert(leaf);
        return make_game(pi.source, h, Payoff::clopen(std::move(accept)));
    };

    return std::visit(
        [&](const auto& n) -> CodeUnravelResult {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, BorelCode::Cylinder>) {
                // A cylinder is the complement of the closed set
                // generated by its node; the covering is the child's.
                NodeSet one{NodeOrder{}};
                one.insert(n.node);
                CodeUnravelResult r =
                    unravel_code(g, BorelCode::closed_set(std::move(one)), k);
                r.unraveled = clopen_over(r.covering.pi);
                return r;
            } else if constexpr (std::is_same_v<T, BorelCode::ClosedSet>) {
                if (2 * k + 1 >= H)
                    throw ValidationError(
                        "horizon too small for an unraveling stage at level " +
                        std::to_string(k));
                Game closed_game =
                    make_game(g.tree, h, Payoff::closed(n.generators));
                Covering cov = build_unravel_covering(closed_game, k, h).second;
                CodeUnravelResult r{cov, clopen_over(cov.pi), 1, {cov}};
                return r;
            } else if constexpr (std::is_same_v<T, BorelCode::Complement>) {
                CodeUnravelResult r = unravel_code(g, *n.child, k);
                r.unraveled = clopen_over(r.covering.pi);
                return r;
            } else {
                // Union: one stage per member at increasing fixing
                // levels, composed through the limit of the chain.
                std::vector<Covering> steps;
                std::vector<Covering> flat;
                int level = k;
                for (const BorelCode& child : n.children) {
                    BorelCode pulled = child;
                    Game stage_game = g;
                    if (!steps.empty()) {
                        Covering upper = steps.back();
                        for (std::size_t j = steps.size() - 1; j-- > 0;)
                            upper = compose_coverings(steps[j], upper);
                        pulled = pull_back(child, upper.pi);
                        NodeSet accept;
                        for (const Node& leaf : upper.pi.source.nodes())
                            if (static_cast<int>(leaf.size()) == H &&
                                eval_code(pulled, leaf))
                                accept.insert(leaf);
                        stage_game = make_game(upper.pi.source, h,
                                               Payoff::clopen(accept));
                    }
                    CodeUnravelResult sub =
                        unravel_code(stage_game, pulled, level);
                    steps.push_back(sub.covering);
                    flat.insert(flat.end(), sub.chain.begin(),
                                sub.chain.end());
                    level += sub.stages;
                }

                CoveringChain chain{steps};
                Covering lim = extend_limit_covering(chain, h, 0);

                // The pulled-back union over the limit and its closed
                // complement. By now every member is settled by depth
                // 2*level, so the complement usually needs no further
                // unraveling and the stage is the identity covering.
                auto in_union = [&](const Node& leaf) {
                    return eval_code(code, lim.pi.apply(leaf));
                };
                Covering final_cov =
                    identity_covering(lim.pi.source, h);
                int stages = level - k;
                if (!detail::decided_at(lim.pi.source, H,
                                        std::min(2 * level, H), in_union)) {
                    if (2 * level + 1 >= H)
                        throw ValidationError(
                            "horizon too small for the final unraveling "
                            "stage at level " +
                            std::to_string(level));
                    NodeSet gens = detail::open_generators(
                        lim.pi.source, H, in_union);
                    Game complement_game = make_game(
                        lim.pi.source, h, Payoff::closed(std::move(gens)));
                    final_cov =
                        build_unravel_covering(complement_game, level, h)
                            .second;
                    ++stages;
                }

                Covering composite = compose_coverings(lim, final_cov);
                flat.push_back(lim);
                flat.push_back(final_cov);
                CodeUnravelResult r{composite, clopen_over(composite.pi),
                                    stages, std::move(flat)};
                return r;
            }
        },
        code.node);
}

struct PipelineReport {
    Player winner = Player::zero;
    Strategy base_strategy;
    std::vector<Covering> covering_chain;
    int total_fixing = 0;
    Player oracle_winner = Player::zero;
};

// End to end: unravel the code, solve the clopen unraveled game by
// backward induction, carry the winning strategy down the chain, check
// it wins the base game, and cross-check the winner against backward
// induction run directly on the extensional clopen expansion.
inline PipelineReport solve_borel(const Game& g) {
    if (!g.payoff.is_borel())
        throw ValidationError("solve_borel needs a Borel payoff");
    const BorelCode& code = std::get<Payoff::Borel>(g.payoff.rep).code;

    CodeUnravelResult res = unravel_code(g, code, 0);
    SolveResult solved = backward_induction(res.unraveled);
    Strategy base = res.covering.phi.apply(solved.winner, solved.strategy);
    if (!is_winning(base.pre(), g))
        throw Falsification(
            "borel pipeline: transferred strategy is not winning");

    Game expanded = make_game(g.tree, g.horizon, clopen_expansion(g));
    Player oracle = backward_induction(expanded).winner;
    if (oracle != solved.winner)
        throw Falsification(
            "borel pipeline: winner disagrees with the clopen expansion "
            "oracle");

    return PipelineReport{solved.winner, std::move(base),
                          std::move(res.chain),
                          fixing_level(res.covering.pi), oracle};
}

}  // namespace gsg
