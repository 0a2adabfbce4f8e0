// Coverings: a tree morphism pi plus a strategy map phi subject to three
// laws. Locality: level-n output depends only on levels <= n of the
// input. Lifting: plays of phi(s) lift to plays of s. The k-covering
// clause: below level k, phi is the map induced by the level bijection
// of pi.
//
// The default phi is built from pi alone by fiber tracking: it simulates
// the target play while maintaining the set of all consistent lifts, and
// at the strategy holder's turns emits the least letter from which every
// continuation of the target play still has a lift. The set-valued state
// plus that liftability filter make the construction law-optimal given
// pi: whenever any strategy map could satisfy the lifting law for a
// given input strategy, this one does.

#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gsg/core.hpp"
#include "gsg/game.hpp"
#include "gsg/limits.hpp"
#include "gsg/morphism.hpp"
#include "gsg/strategy.hpp"
#include "gsg/tree.hpp"

namespace gsg {

struct StrategyMap {
    std::function<Strategy(Player, const Strategy&)> apply;
};

struct Covering {
    TreeMorphism pi;   // source tree -> target tree
    StrategyMap phi;   // strategies on the source -> same player's on the target
    int k = 0;
};

namespace detail {

inline std::string node_to_string(const Node& x) {
    std::string s = "[";
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(x[i]);
    }
    return s + "]";
}

// Inverse of the level bijection of pi on nodes of length <= fix.
inline NodeMap<Node> level_inverse(const TreeMorphism& pi, int fix) {
    NodeMap<Node> inv;
    for (const Node& x : pi.source.nodes())
        if (static_cast<int>(x.size()) <= fix) inv[pi.apply(x)] = x;
    return inv;
}

class FiberTracker {
public:
    FiberTracker(TreeMorphism pi, Horizon h)
        : pi_(std::move(pi)), h_(h.value), fix_(fixing_level(pi_)),
          inverse_(level_inverse(pi_, fix_)) {}

    Strategy apply(Player p, const Strategy& sp) const {
        if (sp.player() != p)
            throw ValidationError("fiber tracking: player mismatch");
        Memo memo;
        PreStrategy out;
        out.player = p;

        // On-path frontier: target node -> consistent lifts.
        NodeMap<std::vector<Node>> frontier;
        frontier[Node{}] = {Node{}};

        for (int len = 0; len < h_; ++len) {
            NodeMap<std::vector<Node>> next;
            for (auto& [x, lifts] : frontier) {
                if (static_cast<int>(x.size()) != len) continue;
                if (is_position(x, p)) {
                    auto groups = suggestions(sp, lifts);
                    if (groups.empty())
                        throw LiftStranded(
                            "fiber tracking: no suggested move at " +
                            node_to_string(x));
                    Letter beta = choose(sp, memo, x, groups);
                    out.choices[x] = {beta};
                    next[extend(x, beta)] = std::move(groups.at(beta));
                } else {
                    for (Letter b : pi_.target.child_letters(x)) {
                        std::vector<Node> moved = advance(lifts, b);
                        if (moved.empty())
                            throw LiftStranded(
                                "fiber tracking: no lift for opponent move " +
                                std::to_string(b) + " at " + node_to_string(x));
                        next[extend(x, b)] = std::move(moved);
                    }
                }
            }
            // Off-path own positions of this length.
            for (const Node& x : pi_.target.nodes()) {
                if (static_cast<int>(x.size()) != len ||
                    !is_position(x, p) || out.choices.count(x) ||
                    frontier.count(x))
                    continue;
                out.choices[x] = {off_path_choice(sp, x)};
            }
            frontier = std::move(next);
        }
        return as_strategy(std::move(out), pi_.target, Horizon{h_});
    }

private:
    using Memo = std::map<std::pair<Node, std::vector<Node>>, bool>;

    // The strategy holder's moves, grouped by the emitted target letter.
    std::map<Letter, std::vector<Node>> suggestions(
        const Strategy& sp, const std::vector<Node>& lifts) const {
        std::map<Letter, std::vector<Node>> groups;
        for (const Node& xp : lifts) {
            const auto& ls = sp.pre().at(xp);
            if (ls.empty()) continue;
            Node child = extend(xp, *ls.begin());
            groups[pi_.apply(child).back()].push_back(child);
        }
        return groups;
    }

    // All lifts advanced along an opponent letter: any source child whose
    // image appends that letter stays consistent.
    std::vector<Node> advance(const std::vector<Node>& lifts, Letter b) const {
        std::vector<Node> out;
        for (const Node& xp : lifts)
            for (Letter c = 0; c < pi_.source.alphabet_size(); ++c) {
                Node child = extend(xp, c);
                if (pi_.source.contains(child) && pi_.apply(child).back() == b)
                    out.push_back(child);
            }
        return out;
    }

    // True when every continuation of the target play from x still has a
    // consistent lift, assuming the holder keeps choosing liftable moves.
    bool liftable(const Strategy& sp, Memo& memo, const Node& x,
                  const std::vector<Node>& lifts) const {
        if (static_cast<int>(x.size()) == h_) return !lifts.empty();
        auto key = std::make_pair(x, lifts);
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;
        bool ok;
        if (is_position(x, sp.player())) {
            ok = false;
            for (auto& [beta, moved] : suggestions(sp, lifts))
                if (!moved.empty() &&
                    liftable(sp, memo, extend(x, beta), moved)) {
                    ok = true;
                    break;
                }
        } else {
            ok = true;
            for (Letter b : pi_.target.child_letters(x)) {
                std::vector<Node> moved = advance(lifts, b);
                if (moved.empty() ||
                    !liftable(sp, memo, extend(x, b), moved)) {
                    ok = false;
                    break;
                }
            }
        }
        memo.emplace(std::move(key), ok);
        return ok;
    }

    Letter choose(const Strategy& sp, Memo& memo, const Node& x,
                  const std::map<Letter, std::vector<Node>>& groups) const {
        for (const auto& [beta, moved] : groups)
            if (liftable(sp, memo, extend(x, beta), moved)) return beta;
        return groups.begin()->first;  // no liftable branch; least suggested
    }

    // Below the fixing level the unique lift exists whether or not the
    // position is on-path, and the emitted move is the one induced by
    // pi; beyond it off-path positions take the least legal letter.
    Letter off_path_choice(const Strategy& sp, const Node& x) const {
        if (static_cast<int>(x.size()) < fix_) {
            auto it = inverse_.find(x);
            if (it != inverse_.end()) {
                const auto& ls = sp.pre().at(it->second);
                if (!ls.empty())
                    return pi_.apply(extend(it->second, *ls.begin())).back();
            }
        }
        auto letters = pi_.target.child_letters(x);
        if (letters.empty())
            throw ValidationError("fiber tracking: off-path dead end");
        return letters.front();
    }

    TreeMorphism pi_;
    int h_;
    int fix_;
    NodeMap<Node> inverse_;
};

}  // namespace detail

inline StrategyMap fiber_tracking_phi(const TreeMorphism& pi, Horizon h) {
    if (!validate_morphism(pi))
        throw ValidationError("fiber tracking needs a valid morphism");
    auto tracker = std::make_shared<detail::FiberTracker>(pi, h);
    return StrategyMap{[tracker](Player p, const Strategy& sp) {
        return tracker->apply(p, sp);
    }};
}

inline Covering identity_covering(const Tree& t, Horizon h) {
    TreeMorphism id = identity_morphism(t);
    Covering c{id, fiber_tracking_phi(id, h), std::min(t.depth_bound(), h.value)};
    return c;
}

struct CoveringCheck {
    bool ok = true;
    std::string detail;
    explicit operator bool() const { return ok; }
};

namespace detail {

inline bool restricted_equal(const PreStrategy& a, const PreStrategy& b,
                             int n) {
    if (a.player != b.player) return false;
    auto norm = [n](const PreStrategy& s) {
        NodeMap<std::set<Letter>> m;
        for (const auto& [x, ls] : s.choices)
            if (static_cast<int>(x.size()) < n && !ls.empty()) m[x] = ls;
        return m;
    };
    return norm(a) == norm(b);
}

}  // namespace detail

// Checks the three covering laws over a canonical prefix of each
// player's strategy enumeration on the source; budget bounds the number
// of strategies verified per player. Returns the offending strategy and
// leaf on failure.
inline CoveringCheck verify_covering(const Covering& c, Horizon h,
                                     long long budget) {
    if (budget < 1) throw CapExceeded("verify_covering budget", 0, budget);
    if (fixing_level(c.pi) < c.k)
        return {false, "pi is not " + std::to_string(c.k) + "-fixing"};
    if (!validate_morphism(c.pi)) return {false, "pi is not a morphism"};

    NodeMap<Node> inverse = detail::level_inverse(c.pi, c.k);

    for (Player p : {Player::zero, Player::one}) {
        std::vector<Strategy> ins;
        std::vector<Strategy> outs;
        StrategyEnumerator en(c.pi.source, h, p);
        Strategy sp;
        while (static_cast<long long>(ins.size()) < budget && en.next(sp)) {
            Strategy mapped;
            try {
                mapped = c.phi.apply(p, sp);
            } catch (const LiftStranded& e) {
                return {false, std::string("lift stranded: ") + e.what()};
            }
            if (mapped.player() != p)
                return {false, "phi changed the player"};

            // Lifting: every consistent leaf of phi(s) is the image of a
            // consistent leaf of s.
            NodeSet source_images;
            for (const Node& leaf :
                 consistent_leaves(sp.pre(), c.pi.source, h))
                source_images.insert(c.pi.apply(leaf));
            for (const Node& leaf :
                 consistent_leaves(mapped.pre(), c.pi.target, h))
                if (!source_images.count(leaf))
                    return {false,
                            "lifting fails at leaf " +
                                detail::node_to_string(leaf) + " (strategy #" +
                                std::to_string(ins.size()) + ", player " +
                                std::to_string(player_index(p)) + ")"};

            // k-covering clause: below level k, phi is induced by pi.
            for (const auto& [x, ls] : sp.pre().choices) {
                if (static_cast<int>(x.size()) >= c.k || ls.empty()) continue;
                Letter induced =
                    c.pi.apply(extend(x, *ls.begin())).back();
                const Node& image = c.pi.apply(x);
                if (mapped.choice(image) != induced)
                    return {false, "phi is not induced by pi below level " +
                                       std::to_string(c.k) + " at " +
                                       detail::node_to_string(image)};
            }

            ins.push_back(sp);
            outs.push_back(mapped);
        }

        // Locality over all verified pairs.
        for (std::size_t i = 0; i < ins.size(); ++i)
            for (std::size_t j = i + 1; j < ins.size(); ++j)
                for (int n = 0; n <= h.value; ++n)
                    if (detail::restricted_equal(ins[i].pre(), ins[j].pre(),
                                                 n) &&
                        !detail::restricted_equal(outs[i].pre(),
                                                  outs[j].pre(), n))
                        return {false,
                                "locality fails at level " + std::to_string(n) +
                                    " (strategies #" + std::to_string(i) +
                                    ", #" + std::to_string(j) + ", player " +
                                    std::to_string(player_index(p)) + ")"};
    }
    return {true, ""};
}

// Clopen preimage: the source leaves whose image branch is won by player
// zero.
inline Payoff preimage_payoff(const Covering& c, const Game& g) {
    if (!(g.tree == c.pi.target))
        throw ValidationError("preimage_payoff: game is not over pi's target");
    NodeSet accept;
    for (const Node& leaf : c.pi.source.nodes())
        if (static_cast<int>(leaf.size()) == g.horizon.value &&
            eval_payoff(g, c.pi.apply(leaf)) == Player::zero)
            accept.insert(leaf);
    return Payoff::clopen(std::move(accept));
}

// Structural preimage of a closed payoff: generators pull back to their
// full pi-preimage. Agrees extensionally with preimage_payoff.
inline std::optional<Payoff> structural_preimage(const Covering& c,
                                                 const Game& g) {
    if (!g.payoff.is_closed()) return std::nullopt;
    const auto& gens = std::get<Payoff::Closed>(g.payoff.rep).generators;
    NodeSet out;
    for (const Node& y : c.pi.source.nodes())
        if (gens.count(c.pi.apply(y))) out.insert(y);
    return Payoff::closed(std::move(out));
}

// Maps a strategy through phi and checks the transfer law: a winning
// strategy of the preimage game must land on a winning strategy of g.
inline Strategy transfer(const Covering& c, const Game& g,
                         const Strategy& sigma_prime) {
    Strategy mapped = c.phi.apply(sigma_prime.player(), sigma_prime);
    Game preimage{c.pi.source, g.horizon, preimage_payoff(c, g)};
    if (is_winning(sigma_prime.pre(), preimage) &&
        !is_winning(mapped.pre(), g))
        throw Falsification(
            "transfer: winning strategy mapped to a losing one");
    return mapped;
}

inline Covering compose_coverings(const Covering& c1, const Covering& c2) {
    if (!(c2.pi.target == c1.pi.source))
        throw ValidationError("compose_coverings: source/target mismatch");
    StrategyMap phi1 = c1.phi;
    StrategyMap phi2 = c2.phi;
    StrategyMap phi{[phi1, phi2](Player p, const Strategy& s) {
        return phi1.apply(p, phi2.apply(p, s));
    }};
    return Covering{compose(c1.pi, c2.pi), std::move(phi),
                    std::min(c1.k, c2.k)};
}

// A finite chain of coverings: steps[i] maps stage i+1 down to stage i.
struct CoveringChain {
    std::vector<Covering> steps;

    int stage_count() const { return static_cast<int>(steps.size()) + 1; }
    const Tree& stage(int i) const {
        if (i == 0) return steps.front().pi.target;
        return steps.at(i - 1).pi.source;
    }

    void validate() const {
        if (steps.empty())
            throw ValidationError("covering chain needs at least one step");
        for (std::size_t i = 0; i + 1 < steps.size(); ++i) {
            if (!(steps[i + 1].pi.target == steps[i].pi.source))
                throw ValidationError("covering chain stages do not line up");
            if (steps[i + 1].k < steps[i].k)
                throw ValidationError("covering chain schedule decreases");
        }
    }

    InverseSystem as_inverse_system() const {
        validate();
        std::vector<Tree> stages;
        std::vector<TreeMorphism> transitions;
        std::vector<int> schedule;
        for (int i = 0; i < stage_count(); ++i) stages.push_back(stage(i));
        for (const Covering& c : steps) {
            transitions.push_back(c.pi);
            schedule.push_back(c.k);
        }
        return InverseSystem::from_stages(std::move(stages),
                                          std::move(transitions),
                                          std::move(schedule));
    }
};

// Extends the limit's projection to stage i to a covering. At horizon
// scale the limit agrees with the first stage whose onward schedule
// clears the horizon (the last stage, for a short chain), so the
// covering is the composite of the steps from there down to i, and its
// k is the scheduled fixing level of stage i.
inline Covering extend_limit_covering(const CoveringChain& chain, Horizon h,
                                      int i) {
    chain.validate();
    if (i < 0 || i >= chain.stage_count())
        throw ValidationError("extend_limit_covering: no such stage");
    InverseSystem sys = chain.as_inverse_system();
    int N = detail::stabilized_stage(sys, h.value);

    if (i > N) {
        // Stages past the stabilization point biject with it below the
        // horizon; the projection is the inverse of that bijection.
        TreeMorphism down = chain.steps[N].pi;
        for (int j = N + 1; j < i; ++j)
            down = compose(down, chain.steps[j].pi);
        TreeMorphism up{chain.stage(N), chain.stage(i), {}};
        for (const auto& [x, fx] : down.map) up.map[fx] = x;
        if (!validate_morphism(up))
            throw ValidationError(
                "extend_limit_covering: stages past stabilization do not "
                "biject");
        int k = i < static_cast<int>(chain.steps.size())
                    ? chain.steps[i].k
                    : std::min(fixing_level(up), h.value);
        return Covering{up, fiber_tracking_phi(up, h), k};
    }
    if (i == N) {
        Covering id = identity_covering(chain.stage(N), h);
        if (i < static_cast<int>(chain.steps.size()))
            id.k = chain.steps[i].k;
        return id;
    }
    Covering out = chain.steps[i];
    for (int j = i + 1; j < N; ++j)
        out = compose_coverings(out, chain.steps[j]);
    return out;
}

}  // namespace gsg
