// The unraveling of a closed game. Moves of the auxiliary game carry a
// base letter plus a tree over the base alphabet; the tree payload
// encodes the implicitly played strategies:
//
//   at length 2k   the mover also plays a quasistrategy of herself on
//                  the subgame one letter further in, as its subtree;
//   at length 2k+1 the mover either exhibits a pencil around a witness
//                  node all of whose base continuations are lost for
//                  player zero (winning condition), or commits to a
//                  quasistrategy of herself under which every joint play
//                  stays clear of the generators (losing condition);
//   elsewhere      the payload is forced: the subtree of the constraint
//                  tree under the chosen letter.
//
// Following the played trees is then just membership in the constraint
// tree, and the winner of every play is settled by length 2k+2.

#pragma once

#include <utility>
#include <vector>

#include "gsg/core.hpp"
#include "gsg/covering.hpp"
#include "gsg/game.hpp"
#include "gsg/morphism.hpp"
#include "gsg/strategy.hpp"
#include "gsg/tree.hpp"

namespace gsg {

struct UnravelLetter {
    Letter base = 0;
    Tree aux;

    friend bool operator==(const UnravelLetter& a, const UnravelLetter& b) {
        return a.base == b.base && a.aux == b.aux;
    }
};

struct UnravelLetterOrder {
    bool operator()(const UnravelLetter& a, const UnravelLetter& b) const {
        if (a.base != b.base) return a.base < b.base;
        return canonical_less(a.aux, b.aux);
    }
};

// The constraint tree governing continuations: the base tree at the
// root, thereafter the payload of the last move, reseated to the
// remaining depth.
inline Tree get_tree(const Game& base, const std::vector<UnravelLetter>& x) {
    if (x.empty())
        return level_restrict(base.tree, base.horizon.value);
    int bound = base.horizon.value - static_cast<int>(x.size());
    if (bound < 0)
        throw ValidationError("get_tree: position beyond the horizon");
    return Tree::from_nodes(base.tree.alphabet_size(), bound,
                            x.back().aux.nodes());
}

inline Node unravel_project(const std::vector<UnravelLetter>& x) {
    Node p;
    p.reserve(x.size());
    for (const UnravelLetter& l : x) p.push_back(l.base);
    return p;
}

namespace detail {

// hit: some generator is a prefix. all_hit: every depth-H leaf below
// has a prefix among the generators.
struct ClosedAnalysis {
    NodeMap<bool> hit;
    NodeMap<bool> all_hit;
};

inline ClosedAnalysis analyze_closed(const Game& g) {
    if (!g.payoff.is_closed())
        throw ValidationError("closed analysis needs a closed payoff");
    const auto& gens = std::get<Payoff::Closed>(g.payoff.rep).generators;
    const int H = g.horizon.value;
    ClosedAnalysis out;
    for (const Node& v : g.tree.nodes()) {
        bool h = false;
        for (const Node& u : gens)
            if (is_prefix(u, v)) {
                h = true;
                break;
            }
        out.hit[v] = h;
    }
    for (int d = H; d >= 0; --d)
        for (const Node& v : g.tree.nodes()) {
            if (static_cast<int>(v.size()) != d) continue;
            if (out.hit.at(v)) {
                out.all_hit[v] = true;
            } else if (d == H) {
                out.all_hit[v] = false;
            } else {
                bool all = true;
                for (Letter a : g.tree.child_letters(v))
                    if (!out.all_hit.at(extend(v, a))) {
                        all = false;
                        break;
                    }
                out.all_hit[v] = all;
            }
        }
    return out;
}

// Subtrees of quasistrategies of the odd-parity player on R: nonempty,
// all children kept at even depths, at least one child kept at odd
// depths below the bound. Both special payloads have this parity: the
// subgame root sits one letter past the mover, so her next own move is
// at odd subgame depth.
inline bool is_quasistrategy_subtree(const Tree& q, const Tree& r) {
    if (q.empty() || !q.contains(Node{})) return false;
    for (const Node& y : q.nodes()) {
        if (!r.contains(y)) return false;
        if (y.size() % 2 == 0) {
            for (Letter a : r.child_letters(y))
                if (!q.contains(extend(y, a))) return false;
        } else if (static_cast<int>(y.size()) < r.depth_bound()) {
            if (q.child_letters(y).empty() && !r.child_letters(y).empty())
                return false;
        }
    }
    return true;
}

inline std::vector<Tree> quasistrategy_subtrees(const Tree& r) {
    std::vector<Tree> out;
    if (r.empty()) return out;

    NodeSet nodes;
    nodes.insert(Node{});
    std::vector<Node> pending{Node{}};

    auto rec = [&](auto&& self, std::size_t i) -> void {
        if (i == pending.size()) {
            out.push_back(
                Tree::from_nodes(r.alphabet_size(), r.depth_bound(), nodes));
            caps::check(static_cast<long long>(out.size()),
                        "quasistrategy_subtrees");
            return;
        }
        const Node y = pending[i];  // copy: pending grows below
        std::vector<Letter> children = r.child_letters(y);
        if (children.empty()) {
            self(self, i + 1);
            return;
        }
        auto push_subset = [&](unsigned mask) {
            std::size_t added = 0;
            for (std::size_t j = 0; j < children.size(); ++j)
                if (mask >> j & 1u) {
                    Node child = extend(y, children[j]);
                    nodes.insert(child);
                    pending.push_back(child);
                    ++added;
                }
            self(self, i + 1);
            while (added--) {
                nodes.erase(pending.back());
                pending.pop_back();
            }
        };
        if (y.size() % 2 == 0) {
            push_subset((1u << children.size()) - 1u);  // opponent: keep all
        } else {
            for (unsigned mask = 1; mask < (1u << children.size()); ++mask)
                push_subset(mask);
        }
    };
    rec(rec, 0);
    return out;
}

// Prefixes of the spine plus every descendant of the spine inside the
// ambient subtree. The spine forces play up to the witness; the cone
// frees it afterwards.
inline Tree pencil(const Node& w, const Tree& r) {
    NodeSet nodes;
    for (std::size_t i = 0; i <= w.size(); ++i)
        nodes.insert(Node(w.begin(), w.begin() + i));
    for (const Node& y : r.nodes())
        if (is_prefix(w, y)) nodes.insert(y);
    return Tree::from_nodes(r.alphabet_size(), r.depth_bound(),
                            std::move(nodes));
}

}  // namespace detail

// Move at length 2k+1, first disjunct: the payload is the subtree of a
// quasistrategy of the mover under which every play consistent with both
// played quasistrategies avoids the generators.
inline bool losing_condition(const Game& base, int k,
                             const std::vector<UnravelLetter>& xa) {
    if (static_cast<int>(xa.size()) != 2 * k + 2)
        throw ValidationError("losing_condition: position length is not 2k+2");
    std::vector<UnravelLetter> x(xa.begin(), xa.end() - 1);
    const UnravelLetter& a = xa.back();
    Tree gt = get_tree(base, x);
    if (!gt.contains(Node{a.base})) return false;
    Tree r = sub_at(gt, Node{a.base});
    if (!detail::is_quasistrategy_subtree(a.aux, r)) return false;

    detail::ClosedAnalysis an = detail::analyze_closed(base);
    Node p = unravel_project(xa);
    for (const Node& leaf : a.aux.nodes()) {
        if (static_cast<int>(leaf.size()) != r.depth_bound()) continue;
        if (an.hit.at(concat(p, leaf))) return false;
    }
    return true;
}

// Move at length 2k+1, second disjunct: the payload is the pencil of a
// witness node such that every depth-H leaf of the base tree through the
// projected position and the witness has a prefix among the generators.
inline bool winning_condition(const Game& base, int k,
                              const std::vector<UnravelLetter>& xa) {
    if (static_cast<int>(xa.size()) != 2 * k + 2)
        throw ValidationError(
            "winning_condition: position length is not 2k+2");
    std::vector<UnravelLetter> x(xa.begin(), xa.end() - 1);
    const UnravelLetter& a = xa.back();
    Tree gt = get_tree(base, x);
    if (!gt.contains(Node{a.base})) return false;
    Tree r = sub_at(gt, Node{a.base});

    detail::ClosedAnalysis an = detail::analyze_closed(base);
    Node p = unravel_project(xa);
    for (const Node& w : r.nodes())
        if (an.all_hit.at(concat(p, w)) && detail::pencil(w, r) == a.aux)
            return true;
    return false;
}

inline bool valid_ext(const Game& base, int k,
                      const std::vector<UnravelLetter>& x,
                      const UnravelLetter& a) {
    Tree gt = get_tree(base, x);
    if (!gt.contains(Node{a.base})) return false;
    Tree r = sub_at(gt, Node{a.base});
    int len = static_cast<int>(x.size());
    if (len == 2 * k) return detail::is_quasistrategy_subtree(a.aux, r);
    if (len == 2 * k + 1) {
        std::vector<UnravelLetter> xa = x;
        xa.push_back(a);
        return losing_condition(base, k, xa) || winning_condition(base, k, xa);
    }
    return a.aux == r;
}

struct UnravelGame {
    Game base_game;
    int k = 0;
    std::vector<UnravelLetter> letters;  // canonical; index = letter value
    Tree tree;                           // over letter indices
    TreeMorphism pi;                     // tree -> base tree
    Game clopen_game;                    // (tree, H, preimage payoff)
};

inline std::pair<UnravelGame, Covering> build_unravel_covering(const Game& g,
                                                               int k,
                                                               Horizon h) {
    if (!g.payoff.is_closed())
        throw ValidationError("unraveling needs a closed payoff");
    if (h.value != g.horizon.value)
        throw ValidationError("unraveling horizon differs from the game's");
    const int H = h.value;
    if (2 * k + 1 >= H)
        throw ValidationError(
            "unraveling needs 2k+1 < H so both special moves fit");

    detail::ClosedAnalysis an = detail::analyze_closed(g);

    struct PosRec {
        int parent = -1;
        UnravelLetter move;
        Tree constraint;
        Node projected;
    };
    std::vector<PosRec> recs;
    recs.push_back(
        PosRec{-1, {}, level_restrict(g.tree, H), Node{}});
    std::vector<std::vector<int>> levels{{0}};

    std::set<UnravelLetter, UnravelLetterOrder> alphabet;

    for (int len = 0; len < H; ++len) {
        std::vector<int> next;
        for (int idx : levels[len]) {
            const Tree constraint = recs[idx].constraint;
            const Node projected = recs[idx].projected;
            std::set<UnravelLetter, UnravelLetterOrder> moves;

            for (Letter b : constraint.child_letters(Node{})) {
                Tree r = sub_at(constraint, Node{b});
                if (len == 2 * k) {
                    for (Tree& q : detail::quasistrategy_subtrees(r))
                        moves.insert(UnravelLetter{b, std::move(q)});
                } else if (len == 2 * k + 1) {
                    Node pb = extend(projected, b);
                    for (Tree& q : detail::quasistrategy_subtrees(r)) {
                        bool clear = true;
                        for (const Node& leaf : q.nodes()) {
                            if (static_cast<int>(leaf.size()) !=
                                r.depth_bound())
                                continue;
                            if (an.hit.at(concat(pb, leaf))) {
                                clear = false;
                                break;
                            }
                        }
                        if (clear) moves.insert(UnravelLetter{b, std::move(q)});
                    }
                    for (const Node& w : r.nodes())
                        if (an.all_hit.at(concat(pb, w)))
                            moves.insert(UnravelLetter{b, detail::pencil(w, r)});
                } else {
                    moves.insert(UnravelLetter{b, std::move(r)});
                }
            }

            if (moves.empty()) {
                if (len == 2 * k + 1)
                    throw Falsification(
                        "unraveling: a position of length 2k+1 has no valid "
                        "extension; residual closed determinacy fails at " +
                        detail::node_to_string(projected));
                throw Falsification(
                    "unraveling: constraint tree ran dry before the horizon");
            }

            for (const UnravelLetter& m : moves) {
                caps::check(static_cast<long long>(recs.size()) + 1,
                            "build_unravel_covering positions");
                alphabet.insert(m);
                Tree child_constraint = Tree::from_nodes(
                    g.tree.alphabet_size(), H - len - 1, m.aux.nodes());
                recs.push_back(PosRec{idx, m, std::move(child_constraint),
                                      extend(projected, m.base)});
                next.push_back(static_cast<int>(recs.size()) - 1);
            }
        }
        levels.push_back(std::move(next));
    }

    UnravelGame u;
    u.base_game = g;
    u.k = k;
    u.letters.assign(alphabet.begin(), alphabet.end());

    std::map<UnravelLetter, Letter, UnravelLetterOrder> index;
    for (std::size_t i = 0; i < u.letters.size(); ++i)
        index[u.letters[i]] = static_cast<Letter>(i);

    // Rebuild positions as index sequences; recs are in creation order,
    // parents first.
    std::vector<Node> as_nodes(recs.size());
    NodeSet tree_nodes;
    tree_nodes.insert(Node{});
    for (std::size_t i = 1; i < recs.size(); ++i) {
        as_nodes[i] = extend(as_nodes[recs[i].parent], index.at(recs[i].move));
        tree_nodes.insert(as_nodes[i]);
    }
    u.tree = Tree::from_nodes(
        std::max<int>(1, static_cast<int>(u.letters.size())), H,
        std::move(tree_nodes));

    u.pi = TreeMorphism{u.tree, level_restrict(g.tree, H), {}};
    for (std::size_t i = 0; i < recs.size(); ++i)
        u.pi.map[as_nodes[i]] = recs[i].projected;

    if (!is_pruned_to_horizon(u.tree, h))
        throw Falsification("unraveling produced an unpruned tree");
    if (!validate_morphism(u.pi))
        throw Falsification("unraveling projection is not a morphism");
    if (fixing_level(u.pi) < 2 * k)
        throw Falsification("unraveling projection is not 2k-fixing");

    Covering c{u.pi, fiber_tracking_phi(u.pi, h), k};
    u.clopen_game = Game{u.tree, h, preimage_payoff(c, g)};
    return {std::move(u), std::move(c)};
}

// Every position of length 2k+2 settles the preimage payoff: all
// depth-H leaves above it agree.
inline bool check_preimage_clopen(const UnravelGame& u) {
    const int H = u.clopen_game.horizon.value;
    const int cut = 2 * u.k + 2;
    for (const Node& x : u.tree.nodes()) {
        if (static_cast<int>(x.size()) != cut) continue;
        std::optional<Player> seen;
        for (const Node& leaf : u.tree.nodes()) {
            if (static_cast<int>(leaf.size()) != H || !is_prefix(x, leaf))
                continue;
            Player w = eval_payoff(u.clopen_game, leaf);
            if (!seen)
                seen = w;
            else if (*seen != w)
                return false;
        }
    }
    return true;
}

}  // namespace gsg
