// The self-test corpus: every exhaustive invariant sweep the library
// promises, bounded by alphabet and horizon caps. Each suite reports how
// many checks it ran; the first violated law is reported as a
// falsification with detail.

#pragma once

#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gsg/borel.hpp"
#include "gsg/covering.hpp"
#include "gsg/io.hpp"
#include "gsg/limits.hpp"
#include "gsg/solver.hpp"
#include "gsg/unravel.hpp"

namespace gsg {

struct SuiteResult {
    std::string name;
    long long checks = 0;
    bool ok = true;
    std::string detail;
};

namespace selftest_detail {

struct Check {
    long long count = 0;
    void require(bool cond, const std::string& what) {
        ++count;
        if (!cond) throw Falsification(what);
    }
};

inline std::vector<NodeSet> generator_sets(const Tree& t, int max_size) {
    std::vector<Node> pool(t.nodes().begin(), t.nodes().end());
    std::vector<NodeSet> out;
    out.push_back({});
    for (std::size_t i = 0; i < pool.size(); ++i) {
        NodeSet one;
        one.insert(pool[i]);
        out.push_back(one);
        if (max_size < 2) continue;
        for (std::size_t j = i + 1; j < pool.size(); ++j) {
            NodeSet two;
            two.insert(pool[i]);
            two.insert(pool[j]);
            out.push_back(two);
        }
    }
    return out;
}

inline std::vector<NodeSet> all_leaf_sets(const Tree& t, int h) {
    std::vector<Node> leaves;
    for (const Node& x : t.nodes())
        if (static_cast<int>(x.size()) == h) leaves.push_back(x);
    std::vector<NodeSet> out;
    for (unsigned long long mask = 0; mask < (1ull << leaves.size());
         ++mask) {
        NodeSet s;
        for (std::size_t i = 0; i < leaves.size(); ++i)
            if (mask >> i & 1ull) s.insert(leaves[i]);
        out.push_back(std::move(s));
    }
    return out;
}

inline Player play_pair(const Game& g, const Strategy& s0,
                        const Strategy& s1) {
    Node x;
    while (static_cast<int>(x.size()) < g.horizon.value)
        x.push_back((x.size() % 2 == 0 ? s0 : s1).choice(x));
    return eval_payoff(g, x);
}

inline Player pair_enumeration_winner(const Game& g) {
    auto zeros = enumerate_strategies(g.tree, g.horizon, Player::zero);
    auto ones = enumerate_strategies(g.tree, g.horizon, Player::one);
    for (const Strategy& s0 : zeros) {
        bool wins_all = true;
        for (const Strategy& s1 : ones)
            if (play_pair(g, s0, s1) != Player::zero) {
                wins_all = false;
                break;
            }
        if (wins_all) return Player::zero;
    }
    return Player::one;
}

inline Tree random_pruned_tree(std::mt19937& rng, int alphabet, int h) {
    Tree t(alphabet, h);
    t.insert_with_prefixes({});
    std::vector<Node> frontier{Node{}};
    for (int d = 0; d < h; ++d) {
        std::vector<Node> next;
        for (const Node& x : frontier) {
            bool any = false;
            for (Letter a = 0; a < alphabet; ++a)
                if (rng() % 2) {
                    t.insert_with_prefixes(extend(x, a));
                    next.push_back(extend(x, a));
                    any = true;
                }
            if (!any) {
                Letter a = static_cast<Letter>(rng() % alphabet);
                t.insert_with_prefixes(extend(x, a));
                next.push_back(extend(x, a));
            }
        }
        frontier = std::move(next);
    }
    return t;
}

inline SuiteResult run_suite(const std::string& name,
                             const std::function<void(Check&)>& body) {
    SuiteResult r;
    r.name = name;
    Check c;
    try {
        body(c);
    } catch (const std::exception& e) {
        r.ok = false;
        r.detail = e.what();
    }
    r.checks = c.count;
    return r;
}

}  // namespace selftest_detail

inline std::vector<SuiteResult> run_selftest(int max_alphabet,
                                             int max_horizon) {
    namespace sd = selftest_detail;
    std::vector<SuiteResult> out;
    const int a_cap = std::max(1, max_alphabet);
    const int h_cap = std::max(1, max_horizon);

    out.push_back(sd::run_suite("tree-laws", [&](sd::Check& c) {
        for (int a = 1; a <= std::min(a_cap, 2); ++a)
            for (int d = 0; d <= 2; ++d) {
                auto trees = enumerate_trees(a, d);
                long long expected = detail::tree_count(a, d, 1 << 30);
                c.require(static_cast<long long>(trees.size()) == expected,
                          "tree count misses the recurrence");
                Tree full = Tree::full(a, d);
                for (const Tree& t : trees) {
                    for (const Node& y : t.nodes())
                        if (!y.empty())
                            c.require(
                                t.contains(Node(y.begin(), y.end() - 1)),
                                "prefix closure");
                    for (const Node& x : full.nodes()) {
                        Tree once = sub_at(t, x);
                        for (const Node& y : full.nodes()) {
                            if (x.size() + y.size() >
                                static_cast<std::size_t>(d))
                                continue;
                            c.require(sub_at(once, y) ==
                                          sub_at(t, concat(x, y)),
                                      "sub_at composition");
                        }
                    }
                    for (int m = 0; m <= d; ++m)
                        for (int n = 0; n <= d; ++n)
                            c.require(
                                level_restrict(level_restrict(t, m), n) ==
                                    level_restrict(t, std::min(m, n)),
                                "level_restrict law");
                }
            }
    }));

    out.push_back(sd::run_suite("payoff-representations", [&](sd::Check& c) {
        for (int a = 1; a <= std::min(a_cap, 2); ++a)
            for (int h = 1; h <= std::min(h_cap, 3); ++h) {
                Tree full = Tree::full(a, h);
                for (const NodeSet& gens : sd::generator_sets(full, 2)) {
                    Game closed =
                        make_game(full, Horizon{h}, Payoff::closed(gens));
                    Game expanded = make_game(full, Horizon{h},
                                              clopen_expansion(closed));
                    Game comp = make_game(full, Horizon{h},
                                          complement_payoff(closed));
                    for (const Node& leaf : full.nodes()) {
                        if (static_cast<int>(leaf.size()) != h) continue;
                        c.require(eval_payoff(closed, leaf) ==
                                      eval_payoff(expanded, leaf),
                                  "closed/clopen expansion agreement");
                        c.require(eval_payoff(comp, leaf) ==
                                      opponent(eval_payoff(closed, leaf)),
                                  "complement swaps the winner");
                    }
                }
            }
    }));

    out.push_back(sd::run_suite("strategy-laws", [&](sd::Check& c) {
        for (int h = 2; h <= std::min(h_cap, 3); ++h) {
            Tree full = Tree::full(2, h);
            Horizon hz{h};
            for (Player p : {Player::zero, Player::one}) {
                long long opp_moves = 1;
                for (int d = player_index(opponent(p)); d < h; d += 2)
                    opp_moves *= 2;
                for (const Strategy& s : enumerate_strategies(full, hz, p)) {
                    c.require(static_cast<long long>(
                                  consistent_leaves(s.pre(), full, hz)
                                      .size()) == opp_moves,
                              "consistent leaf count");
                    PreStrategy wider = s.pre();
                    for (auto& [x, ls] : wider.choices) {
                        std::set<Letter> all;
                        for (Letter l : full.child_letters(x)) all.insert(l);
                        ls = all;
                    }
                    Tree sub = strategy_subtree(s.pre(), full, hz);
                    Tree wide = strategy_subtree(wider, full, hz);
                    for (const Node& x : sub.nodes())
                        c.require(wide.contains(x), "subtree monotone");
                }
            }
        }
    }));

    out.push_back(sd::run_suite("zermelo-oracle", [&](sd::Check& c) {
        Tree full2 = Tree::full(2, 2);
        for (const NodeSet& accept : sd::all_leaf_sets(full2, 2)) {
            Game g = make_game(full2, Horizon{2}, Payoff::clopen(accept));
            SolveResult r = backward_induction(g);
            c.require(r.winner == sd::pair_enumeration_winner(g),
                      "zermelo vs pair enumeration");
            c.require(is_winning(r.strategy.pre(), g),
                      "backward induction strategy wins");
            c.require(winning_region(g, Player::zero).count(Node{}) +
                              winning_region(g, Player::one).count(Node{}) ==
                          1,
                      "determinacy at the root");
        }
        if (h_cap >= 3) {
            std::mt19937 rng(7);
            Tree full3 = Tree::full(2, 3);
            std::vector<Node> leaves;
            for (const Node& x : full3.nodes())
                if (x.size() == 3) leaves.push_back(x);
            for (int i = 0; i < 60; ++i) {
                NodeSet accept;
                for (const Node& leaf : leaves)
                    if (rng() % 2) accept.insert(leaf);
                Game g =
                    make_game(full3, Horizon{3}, Payoff::clopen(accept));
                c.require(backward_induction(g).winner ==
                              sd::pair_enumeration_winner(g),
                          "zermelo vs pair enumeration at H=3");
            }
        }
    }));

    out.push_back(sd::run_suite("defensive-closed", [&](sd::Check& c) {
        std::mt19937 rng(20240811);
        int games = 0;
        while (games < 60) {
            int alphabet = 1 + static_cast<int>(rng() % std::min(a_cap, 3));
            int h = 2 + static_cast<int>(rng() % std::max(1, std::min(h_cap, 4) - 1));
            Tree t = sd::random_pruned_tree(rng, alphabet, h);
            std::vector<Node> pool(t.nodes().begin(), t.nodes().end());
            NodeSet gens;
            for (unsigned i = rng() % 4; i > 0; --i)
                gens.insert(pool[rng() % pool.size()]);
            Game g = make_game(t, Horizon{h}, Payoff::closed(gens));
            ++games;
            if (winning_region(g, Player::one).count(Node{})) continue;
            QuasiStrategy q = defensive_quasistrategy(g);
            for (int i = 0; i < 10; ++i) {
                PreStrategy s;
                s.player = Player::zero;
                for (const auto& [x, ls] : q.base.choices) {
                    std::vector<Letter> v(ls.begin(), ls.end());
                    s.choices[x] = {v[rng() % v.size()]};
                }
                c.require(is_winning(s, g),
                          "defensive refinement is winning");
            }
        }
    }));

    out.push_back(sd::run_suite("morphism-fixing", [&](sd::Check& c) {
        Tree full = Tree::full(2, 2);
        auto endos = enumerate_morphisms(full, full);
        for (const TreeMorphism& f : endos) {
            c.require(validate_morphism(f), "enumerated morphism valid");
            for (const TreeMorphism& g : endos)
                c.require(fixing_level(compose(g, f)) >=
                              std::min(fixing_level(g), fixing_level(f)),
                          "composite fixing min rule");
        }
    }));

    out.push_back(sd::run_suite("inverse-limits", [&](sd::Check& c) {
        Tree s2 = Tree::full(2, 3);
        auto collapse = [&](const Tree& t, std::size_t from) {
            NodeSet nodes;
            for (const Node& x : t.nodes()) {
                Node y = x;
                for (std::size_t i = from; i < y.size(); ++i) y[i] = 0;
                nodes.insert(y);
            }
            return Tree::from_nodes(t.alphabet_size(), t.depth_bound(),
                                    std::move(nodes));
        };
        auto collapse_map = [&](const Tree& source, const Tree& target,
                                std::size_t from) {
            TreeMorphism f{source, target, {}};
            for (const Node& x : source.nodes()) {
                Node y = x;
                for (std::size_t i = from; i < y.size(); ++i) y[i] = 0;
                f.map[x] = y;
            }
            return f;
        };
        Tree s1 = collapse(s2, 2);
        Tree s0 = collapse(s2, 1);
        InverseSystem sys = InverseSystem::from_stages(
            {s0, s1, s2},
            {collapse_map(s1, s0, 1), collapse_map(s2, s1, 2)}, {1, 2, 3});
        TreeLimit lim = limit_tree(sys, 3);
        for (int i = 0; i <= lim.stabilized_stage; ++i)
            c.require(is_k_fixing(lim.projections[i], sys.fixing_schedule(i)),
                      "projection fixing schedule");
        for (int i = 0; i + 1 <= lim.stabilized_stage; ++i)
            c.require(compose(sys.transition(i), lim.projections[i + 1]).map ==
                          lim.projections[i].map,
                      "projections commute");
        for (int n = 0; n <= 3; ++n)
            c.require(level_functor_check(sys, n),
                      "level restriction preserves the limit");
        // eventual constancy: stabilized projections are level bijections
        for (int n = 0; n <= 3; ++n) {
            TreeLimit ln = limit_tree(sys, n);
            for (int i = 0; i <= ln.stabilized_stage; ++i)
                if (sys.fixing_schedule(i) >= n)
                    c.require(is_k_fixing(ln.projections[i], n),
                              "eventual constancy");
        }
    }));

    out.push_back(sd::run_suite("unravel-construction", [&](sd::Check& c) {
        for (int h = 2; h <= std::min(h_cap, 3); ++h) {
            Tree full = Tree::full(std::min(a_cap, 2), h);
            for (const NodeSet& gens : sd::generator_sets(full, 2)) {
                Game g = make_game(full, Horizon{h}, Payoff::closed(gens));
                auto [u, cov] = build_unravel_covering(g, 0, Horizon{h});
                c.require(is_pruned_to_horizon(u.tree, Horizon{h}),
                          "unraveled tree pruned");
                c.require(fixing_level(u.pi) >= 0, "projection 2k-fixing");
                c.require(check_preimage_clopen(u),
                          "preimage settled by 2k+2");
                Game expanded =
                    make_game(g.tree, g.horizon, clopen_expansion(g));
                c.require(backward_induction(u.clopen_game).winner ==
                              backward_induction(expanded).winner,
                          "unraveled winner agrees with zermelo");
            }
        }
    }));

    out.push_back(sd::run_suite("covering-laws", [&](sd::Check& c) {
        for (int h = 2; h <= std::min(h_cap, 3); ++h) {
            Tree full = Tree::full(std::min(a_cap, 2), h);
            for (const NodeSet& gens : sd::generator_sets(full, 1)) {
                Game g = make_game(full, Horizon{h}, Payoff::closed(gens));
                auto [u, cov] = build_unravel_covering(g, 0, Horizon{h});
                CoveringCheck chk = verify_covering(cov, Horizon{h}, 16);
                c.require(chk.ok, "covering laws: " + chk.detail);
                SolveResult solved = backward_induction(u.clopen_game);
                for (const Strategy& sp : enumerate_winning_strategies(
                         u.clopen_game, solved.winner, 8)) {
                    Strategy base = transfer(cov, g, sp);
                    c.require(is_winning(base.pre(), g),
                              "transfer preserves winning");
                }
            }
        }
    }));

    out.push_back(sd::run_suite("borel-pipeline", [&](sd::Check& c) {
        std::vector<BorelCode> leaves;
        Tree full2 = Tree::full(2, 2);
        for (const Node& x : full2.nodes())
            if (x.size() <= 1) leaves.push_back(BorelCode::cylinder(x));
        leaves.push_back(BorelCode::closed_set({}));
        {
            NodeSet g1;
            g1.insert({0});
            leaves.push_back(BorelCode::closed_set(g1));
            NodeSet g2;
            g2.insert({1});
            g2.insert({0, 0});
            leaves.push_back(BorelCode::closed_set(g2));
        }
        for (const BorelCode& leaf : leaves) {
            PipelineReport r = solve_borel(
                make_game(full2, Horizon{2}, Payoff::borel(leaf)));
            c.require(r.winner == r.oracle_winner, "pipeline vs oracle");
            PipelineReport rc = solve_borel(make_game(
                full2, Horizon{2},
                Payoff::borel(BorelCode::complement(leaf))));
            c.require(rc.winner == rc.oracle_winner,
                      "pipeline vs oracle (complement)");
        }
        if (h_cap >= 4) {
            Tree full4 = Tree::full(2, 4);
            std::vector<BorelCode> members;
            members.push_back(BorelCode::cylinder({0, 0}));
            members.push_back(BorelCode::cylinder({1, 1}));
            {
                NodeSet gs;
                gs.insert({1});
                members.push_back(BorelCode::closed_set(gs));
            }
            for (const BorelCode& a : members)
                for (const BorelCode& b : members) {
                    PipelineReport r = solve_borel(
                        make_game(full4, Horizon{4},
                                  Payoff::borel(BorelCode::union_of({a, b}))));
                    c.require(r.winner == r.oracle_winner,
                              "pipeline vs oracle (union)");
                }
        }
    }));

    out.push_back(sd::run_suite("file-roundtrip", [&](sd::Check& c) {
        Tree full = Tree::full(2, 2);
        NodeSet accept;
        accept.insert({0, 0});
        accept.insert({0, 1});
        std::vector<Game> games;
        games.push_back(make_game(full, Horizon{2}, Payoff::clopen(accept)));
        NodeSet gens;
        gens.insert({1});
        games.push_back(make_game(full, Horizon{2}, Payoff::closed(gens)));
        games.push_back(make_game(
            full, Horizon{2},
            Payoff::borel(BorelCode::union_of(
                {BorelCode::cylinder({0, 0}), BorelCode::cylinder({1, 1})}))));
        for (const Game& g : games) {
            Game back = parse_game_file(print_game_file(g));
            c.require(back.tree == g.tree, "round-trip tree");
            c.require(print_game_file(back) == print_game_file(g),
                      "round-trip stability");
        }
    }));

    return out;
}

}  // namespace gsg
