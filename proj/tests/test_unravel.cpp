#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "gsg/borel.hpp"
#include "gsg/solver.hpp"
#include "gsg/unravel.hpp"

using namespace gsg;

namespace {

NodeSet nodes_of(std::initializer_list<Node> xs) {
    NodeSet s;
    for (const Node& x : xs) s.insert(x);
    return s;
}

Game closed_game(int h, NodeSet gens, int alphabet = 2) {
    return make_game(Tree::full(alphabet, h), Horizon{h},
                     Payoff::closed(std::move(gens)));
}

Tree tree_of(int alphabet, int depth, std::initializer_list<Node> nodes) {
    NodeSet s;
    for (const Node& x : nodes) s.insert(x);
    return Tree::from_nodes(alphabet, depth, std::move(s));
}

// The unique depth-1 constraint tree below one letter of a full binary
// game: both continuations allowed.
Tree full1() { return tree_of(2, 1, {{}, {0}, {1}}); }

}  // namespace

TEST_CASE("get_tree follows the payload chain") {
    Game g = closed_game(2, nodes_of({{1}}));
    CHECK(get_tree(g, {}) == g.tree);

    UnravelLetter first{0, full1()};
    CHECK(get_tree(g, {first}) == full1());
    CHECK(get_tree(g, {first}).depth_bound() == 1);
}

TEST_CASE("quasistrategy subtree recognition and enumeration") {
    // On the full binary depth-2 subgame the odd-parity player picks a
    // nonempty subset at each of the two depth-1 nodes: 3 x 3 subtrees.
    Tree r = Tree::full(2, 2);
    auto subs = detail::quasistrategy_subtrees(r);
    CHECK(subs.size() == 9);
    for (const Tree& q : subs) {
        CHECK(detail::is_quasistrategy_subtree(q, r));
        CHECK(is_pruned_to_horizon(q, Horizon{2}));
    }
    // the full subtree and a singleton-choice subtree are among them
    CHECK(std::count(subs.begin(), subs.end(), r) == 1);
    Tree narrow = tree_of(2, 2, {{}, {0}, {1}, {0, 0}, {1, 0}});
    CHECK(std::count(subs.begin(), subs.end(), narrow) == 1);

    // dropping an opponent child is not a quasistrategy subtree
    Tree skip_opponent = tree_of(2, 2, {{}, {0}, {0, 0}});
    CHECK_FALSE(detail::is_quasistrategy_subtree(skip_opponent, r));
    // an empty own choice below the bound is not either
    Tree starved = tree_of(2, 2, {{}, {0}, {1}, {0, 0}});
    CHECK_FALSE(detail::is_quasistrategy_subtree(starved, r));
    // depth-1 subgames admit exactly one subtree
    CHECK(detail::quasistrategy_subtrees(full1()).size() == 1);
}

TEST_CASE("valid_ext at the three kinds of lengths") {
    Game g = closed_game(3, nodes_of({{1}}));
    Tree base1 = sub_at(g.tree, {0});  // depth-2 full binary

    // at length 2k: any quasistrategy subtree of the subgame
    for (const Tree& q : detail::quasistrategy_subtrees(base1))
        CHECK(valid_ext(g, 0, {}, UnravelLetter{0, q}));
    CHECK_FALSE(valid_ext(g, 0, {},
                          UnravelLetter{0, tree_of(2, 2, {{}, {0}, {0, 0}})}));

    // regular moves force the subtree payload
    Game g2 = closed_game(3, nodes_of({{1}}));
    auto built = build_unravel_covering(g2, 0, Horizon{3});
    const UnravelGame& u = built.first;
    // find a length-2 position and check its extensions
    for (const Node& x : u.tree.nodes()) {
        if (x.size() != 2) continue;
        std::vector<UnravelLetter> pos;
        for (Letter idx : x) pos.push_back(u.letters[idx]);
        Tree gt = get_tree(u.base_game, pos);
        for (Letter b : gt.child_letters(Node{})) {
            Tree forced = sub_at(gt, Node{b});
            CHECK(valid_ext(u.base_game, 0, pos, UnravelLetter{b, forced}));
            // any other payload is rejected
            Tree wrong = tree_of(2, 2, {{}});
            if (!(wrong == forced))
                CHECK_FALSE(
                    valid_ext(u.base_game, 0, pos, UnravelLetter{b, wrong}));
        }
        break;
    }
}

TEST_CASE("winning and losing conditions at H=2") {
    Game g = closed_game(2, nodes_of({{1}}));
    Tree eps = tree_of(2, 0, {{}});

    // player zero played 1: every extension hits the generator, the
    // pencil around the current position qualifies
    std::vector<UnravelLetter> won{{1, full1()}, {0, eps}};
    CHECK(winning_condition(g, 0, won));
    CHECK_FALSE(losing_condition(g, 0, won));

    // player zero played 0: the unique quasistrategy guarantees staying
    // clear of the generators
    std::vector<UnravelLetter> safe{{0, full1()}, {0, eps}};
    CHECK(losing_condition(g, 0, safe));
    CHECK_FALSE(winning_condition(g, 0, safe));

    // generators everywhere at depth 1: no quasistrategy can avoid them
    Game hopeless = closed_game(2, nodes_of({{0}, {1}}));
    CHECK_FALSE(losing_condition(hopeless, 0, safe));
    CHECK(winning_condition(hopeless, 0, safe));

    // no generators at all: nothing to win with
    Game free = closed_game(2, {});
    CHECK(losing_condition(free, 0, safe));
    CHECK_FALSE(winning_condition(free, 0, safe));
}

TEST_CASE("a pencil whose spine leaves the payoff reachable fails") {
    Game g = closed_game(3, nodes_of({{1}}));
    auto built = build_unravel_covering(g, 0, Horizon{3});
    const UnravelGame& u = built.first;
    // pick a level-1 position whose base letter is 0: no extension hits
    for (const Node& x : u.tree.nodes()) {
        if (x.size() != 1 || u.letters[x[0]].base != 0) continue;
        std::vector<UnravelLetter> pos{u.letters[x[0]]};
        Tree gt = get_tree(u.base_game, pos);
        Letter b = gt.child_letters(Node{}).front();
        Tree r = sub_at(gt, Node{b});
        for (const Node& w : r.nodes()) {
            std::vector<UnravelLetter> xa = pos;
            xa.push_back(UnravelLetter{b, detail::pencil(w, r)});
            CHECK_FALSE(winning_condition(u.base_game, 0, xa));
        }
        break;
    }
}

TEST_CASE("unraveling U={[1]} at H=2: full pipeline") {
    Game g = closed_game(2, nodes_of({{1}}));
    auto [u, cov] = build_unravel_covering(g, 0, Horizon{2});

    CHECK(u.letters.size() == 4);
    CHECK(u.tree.size() == 1 + 2 + 4);
    CHECK(is_pruned_to_horizon(u.tree, Horizon{2}));
    CHECK(fixing_level(u.pi) >= 0);
    CHECK(check_preimage_clopen(u));

    CoveringCheck chk = verify_covering(cov, Horizon{2}, 1000);
    INFO(chk.detail);
    CHECK(chk.ok);

    SolveResult solved = backward_induction(u.clopen_game);
    CHECK(solved.winner == Player::zero);
    Strategy base = transfer(cov, g, solved.strategy);
    CHECK(base.player() == Player::zero);
    CHECK(base.choice(Node{}) == 0);
    CHECK(is_winning(base.pre(), g));
}

TEST_CASE("unraveling degenerate payoffs at H=2") {
    // U = {root}: player one already won; every condition move is a
    // winning condition
    Game lost = closed_game(2, nodes_of({Node{}}));
    auto [ul, cl] = build_unravel_covering(lost, 0, Horizon{2});
    for (const Node& x : ul.tree.nodes()) {
        if (x.size() != 2) continue;
        std::vector<UnravelLetter> pos;
        for (Letter idx : x) pos.push_back(ul.letters[idx]);
        CHECK(winning_condition(lost, 0, pos));
        CHECK_FALSE(losing_condition(lost, 0, pos));
    }
    CHECK(backward_induction(ul.clopen_game).winner == Player::one);

    // U empty: everything is in the payoff; only losing moves exist
    Game free = closed_game(2, {});
    auto [uf, cf] = build_unravel_covering(free, 0, Horizon{2});
    for (const Node& x : uf.tree.nodes()) {
        if (x.size() != 2) continue;
        std::vector<UnravelLetter> pos;
        for (Letter idx : x) pos.push_back(uf.letters[idx]);
        CHECK(losing_condition(free, 0, pos));
        CHECK_FALSE(winning_condition(free, 0, pos));
    }
    CHECK(backward_induction(uf.clopen_game).winner == Player::zero);
}

TEST_CASE("fixing level is exactly 2k once payloads carry data") {
    // k=0, H=3: the quasistrategy payloads fan level 1 out to 18 nodes
    Game g = closed_game(3, nodes_of({{1}}));
    auto built = build_unravel_covering(g, 0, Horizon{3});
    CHECK(built.first.tree.level(1).size() == 18);
    CHECK(fixing_level(built.first.pi) == 0);

    // k=1, H=5: two regular levels stay bijective, then the payloads fan
    Game g5 = closed_game(5, nodes_of({{1}}));
    auto built5 = build_unravel_covering(g5, 1, Horizon{5});
    CHECK(fixing_level(built5.first.pi) == 2);
    CHECK(check_preimage_clopen(built5.first));
}

TEST_CASE("winner branch determines the payoff above length 2k+2") {
    for (const NodeSet& gens :
         {NodeSet{}, nodes_of({{1}}), nodes_of({{0, 1}}),
          nodes_of({{0, 1, 1}}), nodes_of({{1}, {0, 0}})}) {
        Game g = closed_game(3, gens);
        auto [u, cov] = build_unravel_covering(g, 0, Horizon{3});
        CHECK(check_preimage_clopen(u));
        for (const Node& x : u.tree.nodes()) {
            if (x.size() != 2) continue;
            std::vector<UnravelLetter> pos;
            for (Letter idx : x) pos.push_back(u.letters[idx]);
            bool win = winning_condition(g, 0, pos);
            bool lose = losing_condition(g, 0, pos);
            CHECK((win || lose));
            CHECK_FALSE((win && lose));
            for (const Node& leaf : u.tree.nodes()) {
                if (leaf.size() != 3 || !is_prefix(x, leaf)) continue;
                CHECK(eval_payoff(u.clopen_game, leaf) ==
                      (win ? Player::one : Player::zero));
            }
        }
    }
}

TEST_CASE("unraveled winner agrees with direct backward induction") {
    for (const NodeSet& gens :
         {NodeSet{}, nodes_of({{1}}), nodes_of({{0, 1}}),
          nodes_of({{1}, {0, 0}}), nodes_of({{0, 1, 1}}),
          nodes_of({Node{}})}) {
        Game g = closed_game(3, gens);
        auto [u, cov] = build_unravel_covering(g, 0, Horizon{3});
        Game expanded = make_game(g.tree, g.horizon, clopen_expansion(g));
        SolveResult direct = backward_induction(expanded);
        SolveResult lifted = backward_induction(u.clopen_game);
        CHECK(direct.winner == lifted.winner);
        Strategy base = transfer(cov, g, lifted.strategy);
        CHECK(is_winning(base.pre(), g));
    }
}

TEST_CASE("covering laws hold on unravel fixtures") {
    for (const NodeSet& gens :
         {nodes_of({{1}}), nodes_of({{0, 1}}), NodeSet{},
          nodes_of({Node{}})}) {
        Game g = closed_game(3, gens);
        auto [u, cov] = build_unravel_covering(g, 0, Horizon{3});
        CoveringCheck chk = verify_covering(cov, Horizon{3}, 60);
        INFO(chk.detail);
        CHECK(chk.ok);
    }
}

TEST_CASE("unraveling rejects a horizon without room for both moves") {
    Game g = closed_game(2, nodes_of({{1}}));
    CHECK_THROWS_AS(build_unravel_covering(g, 1, Horizon{2}),
                    ValidationError);
    Game open_payoff = make_game(Tree::full(2, 2), Horizon{2},
                                 Payoff::open(nodes_of({{1}})));
    CHECK_THROWS_AS(build_unravel_covering(open_payoff, 0, Horizon{2}),
                    ValidationError);
}

TEST_CASE("a corrupted tree with a non-condition move fails the clopen "
          "check") {
    // Base game whose payoff is settled only at depth 3.
    Game g = closed_game(3, nodes_of({{0, 1, 1}}));
    auto [u, cov] = build_unravel_covering(g, 0, Horizon{3});
    REQUIRE(check_preimage_clopen(u));

    // Graft a fake condition move (base 1, full continuation subtree)
    // onto a length-1 position over base letter 0, then extend it with
    // its two regular moves. Its leaves project to [0,1,0] and [0,1,1],
    // which the payoff separates.
    UnravelGame bad = u;
    Node host;
    for (const Node& x : bad.tree.nodes())
        if (x.size() == 1 && bad.letters[x[0]].base == 0) {
            host = x;
            break;
        }
    REQUIRE(host.size() == 1);

    auto letter_index = [&](const UnravelLetter& l) -> Letter {
        for (std::size_t i = 0; i < bad.letters.size(); ++i)
            if (bad.letters[i] == l) return static_cast<Letter>(i);
        bad.letters.push_back(l);
        return static_cast<Letter>(bad.letters.size() - 1);
    };

    Tree eps = tree_of(2, 0, {{}});
    Letter fake = letter_index(UnravelLetter{1, full1()});
    Letter go0 = letter_index(UnravelLetter{0, eps});
    Letter go1 = letter_index(UnravelLetter{1, eps});

    NodeSet nodes = bad.tree.nodes();
    Node n2 = extend(host, fake);
    Node leaf0 = extend(n2, go0);
    Node leaf1 = extend(n2, go1);
    nodes.insert(n2);
    nodes.insert(leaf0);
    nodes.insert(leaf1);
    bad.tree = Tree::from_nodes(static_cast<int>(bad.letters.size()), 3,
                                std::move(nodes));

    // keep the clopen game consistent: [0,1,0] avoids the generator
    NodeSet accept =
        std::get<Payoff::Clopen>(bad.clopen_game.payoff.rep).accept;
    accept.insert(leaf0);
    bad.clopen_game = Game{bad.tree, Horizon{3}, Payoff::clopen(accept)};

    CHECK_FALSE(check_preimage_clopen(bad));
}

namespace {

// A deterministic random total strategy over an arbitrary tree.
Strategy random_total_strategy(std::mt19937& rng, const Tree& t, Horizon h,
                               Player p) {
    PreStrategy s;
    s.player = p;
    for (const Node& x : t.nodes()) {
        if (!is_position(x, p) || static_cast<int>(x.size()) >= h.value)
            continue;
        auto letters = t.child_letters(x);
        s.choices[x] = {letters[rng() % letters.size()]};
    }
    return as_strategy(std::move(s), t, h);
}

// The lifting law, checked directly for one strategy.
bool lifts(const Covering& cov, Horizon h, const Strategy& sp) {
    Strategy mapped = cov.phi.apply(sp.player(), sp);
    NodeSet images;
    for (const Node& leaf : consistent_leaves(sp.pre(), cov.pi.source, h))
        images.insert(cov.pi.apply(leaf));
    for (const Node& leaf : consistent_leaves(mapped.pre(), cov.pi.target, h))
        if (!images.count(leaf)) return false;
    return true;
}

}  // namespace

TEST_CASE("lifting survives adversarially chosen condition moves") {
    // With U = {root} every condition move is a pencil; a strategy for
    // player one can pair each quasistrategy payload with a pencil that
    // narrows the remaining letters, which defeats trackers that commit
    // to a single lift. The strategy map must pick the covered side.
    Game g = closed_game(3, nodes_of({Node{}}));
    auto [u, cov] = build_unravel_covering(g, 0, Horizon{3});

    PreStrategy adversarial;
    adversarial.player = Player::one;
    for (const Node& x : u.tree.nodes()) {
        if (x.size() != 1) continue;
        // prefer a base-0 move whose payload forces letter 0 only; fall
        // back to a base-1 move forcing letter 1, then anything
        Letter best = -1;
        int best_rank = 3;
        for (Letter l : u.tree.child_letters(x)) {
            const UnravelLetter& move = u.letters[l];
            std::vector<Letter> follow =
                move.aux.child_letters(Node{});
            int rank;
            if (move.base == 0 && follow == std::vector<Letter>{0})
                rank = 0;
            else if (move.base == 1 && follow == std::vector<Letter>{1})
                rank = 1;
            else
                rank = 2;
            if (rank < best_rank) {
                best_rank = rank;
                best = l;
            }
        }
        adversarial.choices[x] = {best};
    }
    Strategy sp = as_strategy(std::move(adversarial), u.tree, Horizon{3});
    CHECK(lifts(cov, Horizon{3}, sp));

    // and a broad random sweep over both players
    std::mt19937 rng(99);
    for (int i = 0; i < 60; ++i)
        for (Player p : {Player::zero, Player::one})
            CHECK(lifts(cov, Horizon{3},
                        random_total_strategy(rng, u.tree, Horizon{3}, p)));
}

TEST_CASE("lifting holds on random strategies across generator sets") {
    std::mt19937 rng(7);
    for (const NodeSet& gens :
         {nodes_of({{1}}), nodes_of({{0, 1}}), nodes_of({{1}, {0, 0}}),
          nodes_of({{0, 1, 1}})}) {
        Game g = closed_game(3, gens);
        auto [u, cov] = build_unravel_covering(g, 0, Horizon{3});
        for (int i = 0; i < 25; ++i)
            for (Player p : {Player::zero, Player::one})
                CHECK(lifts(cov, Horizon{3},
                            random_total_strategy(rng, u.tree, Horizon{3}, p)));
    }
}

TEST_CASE("locality on crafted pairs over the unravel covering") {
    Game g = closed_game(3, nodes_of({{1}}));
    auto [u, cov] = build_unravel_covering(g, 0, Horizon{3});
    Horizon h{3};

    // player zero: same root choice, different level-2 choices; the
    // mapped strategies must agree below level 2
    std::mt19937 rng(12);
    for (int trial = 0; trial < 20; ++trial) {
        PreStrategy a, b;
        a.player = b.player = Player::zero;
        for (const Node& x : u.tree.nodes()) {
            if (!is_position(x, Player::zero) ||
                static_cast<int>(x.size()) >= 3)
                continue;
            auto letters = u.tree.child_letters(x);
            Letter shared = letters[rng() % letters.size()];
            a.choices[x] = {shared};
            b.choices[x] = {x.empty()
                                ? shared
                                : letters[rng() % letters.size()]};
        }
        Strategy sa = as_strategy(a, u.tree, h);
        Strategy sb = as_strategy(b, u.tree, h);
        Strategy fa = cov.phi.apply(Player::zero, sa);
        Strategy fb = cov.phi.apply(Player::zero, sb);
        for (int n = 0; n <= 2; ++n) {
            if (!detail::restricted_equal(sa.pre(), sb.pre(), n)) continue;
            CHECK(detail::restricted_equal(fa.pre(), fb.pre(), n));
        }
    }
}
