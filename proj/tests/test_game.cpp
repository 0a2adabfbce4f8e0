#include <catch2/catch_amalgamated.hpp>

#include "gsg/game.hpp"

using namespace gsg;

namespace {

NodeSet nodes_of(std::initializer_list<Node> xs) {
    NodeSet s;
    for (const Node& x : xs) s.insert(x);
    return s;
}

Game clopen_game(int h, std::initializer_list<Node> accept) {
    return make_game(Tree::full(2, h), Horizon{h},
                     Payoff::clopen(nodes_of(accept)));
}

// All closed-generator sets of size <= 2 over the full tree.
std::vector<NodeSet> small_generator_sets(const Tree& t) {
    std::vector<Node> pool(t.nodes().begin(), t.nodes().end());
    std::vector<NodeSet> out;
    out.push_back({});
    for (std::size_t i = 0; i < pool.size(); ++i) {
        out.push_back(nodes_of({pool[i]}));
        for (std::size_t j = i + 1; j < pool.size(); ++j)
            out.push_back(nodes_of({pool[i], pool[j]}));
    }
    return out;
}

}  // namespace

TEST_CASE("is_position parity convention") {
    CHECK(is_position(Node{}, Player::zero));
    CHECK(is_position({0}, Player::one));
    CHECK_FALSE(is_position({0, 1}, Player::one));
}

TEST_CASE("eval_payoff across representations") {
    Game clo = clopen_game(2, {{0, 0}, {0, 1}});
    CHECK(eval_payoff(clo, {0, 1}) == Player::zero);
    CHECK(eval_payoff(clo, {1, 1}) == Player::one);

    Game closed = make_game(Tree::full(2, 2), Horizon{2},
                            Payoff::closed(nodes_of({{1}})));
    CHECK(eval_payoff(closed, {1, 0}) == Player::one);
    CHECK(eval_payoff(closed, {0, 1}) == Player::zero);

    Game open = make_game(Tree::full(2, 2), Horizon{2},
                          Payoff::open(nodes_of({{1}})));
    CHECK(eval_payoff(open, {1, 0}) == Player::zero);
    CHECK(eval_payoff(open, {0, 1}) == Player::one);

    CHECK_THROWS_AS(eval_payoff(clo, {0}), ValidationError);
}

TEST_CASE("make_game validation") {
    CHECK_THROWS_AS(make_game(Tree::from_nodes(2, 2, nodes_of({{}, {0}})),
                              Horizon{2}, Payoff::clopen({})),
                    ValidationError);
    CHECK_THROWS_AS(make_game(Tree::full(2, 2), Horizon{2},
                              Payoff::clopen(nodes_of({{0}}))),
                    ValidationError);
    CHECK_THROWS_AS(make_game(Tree::full(2, 2), Horizon{2},
                              Payoff::closed(nodes_of({{0, 0, 1}}))),
                    ValidationError);
}

TEST_CASE("generator normalization removes shadowed generators") {
    Payoff p = Payoff::closed(nodes_of({{1}, {1, 0}, {0, 1}}));
    const auto& gens = std::get<Payoff::Closed>(p.rep).generators;
    CHECK(gens == nodes_of({{1}, {0, 1}}));
}

TEST_CASE("decision_depth probes clopen-ness") {
    // accept = cylinder [0] at H=2: decided one level in
    Game cyl = clopen_game(2, {{0, 0}, {0, 1}});
    CHECK(decision_depth(cyl, Node{}) == 1);
    // constant payoff: decided at the root
    Game all = clopen_game(2, {{0, 0}, {0, 1}, {1, 0}, {1, 1}});
    CHECK(decision_depth(all, Node{}) == 0);
    // matching diagonal: leaves under each depth-1 node disagree
    Game match = clopen_game(2, {{0, 0}, {1, 1}});
    CHECK(decision_depth(match, Node{}) == 2);
    CHECK(decision_depth(match, {0}) == 2);
}

TEST_CASE("exactly one winner per leaf, closed matches its expansion") {
    for (int h = 2; h <= 3; ++h) {
        Tree full = Tree::full(2, h);
        for (const NodeSet& gens : small_generator_sets(full)) {
            Game closed = make_game(full, Horizon{h}, Payoff::closed(gens));
            Game expanded =
                make_game(full, Horizon{h}, clopen_expansion(closed));
            for (const Node& leaf : full.nodes()) {
                if (static_cast<int>(leaf.size()) != h) continue;
                CHECK(eval_payoff(closed, leaf) ==
                      eval_payoff(expanded, leaf));
            }
        }
    }
}

TEST_CASE("complement swaps the winner on every leaf") {
    Tree full = Tree::full(2, 2);
    std::vector<Game> games;
    games.push_back(clopen_game(2, {{0, 0}, {1, 1}}));
    games.push_back(
        make_game(full, Horizon{2}, Payoff::closed(nodes_of({{1}}))));
    games.push_back(
        make_game(full, Horizon{2}, Payoff::open(nodes_of({{1}, {0, 0}}))));
    games.push_back(make_game(
        full, Horizon{2},
        Payoff::borel(BorelCode::union_of({BorelCode::cylinder({0, 0}),
                                           BorelCode::cylinder({1, 1})}))));
    for (const Game& g : games) {
        Game comp = make_game(g.tree, g.horizon, complement_payoff(g));
        for (const Node& leaf : g.tree.nodes()) {
            if (static_cast<int>(leaf.size()) != g.horizon.value) continue;
            CHECK(eval_payoff(comp, leaf) == opponent(eval_payoff(g, leaf)));
        }
    }
}

TEST_CASE("eval_code over the four constructors") {
    CHECK(eval_code(BorelCode::cylinder({0}), {0, 1}));
    CHECK_FALSE(
        eval_code(BorelCode::complement(BorelCode::cylinder({0})), {0, 1}));
    CHECK(eval_code(BorelCode::union_of({BorelCode::cylinder({0, 0}),
                                         BorelCode::cylinder({1, 1})}),
                    {1, 1}));
    CHECK(eval_code(BorelCode::closed_set(nodes_of({{1}})), {0, 0}));
    CHECK_FALSE(eval_code(BorelCode::closed_set(nodes_of({{1}})), {1, 0}));
}
