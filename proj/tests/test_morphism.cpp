#include <catch2/catch_amalgamated.hpp>

#include "gsg/morphism.hpp"

using namespace gsg;

namespace {

// Collapse map on the full binary tree: keeps level 1, sends level >= 2
// letters to 0. Lands in the comb tree.
TreeMorphism comb_collapse(int depth) {
    Tree source = Tree::full(2, depth);
    NodeSet comb;
    for (const Node& x : source.nodes()) {
        Node y = x;
        for (std::size_t i = 1; i < y.size(); ++i) y[i] = 0;
        comb.insert(y);
    }
    Tree target = Tree::from_nodes(2, depth, std::move(comb));
    TreeMorphism f{source, target, {}};
    for (const Node& x : source.nodes()) {
        Node y = x;
        for (std::size_t i = 1; i < y.size(); ++i) y[i] = 0;
        f.map[x] = y;
    }
    return f;
}

TreeMorphism bitflip(int depth) {
    Tree t = Tree::full(2, depth);
    TreeMorphism f{t, t, {}};
    for (const Node& x : t.nodes()) {
        Node y = x;
        for (Letter& a : y) a = 1 - a;
        f.map[x] = y;
    }
    return f;
}

}  // namespace

TEST_CASE("validate_morphism") {
    Tree full = Tree::full(2, 2);
    CHECK(validate_morphism(identity_morphism(full)));

    TreeMorphism shrink{full, full, {}};
    for (const Node& x : full.nodes()) shrink.map[x] = x;
    shrink.map[{0}] = Node{};  // length violated
    CHECK_FALSE(validate_morphism(shrink));

    TreeMorphism partial{full, full, {}};
    CHECK_FALSE(validate_morphism(partial));  // not total

    TreeMorphism skewed{full, full, {}};
    for (const Node& x : full.nodes()) skewed.map[x] = x;
    skewed.map[{0, 1}] = {1, 1};  // not isotone above [0]
    CHECK_FALSE(validate_morphism(skewed));

    CHECK(validate_morphism(comb_collapse(3)));
}

TEST_CASE("composition laws") {
    Tree full = Tree::full(2, 2);
    TreeMorphism id = identity_morphism(full);
    TreeMorphism flip = bitflip(2);
    CHECK(compose(id, flip).map == flip.map);
    CHECK(compose(flip, id).map == flip.map);
    // two involutions compose to the identity
    CHECK(compose(flip, flip).map == id.map);
    CHECK_THROWS_AS(compose(comb_collapse(2), comb_collapse(2)),
                    ValidationError);
}

TEST_CASE("fixing_level") {
    CHECK(fixing_level(identity_morphism(Tree::full(2, 3))) == 3);
    CHECK(fixing_level(bitflip(3)) == 3);  // bijective, not the identity
    CHECK(fixing_level(comb_collapse(3)) == 1);

    // collapse from level 1 on: fixing level 0
    Tree full = Tree::full(2, 2);
    NodeSet chain_nodes;
    for (const Node& x : full.nodes())
        chain_nodes.insert(Node(x.size(), 0));
    Tree chain = Tree::from_nodes(2, 2, std::move(chain_nodes));
    TreeMorphism crush{full, chain, {}};
    for (const Node& x : full.nodes()) crush.map[x] = Node(x.size(), 0);
    REQUIRE(validate_morphism(crush));
    CHECK(fixing_level(crush) == 0);

    CHECK(is_k_fixing(comb_collapse(3), 0));
    CHECK(is_k_fixing(comb_collapse(3), 1));
    CHECK_FALSE(is_k_fixing(comb_collapse(3), 2));
}

TEST_CASE("enumerate_morphisms on the depth-2 binary tree") {
    Tree full = Tree::full(2, 2);
    auto endos = enumerate_morphisms(full, full);
    CHECK(endos.size() == 64);  // 2^2 level-1 images, 2 per level-2 node
    for (const TreeMorphism& f : endos) CHECK(validate_morphism(f));
}

TEST_CASE("composite fixing level obeys the min rule") {
    Tree full = Tree::full(2, 2);
    auto endos = enumerate_morphisms(full, full);
    for (const TreeMorphism& f : endos)
        for (const TreeMorphism& g : endos) {
            int composed = fixing_level(compose(g, f));
            CHECK(composed >= std::min(fixing_level(g), fixing_level(f)));
        }
}
