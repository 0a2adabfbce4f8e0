// The category of trees with length-preserving isotone maps: validation,
// composition, fixing levels, and small-scale morphism enumeration for
// the law sweeps.

#pragma once

#include <vector>

#include "gsg/core.hpp"
#include "gsg/tree.hpp"

namespace gsg {

struct TreeMorphism {
    Tree source;
    Tree target;
    NodeMap<Node> map;  // total on source.nodes()

    const Node& apply(const Node& x) const {
        auto it = map.find(x);
        if (it == map.end())
            throw ValidationError("morphism applied outside its source");
        return it->second;
    }
};

inline TreeMorphism identity_morphism(const Tree& t) {
    TreeMorphism f{t, t, {}};
    for (const Node& x : t.nodes()) f.map[x] = x;
    return f;
}

// Length-preserving, isotone, image inside the target, total on the
// source. Isotonicity reduces to the one-step case given preserved
// lengths.
inline bool validate_morphism(const TreeMorphism& f) {
    for (const Node& x : f.source.nodes()) {
        auto it = f.map.find(x);
        if (it == f.map.end()) return false;
        const Node& fx = it->second;
        if (fx.size() != x.size()) return false;
        if (!f.target.contains(fx)) return false;
        if (!x.empty()) {
            Node parent(x.begin(), x.end() - 1);
            auto pit = f.map.find(parent);
            if (pit == f.map.end() || !is_prefix(pit->second, fx)) return false;
        }
    }
    return true;
}

inline TreeMorphism compose(const TreeMorphism& g, const TreeMorphism& f) {
    if (!(f.target == g.source))
        throw ValidationError("morphism composition: source/target mismatch");
    TreeMorphism out{f.source, g.target, {}};
    for (const auto& [x, fx] : f.map) out.map[x] = g.apply(fx);
    return out;
}

// Greatest k such that the restriction to the first k levels is a
// bijection onto the target's first k levels.
inline int fixing_level(const TreeMorphism& f) {
    int bound = std::min(f.source.depth_bound(), f.target.depth_bound());
    int k = 0;
    for (int d = 1; d <= bound; ++d) {
        NodeSet image;
        long long source_count = 0;
        for (const Node& x : f.source.nodes()) {
            if (static_cast<int>(x.size()) != d) continue;
            ++source_count;
            image.insert(f.apply(x));
        }
        long long target_count = 0;
        for (const Node& y : f.target.nodes())
            if (static_cast<int>(y.size()) == d) ++target_count;
        if (static_cast<long long>(image.size()) != source_count ||
            source_count != target_count)
            break;
        k = d;
    }
    return k;
}

inline bool is_k_fixing(const TreeMorphism& f, int k) {
    return k <= fixing_level(f);
}

// All morphisms source -> target, in canonical order. Assignments are
// built level by level; each node's image ranges over the children of
// its parent's image.
inline std::vector<TreeMorphism> enumerate_morphisms(const Tree& source,
                                                     const Tree& target) {
    std::vector<Node> nodes(source.nodes().begin(), source.nodes().end());
    if (nodes.empty()) return {TreeMorphism{source, target, {}}};
    if (target.empty()) return {};

    std::vector<TreeMorphism> out;
    TreeMorphism cur{source, target, {}};

    // nodes are in NodeOrder, so parents precede children.
    auto rec = [&](auto&& self, std::size_t i) -> void {
        if (i == nodes.size()) {
            out.push_back(cur);
            caps::check(static_cast<long long>(out.size()),
                        "enumerate_morphisms");
            return;
        }
        const Node& x = nodes[i];
        if (x.empty()) {
            cur.map[x] = Node{};
            self(self, i + 1);
            cur.map.erase(x);
            return;
        }
        Node parent(x.begin(), x.end() - 1);
        const Node& fp = cur.map.at(parent);
        for (Letter a : target.child_letters(fp)) {
            cur.map[x] = extend(fp, a);
            self(self, i + 1);
            cur.map.erase(x);
        }
    };
    rec(rec, 0);
    return out;
}

}  // namespace gsg
