// Bounded-depth prefix-closed trees over a finite alphabet, plus the
// subtree and restriction operations everything else consumes.
//
// depth_bound is capacity metadata: it bounds node lengths but does not
// participate in equality or in the canonical order. Two trees are equal
// when they have the same alphabet and the same node set; the canonical
// order is lexicographic over the sorted node list, which is what lets
// trees double as letters of an unraveling alphabet.

#pragma once

#include <algorithm>
#include <vector>

#include "gsg/core.hpp"

namespace gsg {

class Tree {
public:
    Tree() : alphabet_size_(1), depth_bound_(0) {}

    Tree(int alphabet_size, int depth_bound)
        : alphabet_size_(alphabet_size), depth_bound_(depth_bound) {
        if (alphabet_size < 1)
            throw ValidationError("tree alphabet size must be >= 1");
        if (depth_bound < 0)
            throw ValidationError("tree depth bound must be >= 0");
    }

    static Tree from_nodes(int alphabet_size, int depth_bound, NodeSet nodes) {
        Tree t(alphabet_size, depth_bound);
        t.nodes_ = std::move(nodes);
        t.validate();
        return t;
    }

    // The complete tree: every sequence of length <= depth.
    static Tree full(int alphabet_size, int depth) {
        Tree t(alphabet_size, depth);
        t.nodes_.insert(Node{});
        Node cur;
        t.fill(cur, depth);
        return t;
    }

    int alphabet_size() const { return alphabet_size_; }
    int depth_bound() const { return depth_bound_; }
    const NodeSet& nodes() const { return nodes_; }
    bool empty() const { return nodes_.empty(); }
    std::size_t size() const { return nodes_.size(); }

    bool contains(const Node& x) const { return nodes_.count(x) > 0; }

    // Letters a with x.a in the tree, ascending.
    std::vector<Letter> child_letters(const Node& x) const {
        std::vector<Letter> out;
        for (Letter a = 0; a < alphabet_size_; ++a)
            if (contains(extend(x, a))) out.push_back(a);
        return out;
    }

    std::vector<Node> level(int n) const {
        std::vector<Node> out;
        for (const Node& x : nodes_)
            if (static_cast<int>(x.size()) == n) out.push_back(x);
        return out;
    }

    // Used by builders that grow trees node by node.
    void insert_with_prefixes(const Node& x) {
        if (static_cast<int>(x.size()) > depth_bound_)
            throw ValidationError("node exceeds tree depth bound");
        Node cur;
        nodes_.insert(cur);
        for (Letter a : x) {
            if (a < 0 || a >= alphabet_size_)
                throw ValidationError("node letter outside alphabet");
            cur.push_back(a);
            nodes_.insert(cur);
        }
    }

    friend bool operator==(const Tree& a, const Tree& b) {
        return a.alphabet_size_ == b.alphabet_size_ && a.nodes_ == b.nodes_;
    }
    friend bool operator!=(const Tree& a, const Tree& b) { return !(a == b); }

    // Canonical total order: lexicographic over the sorted node lists.
    friend bool canonical_less(const Tree& a, const Tree& b) {
        return std::lexicographical_compare(a.nodes_.begin(), a.nodes_.end(),
                                            b.nodes_.begin(), b.nodes_.end(),
                                            NodeOrder{});
    }

private:
    void fill(Node& cur, int depth) {
        if (static_cast<int>(cur.size()) >= depth) return;
        for (Letter a = 0; a < alphabet_size_; ++a) {
            cur.push_back(a);
            nodes_.insert(cur);
            fill(cur, depth);
            cur.pop_back();
        }
    }

    void validate() const {
        for (const Node& x : nodes_) {
            if (static_cast<int>(x.size()) > depth_bound_)
                throw ValidationError("node exceeds tree depth bound");
            for (Letter a : x)
                if (a < 0 || a >= alphabet_size_)
                    throw ValidationError("node letter outside alphabet");
            if (!x.empty()) {
                Node parent(x.begin(), x.end() - 1);
                if (!nodes_.count(parent))
                    throw ValidationError("tree is not prefix-closed");
            }
        }
    }

    int alphabet_size_;
    int depth_bound_;
    NodeSet nodes_;
};

// Subtree rooted at x: { y | x.y in t }, with the depth bound reduced by
// |x|. Empty when x is not in t.
inline Tree sub_at(const Tree& t, const Node& x) {
    for (Letter a : x)
        if (a < 0 || a >= t.alphabet_size())
            throw ValidationError("sub_at node letter outside alphabet");
    int bound = std::max(0, t.depth_bound() - static_cast<int>(x.size()));
    NodeSet nodes;
    for (const Node& y : t.nodes())
        if (is_prefix(x, y)) nodes.insert(Node(y.begin() + x.size(), y.end()));
    return Tree::from_nodes(t.alphabet_size(), bound, std::move(nodes));
}

// Nodes of length <= n.
inline Tree level_restrict(const Tree& t, int n) {
    if (n < 0) n = 0;
    NodeSet nodes;
    for (const Node& x : t.nodes())
        if (static_cast<int>(x.size()) <= n) nodes.insert(x);
    return Tree::from_nodes(t.alphabet_size(), std::min(n, t.depth_bound()),
                            std::move(nodes));
}

// Nonempty, and every node shorter than the horizon has a child. Such a
// tree's depth-H nodes stand for its branches.
inline bool is_pruned_to_horizon(const Tree& t, Horizon h) {
    if (t.depth_bound() < h.value)
        throw ValidationError("tree depth bound below horizon");
    if (t.empty()) return false;
    for (const Node& x : t.nodes()) {
        if (static_cast<int>(x.size()) >= h.value) continue;
        bool has_child = false;
        for (Letter a = 0; a < t.alphabet_size() && !has_child; ++a)
            has_child = t.contains(extend(x, a));
        if (!has_child) return false;
    }
    return true;
}

inline bool cylinder_contains(const Node& x, const Node& leaf) {
    return is_prefix(x, leaf);
}

namespace detail {

// t(d) = 1 + t(d-1)^a, t(0) = 2, saturating to avoid overflow.
inline long long tree_count(int alphabet_size, int depth, long long limit) {
    long long n = 2;
    for (int d = 0; d < depth; ++d) {
        long long pow = 1;
        for (int i = 0; i < alphabet_size; ++i) {
            if (n != 0 && pow > limit / n) return limit + 1;
            pow *= n;
        }
        n = pow + 1;
    }
    return n;
}

}  // namespace detail

// Every tree over the alphabet with the given depth bound, the empty tree
// included, in canonical order.
inline std::vector<Tree> enumerate_trees(int alphabet_size, int depth) {
    long long count =
        detail::tree_count(alphabet_size, depth, caps::enumeration_cap());
    caps::check(count, "enumerate_trees");

    if (depth == 0) {
        Tree empty(alphabet_size, 0);
        NodeSet root;
        root.insert(Node{});
        return {empty, Tree::from_nodes(alphabet_size, 0, std::move(root))};
    }

    std::vector<Tree> below = enumerate_trees(alphabet_size, depth - 1);
    std::vector<Tree> out;
    out.emplace_back(alphabet_size, depth);  // the empty tree

    // Nonempty trees: a root plus one depth-(d-1) tree per letter.
    std::vector<std::size_t> pick(alphabet_size, 0);
    while (true) {
        NodeSet nodes;
        nodes.insert(Node{});
        for (Letter a = 0; a < alphabet_size; ++a)
            for (const Node& y : below[pick[a]].nodes()) {
                Node z;
                z.reserve(y.size() + 1);
                z.push_back(a);
                z.insert(z.end(), y.begin(), y.end());
                nodes.insert(z);
            }
        out.push_back(Tree::from_nodes(alphabet_size, depth, std::move(nodes)));

        int i = alphabet_size - 1;
        while (i >= 0 && pick[i] + 1 == below.size()) pick[i--] = 0;
        if (i < 0) break;
        ++pick[i];
    }

    std::sort(out.begin(), out.end(),
              [](const Tree& a, const Tree& b) { return canonical_less(a, b); });
    return out;
}

}  // namespace gsg
