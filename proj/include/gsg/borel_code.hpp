// Finite Borel codes: a syntax tree over cylinder and closed generators,
// closed under complement and finite union, interpreted over depth-H
// leaves.

#pragma once

#include <memory>
#include <variant>
#include <vector>

#include "gsg/core.hpp"

namespace gsg {

struct BorelCode {
    struct Cylinder {
        Node node;
    };
    // Closed semantics: a leaf is in the set iff no generator is a prefix.
    struct ClosedSet {
        NodeSet generators;
    };
    struct Complement {
        std::shared_ptr<const BorelCode> child;
    };
    struct Union {
        std::vector<BorelCode> children;  // nonempty
    };

    std::variant<Cylinder, ClosedSet, Complement, Union> node;

    static BorelCode cylinder(Node x) { return {Cylinder{std::move(x)}}; }
    static BorelCode closed_set(NodeSet gens) {
        return {ClosedSet{std::move(gens)}};
    }
    static BorelCode complement(BorelCode c) {
        return {Complement{std::make_shared<BorelCode>(std::move(c))}};
    }
    static BorelCode union_of(std::vector<BorelCode> cs) {
        if (cs.empty())
            throw ValidationError("union code needs at least one child");
        return {Union{std::move(cs)}};
    }
};

inline bool eval_code(const BorelCode& code, const Node& leaf) {
    return std::visit(
        [&](const auto& n) -> bool {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, BorelCode::Cylinder>) {
                return is_prefix(n.node, leaf);
            } else if constexpr (std::is_same_v<T, BorelCode::ClosedSet>) {
                for (const Node& u : n.generators)
                    if (is_prefix(u, leaf)) return false;
                return true;
            } else if constexpr (std::is_same_v<T, BorelCode::Complement>) {
                return !eval_code(*n.child, leaf);
            } else {
                for (const BorelCode& c : n.children)
                    if (eval_code(c, leaf)) return true;
                return false;
            }
        },
        code.node);
}

inline int code_nesting_depth(const BorelCode& code) {
    return std::visit(
        [&](const auto& n) -> int {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, BorelCode::Cylinder> ||
                          std::is_same_v<T, BorelCode::ClosedSet>) {
                return 1;
            } else if constexpr (std::is_same_v<T, BorelCode::Complement>) {
                return 1 + code_nesting_depth(*n.child);
            } else {
                int d = 0;
                for (const BorelCode& c : n.children)
                    d = std::max(d, code_nesting_depth(c));
                return 1 + d;
            }
        },
        code.node);
}

}  // namespace gsg
