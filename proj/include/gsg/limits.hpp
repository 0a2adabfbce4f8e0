// Sequential inverse systems of trees and their limits, computed by
// levelwise stabilization: once every onward transition is n-fixing, the
// limit's n-th level is a copy of that stage's n-th level. Unbounded
// systems are driven by generators with a hard stage budget.

#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "gsg/core.hpp"
#include "gsg/morphism.hpp"
#include "gsg/tree.hpp"

namespace gsg {

struct InverseSystem {
    std::function<Tree(int)> stage;
    // transition(i): stage(i+1) -> stage(i)
    std::function<TreeMorphism(int)> transition;
    // promise: transition(i) is fixing_schedule(i)-fixing; nondecreasing
    std::function<int(int)> fixing_schedule;
    std::optional<int> stage_count;  // finite chains
    int stage_budget = 64;

    static InverseSystem from_stages(std::vector<Tree> stages,
                                     std::vector<TreeMorphism> transitions,
                                     std::vector<int> schedule) {
        if (stages.empty())
            throw ValidationError("inverse system needs at least one stage");
        if (transitions.size() + 1 != stages.size())
            throw ValidationError("inverse system: need one transition per gap");
        if (schedule.size() < transitions.size())
            throw ValidationError("inverse system: schedule too short");
        for (std::size_t i = 0; i + 1 < schedule.size(); ++i)
            if (schedule[i] > schedule[i + 1])
                throw ValidationError(
                    "inverse system: fixing schedule must be nondecreasing");
        auto st = std::make_shared<std::vector<Tree>>(std::move(stages));
        auto tr =
            std::make_shared<std::vector<TreeMorphism>>(std::move(transitions));
        auto sc = std::make_shared<std::vector<int>>(std::move(schedule));
        InverseSystem sys;
        sys.stage = [st](int i) { return st->at(i); };
        sys.transition = [tr](int i) { return tr->at(i); };
        sys.fixing_schedule = [sc](int i) {
            return i < static_cast<int>(sc->size()) ? sc->at(i) : sc->back();
        };
        sys.stage_count = static_cast<int>(st->size());
        return sys;
    }
};

namespace detail {

inline TreeMorphism checked_transition(const InverseSystem& sys, int i) {
    TreeMorphism f = sys.transition(i);
    if (!validate_morphism(f))
        throw ValidationError("inverse system transition is not a morphism");
    if (!is_k_fixing(f, sys.fixing_schedule(i)))
        throw ValidationError(
            "inverse system transition misses its scheduled fixing level");
    return f;
}

// First stage whose onward transitions are all >= depth-fixing; for
// finite chains that never stabilize, the last stage.
inline int stabilized_stage(const InverseSystem& sys, int depth) {
    int last = sys.stage_count ? *sys.stage_count - 1 : sys.stage_budget;
    for (int i = 0; i < last; ++i)
        if (sys.fixing_schedule(i) >= depth) return i;
    if (!sys.stage_count)
        throw Error(
            "inverse system schedule never reaches the requested depth "
            "within the stage budget");
    return last;
}

}  // namespace detail

struct TreeLimit {
    Tree tree;
    int stabilized_stage;
    // projections[i]: limit -> stage(i), for i <= stabilized_stage
    std::vector<TreeMorphism> projections;
};

// Materializes the limit up to the requested depth. Level n of the limit
// is a copy of level n of the first stage with onward transitions all
// n-fixing; at the materialized depth that is one stage for all levels,
// and the projections are composites of transitions from it.
inline TreeLimit limit_tree(const InverseSystem& sys, int up_to_depth) {
    int N = detail::stabilized_stage(sys, up_to_depth);

    // Materialized transitions must honor their scheduled fixing levels;
    // for finite chains that covers every transition the limit trusts.
    if (sys.stage_count)
        for (int i = 0; i + 1 < *sys.stage_count; ++i)
            detail::checked_transition(sys, i);

    Tree limit = level_restrict(sys.stage(N), up_to_depth);

    TreeMorphism proj{limit, sys.stage(N), {}};
    for (const Node& x : limit.nodes()) proj.map[x] = x;

    std::vector<TreeMorphism> projections(N + 1, proj);
    for (int i = N - 1; i >= 0; --i)
        projections[i] =
            compose(detail::checked_transition(sys, i), projections[i + 1]);

    return TreeLimit{std::move(limit), N, std::move(projections)};
}

// Checks that restricting to the n-th level preserves the limit: the
// n-th level of the materialized limit must biject, along the
// projections, with the compatible tuples of level-n nodes under the
// transition maps.
inline bool level_functor_check(const InverseSystem& sys, int n) {
    TreeLimit lim = limit_tree(sys, n);
    int N = lim.stabilized_stage;

    std::vector<std::vector<Node>> levels;
    std::vector<TreeMorphism> transitions;
    for (int i = 0; i <= N; ++i) {
        levels.push_back(sys.stage(i).level(n));
        if (i < N) transitions.push_back(detail::checked_transition(sys, i));
    }

    // Compatible tuples, keyed by their stage-N coordinate.
    long long tuples = 0;
    std::set<Node, NodeOrder> tails;
    for (const Node& xN : levels[N]) {
        Node cur = xN;
        bool ok = true;
        for (int i = N - 1; i >= 0 && ok; --i) {
            cur = transitions[i].apply(cur);
            ok = static_cast<int>(cur.size()) == n;
        }
        if (ok) {
            ++tuples;
            tails.insert(xN);
        }
    }

    // The canonical map from the limit's n-th level.
    std::set<Node, NodeOrder> image;
    long long limit_level = 0;
    for (const Node& x : lim.tree.nodes()) {
        if (static_cast<int>(x.size()) != n) continue;
        ++limit_level;
        Node xN = lim.projections[N].apply(x);
        if (!tails.count(xN)) return false;
        image.insert(xN);
    }
    return limit_level == tuples &&
           static_cast<long long>(image.size()) == limit_level;
}

}  // namespace gsg
