// File formats: JSON game files, plain-text strategy files, and the
// three-file directory layout emitted by the unravel command. Node
// strings are digit sequences over alphabets of at most ten letters;
// unraveled games index into an explicit letter table instead.

#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gsg/core.hpp"
#include "gsg/covering.hpp"
#include "gsg/game.hpp"
#include "gsg/strategy.hpp"
#include "gsg/tree.hpp"
#include "gsg/unravel.hpp"

namespace gsg {

inline std::string to_node_string(const Node& x) {
    std::string s;
    for (Letter a : x) s += static_cast<char>('0' + a);
    return s;
}

inline Node from_node_string(const std::string& s, int alphabet_size) {
    if (s == "\xce\xb5") return Node{};  // epsilon spelled out
    Node x;
    for (char c : s) {
        if (c < '0' || c > '9')
            throw ValidationError("node string has a non-digit character: " +
                                  s);
        int a = c - '0';
        if (a >= alphabet_size)
            throw ValidationError("node string letter " + std::to_string(a) +
                                  " outside the alphabet");
        x.push_back(a);
    }
    return x;
}

namespace detail {

inline void offset_to_line_col(const std::string& text, std::size_t offset,
                               int& line, int& col) {
    line = 1;
    col = 1;
    for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
}

inline NodeSet parse_node_list(const nlohmann::json& j, int alphabet) {
    if (!j.is_array())
        throw ValidationError("expected an array of node strings");
    NodeSet out;
    for (const auto& e : j)
        out.insert(from_node_string(e.get<std::string>(), alphabet));
    return out;
}

inline BorelCode parse_code(const nlohmann::json& j, int alphabet) {
    if (!j.is_object())
        throw ValidationError("borel code must be an object");
    if (j.contains("cyl"))
        return BorelCode::cylinder(
            from_node_string(j.at("cyl").get<std::string>(), alphabet));
    if (j.contains("closed"))
        return BorelCode::closed_set(parse_node_list(j.at("closed"), alphabet));
    if (j.contains("complement"))
        return BorelCode::complement(parse_code(j.at("complement"), alphabet));
    if (j.contains("union")) {
        std::vector<BorelCode> children;
        for (const auto& e : j.at("union"))
            children.push_back(parse_code(e, alphabet));
        return BorelCode::union_of(std::move(children));
    }
    throw ValidationError(
        "borel code needs one of: cyl, closed, complement, union");
}

inline nlohmann::json code_to_json(const BorelCode& code) {
    return std::visit(
        [&](const auto& n) -> nlohmann::json {
            using T = std::decay_t<decltype(n)>;
            nlohmann::json j;
            if constexpr (std::is_same_v<T, BorelCode::Cylinder>) {
                j["cyl"] = to_node_string(n.node);
            } else if constexpr (std::is_same_v<T, BorelCode::ClosedSet>) {
                auto arr = nlohmann::json::array();
                for (const Node& u : n.generators)
                    arr.push_back(to_node_string(u));
                j["closed"] = arr;
            } else if constexpr (std::is_same_v<T, BorelCode::Complement>) {
                j["complement"] = code_to_json(*n.child);
            } else {
                auto arr = nlohmann::json::array();
                for (const BorelCode& c : n.children)
                    arr.push_back(code_to_json(c));
                j["union"] = arr;
            }
            return j;
        },
        code.node);
}

}  // namespace detail

inline Game parse_game_file(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        int line = 0, col = 0;
        detail::offset_to_line_col(text, e.byte, line, col);
        throw ParseError("game file: " + std::string(e.what()), line, col);
    }
    try {
        int alphabet = j.at("alphabet").get<int>();
        if (alphabet < 1 || alphabet > 10)
            throw ValidationError(
                "alphabet must be between 1 and 10 at the file level");
        int h = j.at("horizon").get<int>();
        if (h < 1) throw ValidationError("horizon must be >= 1");

        Tree tree(alphabet, h);
        const auto& jt = j.at("tree");
        if (jt.is_string() && jt.get<std::string>() == "full") {
            tree = Tree::full(alphabet, h);
        } else if (jt.is_array()) {
            NodeSet nodes;
            for (const auto& e : jt)
                nodes.insert(from_node_string(e.get<std::string>(), alphabet));
            for (const Node& x : nodes)
                if (!x.empty() &&
                    !nodes.count(Node(x.begin(), x.end() - 1)))
                    throw ValidationError(
                        "tree is not prefix-closed at node \"" +
                        to_node_string(x) + "\"");
            tree = Tree::from_nodes(alphabet, h, std::move(nodes));
        } else {
            throw ValidationError("tree must be \"full\" or a node list");
        }
        for (const Node& x : tree.nodes())
            if (static_cast<int>(x.size()) < h &&
                tree.child_letters(x).empty())
                throw ValidationError("tree is not pruned: node \"" +
                                      to_node_string(x) +
                                      "\" has no extension");

        const auto& jp = j.at("payoff");
        Payoff payoff = Payoff::clopen({});
        if (jp.contains("clopen"))
            payoff =
                Payoff::clopen(detail::parse_node_list(jp.at("clopen"), alphabet));
        else if (jp.contains("closed"))
            payoff =
                Payoff::closed(detail::parse_node_list(jp.at("closed"), alphabet));
        else if (jp.contains("open"))
            payoff =
                Payoff::open(detail::parse_node_list(jp.at("open"), alphabet));
        else if (jp.contains("borel"))
            payoff = Payoff::borel(detail::parse_code(jp.at("borel"), alphabet));
        else
            throw ValidationError(
                "payoff needs one of: clopen, closed, open, borel");

        return make_game(std::move(tree), Horizon{h}, std::move(payoff));
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("game file: " + std::string(e.what()));
    }
}

inline std::string print_game_file(const Game& g) {
    nlohmann::json j;
    j["alphabet"] = g.tree.alphabet_size();
    j["horizon"] = g.horizon.value;
    if (g.tree == Tree::full(g.tree.alphabet_size(), g.horizon.value)) {
        j["tree"] = "full";
    } else {
        auto arr = nlohmann::json::array();
        for (const Node& x : g.tree.nodes()) arr.push_back(to_node_string(x));
        j["tree"] = arr;
    }
    nlohmann::json jp;
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            auto arr = nlohmann::json::array();
            if constexpr (std::is_same_v<T, Payoff::Clopen>) {
                for (const Node& x : p.accept) arr.push_back(to_node_string(x));
                jp["clopen"] = arr;
            } else if constexpr (std::is_same_v<T, Payoff::Closed>) {
                for (const Node& x : p.generators)
                    arr.push_back(to_node_string(x));
                jp["closed"] = arr;
            } else if constexpr (std::is_same_v<T, Payoff::Open>) {
                for (const Node& x : p.generators)
                    arr.push_back(to_node_string(x));
                jp["open"] = arr;
            } else {
                jp["borel"] = detail::code_to_json(p.code);
            }
        },
        g.payoff.rep);
    j["payoff"] = jp;
    return j.dump(2) + "\n";
}

// Strategy files: a player line, then one "node -> letter" line per key.
// The empty node may be written as an empty string or a lone epsilon.
inline PreStrategy parse_strategy_file(const std::string& text,
                                       const Game& g) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    PreStrategy s;
    bool have_player = false;
    while (std::getline(in, line)) {
        ++lineno;
        std::string trimmed;
        for (char c : line)
            if (!isspace(static_cast<unsigned char>(c))) trimmed += c;
        if (trimmed.empty() || trimmed[0] == '#') continue;
        if (!have_player) {
            if (trimmed.rfind("player:", 0) != 0)
                throw ParseError("strategy file: expected \"player: 0|1\"",
                                 lineno, 1);
            int p = std::stoi(trimmed.substr(7));
            if (p != 0 && p != 1)
                throw ParseError("strategy file: player must be 0 or 1",
                                 lineno, 1);
            s.player = p == 0 ? Player::zero : Player::one;
            have_player = true;
            continue;
        }
        auto arrow = trimmed.find("->");
        if (arrow == std::string::npos)
            throw ParseError("strategy file: expected \"node -> letter\"",
                             lineno, 1);
        Node x = from_node_string(trimmed.substr(0, arrow),
                                  g.tree.alphabet_size());
        int a = std::stoi(trimmed.substr(arrow + 2));
        if (!g.tree.contains(x))
            throw ValidationError("strategy file: node \"" +
                                  to_node_string(x) +
                                  "\" is not in the game tree");
        if (!is_position(x, s.player))
            throw ValidationError("strategy file: node \"" +
                                  to_node_string(x) +
                                  "\" is not the player's position");
        if (!g.tree.contains(extend(x, a)))
            throw ValidationError("strategy file: letter " +
                                  std::to_string(a) + " illegal at \"" +
                                  to_node_string(x) + "\"");
        s.choices[x] = {a};
    }
    if (!have_player)
        throw ParseError("strategy file: missing player line", 1, 1);
    return s;
}

inline std::string print_strategy_file(const PreStrategy& s) {
    std::ostringstream out;
    out << "player: " << player_index(s.player) << "\n";
    for (const auto& [x, ls] : s.choices)
        for (Letter a : ls)
            out << (x.empty() ? "\xce\xb5" : to_node_string(x)) << " -> " << a
                << "\n";
    return out.str();
}

// ---- unravel output directory -------------------------------------------

inline nlohmann::json unravel_game_to_json(const UnravelGame& u) {
    nlohmann::json j;
    j["alphabet"] = static_cast<int>(u.letters.size());
    j["horizon"] = u.clopen_game.horizon.value;
    auto letters = nlohmann::json::array();
    for (const UnravelLetter& l : u.letters) {
        nlohmann::json e;
        e["base"] = to_node_string(Node{l.base});
        auto aux = nlohmann::json::array();
        for (const Node& y : l.aux.nodes()) aux.push_back(to_node_string(y));
        e["aux"] = aux;
        letters.push_back(e);
    }
    j["letters"] = letters;
    auto tree = nlohmann::json::array();
    for (const Node& x : u.tree.nodes()) tree.push_back(x);
    j["tree"] = tree;
    auto accept = nlohmann::json::array();
    const auto& clopen = std::get<Payoff::Clopen>(u.clopen_game.payoff.rep);
    for (const Node& x : clopen.accept) accept.push_back(x);
    j["payoff"] = nlohmann::json{{"clopen", accept}};
    return j;
}

struct UnravelDir {
    Game base_game;
    UnravelGame unravel;
    Covering covering;
    int stored_fixing = 0;
    int stored_decision_depth = 0;
};

inline void write_unravel_dir(const std::filesystem::path& dir,
                              const Game& base, const UnravelGame& u,
                              const Covering& c) {
    std::filesystem::create_directories(dir);
    std::ofstream(dir / "base.json") << print_game_file(base);
    std::ofstream(dir / "unraveled.json") << unravel_game_to_json(u).dump(2)
                                          << "\n";
    nlohmann::json cov;
    cov["k"] = c.k;
    cov["fixing_level"] = fixing_level(c.pi);
    std::optional<int> dd = decision_depth(u.clopen_game, Node{});
    cov["decision_depth"] = dd ? *dd : -1;
    std::ofstream(dir / "covering.json") << cov.dump(2) << "\n";
}

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    if (!in) throw ParseError("cannot open " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Rebuilds the covering from the stored letter table: the projection
// forgets the aux components, and phi is the default fiber tracker.
inline UnravelDir read_unravel_dir(const std::filesystem::path& dir) {
    UnravelDir out;
    out.base_game = parse_game_file(slurp(dir / "base.json"));

    nlohmann::json j;
    try {
        j = nlohmann::json::parse(slurp(dir / "unraveled.json"));
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("unraveled.json: " + std::string(e.what()));
    }
    try {
        UnravelGame u;
        u.base_game = out.base_game;
        int alphabet = j.at("alphabet").get<int>();
        int h = j.at("horizon").get<int>();
        for (const auto& e : j.at("letters")) {
            UnravelLetter l;
            Node base = from_node_string(e.at("base").get<std::string>(),
                                         out.base_game.tree.alphabet_size());
            if (base.size() != 1)
                throw ValidationError("letter base must be a single digit");
            l.base = base[0];
            NodeSet aux;
            for (const auto& y : e.at("aux"))
                aux.insert(from_node_string(
                    y.get<std::string>(),
                    out.base_game.tree.alphabet_size()));
            l.aux = Tree::from_nodes(out.base_game.tree.alphabet_size(), h,
                                     std::move(aux));
            u.letters.push_back(std::move(l));
        }
        if (alphabet != static_cast<int>(u.letters.size()))
            throw ValidationError("letter table size disagrees with alphabet");

        NodeSet nodes;
        for (const auto& e : j.at("tree")) {
            Node x;
            for (const auto& v : e) {
                int idx = v.get<int>();
                if (idx < 0 || idx >= alphabet)
                    throw ValidationError("tree letter index out of range");
                x.push_back(idx);
            }
            nodes.insert(std::move(x));
        }
        u.tree = Tree::from_nodes(std::max(alphabet, 1), h, std::move(nodes));

        u.pi = TreeMorphism{
            u.tree, level_restrict(out.base_game.tree, h), {}};
        for (const Node& x : u.tree.nodes()) {
            Node p;
            for (Letter idx : x) p.push_back(u.letters[idx].base);
            u.pi.map[x] = std::move(p);
        }

        NodeSet accept;
        for (const auto& e : j.at("payoff").at("clopen")) {
            Node x;
            for (const auto& v : e) x.push_back(v.get<int>());
            accept.insert(std::move(x));
        }
        u.clopen_game =
            Game{u.tree, Horizon{h}, Payoff::clopen(std::move(accept))};

        nlohmann::json cj = nlohmann::json::parse(slurp(dir / "covering.json"));
        u.k = cj.at("k").get<int>();
        out.stored_fixing = cj.at("fixing_level").get<int>();
        out.stored_decision_depth = cj.at("decision_depth").get<int>();

        out.covering =
            Covering{u.pi, fiber_tracking_phi(u.pi, Horizon{h}), u.k};
        out.unravel = std::move(u);
        return out;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("unravel directory: " + std::string(e.what()));
    }
}

}  // namespace gsg
