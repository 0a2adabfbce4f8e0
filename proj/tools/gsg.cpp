// Command-line surface: load games, solve them, check strategies,
// unravel closed games, re-verify covering directories, and run the
// self-test corpus.
//
// Exit codes: 0 success, 1 property falsified, 2 usage or parse error,
// 3 enumeration cap exceeded.

#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "gsg/gsg.hpp"
#include "gsg/selftest.hpp"

namespace {

using namespace gsg;

std::string show_node(const Node& x) {
    return x.empty() ? "\xce\xb5" : to_node_string(x);
}

int cmd_solve(const std::string& file, bool as_json) {
    Game g = parse_game_file(slurp(file));
    SolveResult r;
    if (g.payoff.is_borel()) {
        PipelineReport report = solve_borel(g);
        r.winner = report.winner;
        r.strategy = report.base_strategy;
        r.region = winning_region(g, Player::one);
    } else {
        r = backward_induction(g);
    }

    // reachable keys are enough to replay the strategy
    Tree sub = strategy_subtree(r.strategy.pre(), g.tree, g.horizon);
    NodeMap<Letter> table;
    for (const auto& [x, ls] : r.strategy.pre().choices)
        if (sub.contains(x) && !ls.empty()) table[x] = *ls.begin();

    if (as_json) {
        nlohmann::json j;
        j["winner"] = player_index(r.winner);
        nlohmann::json strat = nlohmann::json::object();
        for (const auto& [x, a] : table) strat[to_node_string(x)] = a;
        j["strategy"] = strat;
        nlohmann::json region = nlohmann::json::array();
        for (const Node& x : r.region) region.push_back(to_node_string(x));
        j["region_one"] = region;
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "winner: " << player_index(r.winner) << "\n";
        for (const auto& [x, a] : table)
            std::cout << show_node(x) << " -> " << a << "\n";
    }
    return 0;
}

int cmd_verify_strategy(const std::string& game_file,
                        const std::string& strategy_file) {
    Game g = parse_game_file(slurp(game_file));
    PreStrategy s = parse_strategy_file(slurp(strategy_file), g);
    bool winning = is_winning(s, g);
    std::cout << "player: " << player_index(s.player) << "\n"
              << "winning: " << (winning ? "yes" : "no") << "\n";
    return winning ? 0 : 1;
}

int cmd_unravel(const std::string& file, int k, const std::string& out_dir) {
    Game g = parse_game_file(slurp(file));
    if (!g.payoff.is_closed())
        throw ValidationError("unravel needs a closed payoff");
    auto [u, cov] = build_unravel_covering(g, k, g.horizon);
    write_unravel_dir(out_dir, g, u, cov);
    std::optional<int> dd = decision_depth(u.clopen_game, Node{});
    std::cout << "letters: " << u.letters.size() << "\n"
              << "positions: " << u.tree.size() << "\n"
              << "fixing_level: " << fixing_level(cov.pi) << "\n"
              << "decision_depth: " << (dd ? *dd : -1) << " (bound "
              << 2 * k + 2 << ")\n"
              << "wrote " << out_dir << "\n";
    return 0;
}

int cmd_verify_covering(const std::string& dir, long long budget) {
    UnravelDir loaded = read_unravel_dir(dir);
    const UnravelGame& u = loaded.unravel;
    int failures = 0;
    auto report = [&](const std::string& what, bool ok,
                      const std::string& detail = "") {
        std::cout << what << ": " << (ok ? "ok" : "FALSIFIED") << "\n";
        if (!ok) {
            ++failures;
            if (!detail.empty()) std::cout << "  " << detail << "\n";
        }
    };

    report("tree pruned to horizon",
           is_pruned_to_horizon(u.tree, u.clopen_game.horizon));
    report("projection is a morphism", validate_morphism(u.pi));
    report("projection fixing level >= 2k",
           fixing_level(u.pi) >= 2 * u.k);

    // the stored payoff must be the projection preimage
    Payoff recomputed = preimage_payoff(loaded.covering, loaded.base_game);
    report("stored payoff is the preimage",
           std::get<Payoff::Clopen>(recomputed.rep).accept ==
               std::get<Payoff::Clopen>(u.clopen_game.payoff.rep).accept);
    report("preimage settled by 2k+2", check_preimage_clopen(u));

    CoveringCheck chk =
        verify_covering(loaded.covering, u.clopen_game.horizon, budget);
    report("covering laws", chk.ok, chk.detail);

    return failures == 0 ? 0 : 1;
}

int cmd_selftest(int max_alphabet, int max_horizon) {
    auto results = run_selftest(max_alphabet, max_horizon);
    bool ok = true;
    for (const SuiteResult& r : results) {
        std::cout << r.name << ": " << r.checks << " checks "
                  << (r.ok ? "ok" : "FALSIFIED") << "\n";
        if (!r.ok) {
            ok = false;
            std::cout << "  " << r.detail << "\n";
        }
    }
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Finite-horizon Gale-Stewart games: solving, coverings, "
        "unraveling, Borel codes"};
    app.require_subcommand(1);

    std::string game_file, strategy_file, out_dir, dir;
    bool as_json = false;
    int k = 0;
    long long budget = 64;
    int max_alphabet = 2, max_horizon = 3;

    CLI::App* solve = app.add_subcommand("solve", "solve a game file");
    solve->add_option("file", game_file)->required();
    solve->add_flag("--json", as_json, "machine-readable output");

    CLI::App* verify_s = app.add_subcommand(
        "verify-strategy", "check a strategy file against a game");
    verify_s->add_option("file", game_file)->required();
    verify_s->add_option("strategy", strategy_file)->required();

    CLI::App* unravel =
        app.add_subcommand("unravel", "unravel a closed game");
    unravel->add_option("file", game_file)->required();
    unravel->add_option("--k", k, "fixing level of the covering");
    unravel->add_option("--out", out_dir, "output directory")->required();

    CLI::App* verify_c = app.add_subcommand(
        "verify-covering", "re-verify an unravel output directory");
    verify_c->add_option("dir", dir)->required();
    verify_c->add_option("--budget", budget,
                         "strategies verified per player");

    CLI::App* selftest =
        app.add_subcommand("selftest", "run the exhaustive invariant suites");
    selftest->add_option("--max-alphabet", max_alphabet);
    selftest->add_option("--max-horizon", max_horizon);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (solve->parsed()) return cmd_solve(game_file, as_json);
        if (verify_s->parsed())
            return cmd_verify_strategy(game_file, strategy_file);
        if (unravel->parsed()) return cmd_unravel(game_file, k, out_dir);
        if (verify_c->parsed()) return cmd_verify_covering(dir, budget);
        if (selftest->parsed()) return cmd_selftest(max_alphabet, max_horizon);
    } catch (const CapExceeded& e) {
        std::cerr << "cap exceeded: " << e.what() << "\n";
        return 3;
    } catch (const LiftStranded& e) {
        std::cerr << "falsified: " << e.what() << "\n";
        return 1;
    } catch (const Falsification& e) {
        std::cerr << "falsified: " << e.what() << "\n";
        return 1;
    } catch (const ParseError& e) {
        std::cerr << "parse error";
        if (e.line) std::cerr << " (line " << e.line << ", column " << e.column << ")";
        std::cerr << ": " << e.what() << "\n";
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
