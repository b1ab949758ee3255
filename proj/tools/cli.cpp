#include "cli.hpp"

#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "mum/http.hpp"
#include "mum/parse.hpp"
#include "mum/session.hpp"
#include "mum/tables.hpp"

namespace mum::cli {
namespace {

struct PositionArgs {
  std::optional<std::int64_t> modulus;
  std::string field;
  std::string heaps;
  std::string policy = "stranded-only";
};

void add_position_options(CLI::App* cmd, PositionArgs& a, bool heaps_required = true) {
  auto* mod = cmd->add_option("--mod", a.modulus, "modulus m >= 2 (numeric game)");
  auto* field = cmd->add_option("--field", a.field, "field p,n,bits for Poly-MuM, e.g. 2,3,0b1011");
  mod->excludes(field);
  auto* heaps = cmd->add_option("--heaps", a.heaps, "comma-separated heaps, e.g. 6,6,6");
  if (heaps_required) heaps->required();
  cmd->add_option("--policy", a.policy, "consolidation policy")
      ->check(CLI::IsMember({"stranded-only", "always"}));
}

Variant variant_of(const PositionArgs& a) {
  if (a.modulus) return Variant::numeric(*a.modulus);
  if (!a.field.empty()) return Variant::poly(parse_field(a.field));
  throw Error(ErrorCode::ParseError, "give either --mod or --field");
}

std::string heap_list(const std::vector<Heap>& heaps) {
  std::string s = "[";
  for (std::size_t i = 0; i < heaps.size(); ++i) s += (i ? "," : "") + std::to_string(heaps[i]);
  return s + "]";
}

std::string move_text(const MoveAction& m) {
  std::ostringstream os;
  os << m << ": " << describe(m);
  return os.str();
}

/// "losing (product ≡ 1 mod 5)" and the like.
std::string verdict(const GamePosition& pos, const AnalysisView& v) {
  const std::string word = v.outcome == Outcome::PPosition ? "losing" : "winning";
  if (pos.is_numeric()) {
    return word + " (product ≡ " + std::to_string(v.product) + " mod " +
           std::to_string(pos.numeric().modulus().value()) + ")";
  }
  return word + " (field product = " + v.product_text + ")";
}

void print_analysis(std::ostream& out, const Variant& variant, const GamePosition& pos, ConsolidationPolicy policy,
                    MumberSolver& solver) {
  const AnalysisView v = pos.analyze(policy, solver);
  out << variant.describe() << ", heaps " << heap_list(v.heaps) << "\n";
  if (pos.is_numeric()) {
    const Heap exact = [&] {
      try {
        return checked_product(v.heaps);
      } catch (const Error&) {
        return Heap{-1};
      }
    }();
    out << "product: ";
    if (exact >= 0) out << exact << " ≡ ";
    out << v.product_text << "\n";
  } else {
    out << "field product: " << v.product_text << " (integer " << v.product << ")\n";
  }
  out << "outcome: " << verdict(pos, v) << " for the player to move\n";
  if (v.state_vector) {
    out << "state vector: (";
    for (std::size_t i = 0; i < v.state_vector->components.size(); ++i) {
      out << (i ? "," : "") << v.state_vector->components[i].value();
    }
    out << ") over factors ";
    for (std::size_t i = 0; i < v.state_vector->factors.size(); ++i) {
      out << (i ? "," : "") << v.state_vector->factors[i].value;
    }
    out << "\n";
  }
  out << "stranded: " << (v.stranded ? "yes" : "no") << "\n";
  if (pos.is_numeric()) {
    out << "mumber (" << to_string(policy) << "): ";
    if (v.mumber) {
      out << *v.mumber;
    } else {
      out << "n/a";
    }
    if (!v.mumber_note.empty()) out << " (" << v.mumber_note << ")";
    out << "\n";
  }
  const Hint h = pos.hint(policy);
  if (h.move) {
    out << "hint: " << move_text(*h.move) << "\n  " << h.explanation << "\n";
  } else {
    out << "hint: none, " << h.explanation << "\n";
  }
}

int cmd_analyze(const PositionArgs& a, std::ostream& out) {
  const Variant variant = variant_of(a);
  const GamePosition pos(variant, parse_integer_list(a.heaps));
  MumberSolver solver(2'000'000);
  print_analysis(out, variant, pos, parse_policy(a.policy), solver);
  return 0;
}

struct TableArgs {
  std::optional<std::int64_t> modulus;
  std::string field;
  std::string values = "11,13,14,16";
  Heap max = 7;
  Heap class_max = 64;
  std::string format = "text";
};

int cmd_table(const std::string& kind, const TableArgs& a, std::ostream& out) {
  const TableFormat fmt = a.format == "csv" ? TableFormat::Csv : TableFormat::Text;
  if (kind == "mex") {
    MexTableOptions opt;
    opt.single_max = a.max;
    opt.class_max = a.class_max;
    const MexTable t = emit_mex_table(Modulus(a.modulus.value_or(5)), opt);
    out << render(t.single_heap, fmt) << "\n" << render(t.states, fmt);
  } else if (kind == "inverses") {
    out << render(emit_inverse_table(a.field.empty() ? make_field_from_bits(2, 3, 0b1011) : parse_field(a.field)), fmt);
  } else {
    const auto values = parse_integer_list(a.values);
    if (a.modulus && *a.modulus != 15) {
      out << render(emit_crt_table(Modulus(*a.modulus), values), fmt);
    } else {
      out << render(emit_mum15_table(values), fmt);
    }
  }
  return 0;
}

int cmd_solve(const PositionArgs& a, std::size_t budget, std::ostream& out) {
  const Variant variant = variant_of(a);
  const GamePosition pos(variant, parse_integer_list(a.heaps));
  const ConsolidationPolicy policy = parse_policy(a.policy);
  out << variant.describe() << ", heaps " << heap_list(pos.heaps()) << ", policy " << to_string(policy) << "\n";

  Outcome brute;
  std::optional<std::int64_t> mex;
  if (pos.is_numeric()) {
    MumberSolver solver(budget);
    brute = solver.outcome_bruteforce(pos.numeric(), policy);
    mex = solver.mumber_value(pos.numeric(), policy);
  } else {
    PolySolver solver;
    brute = solver.outcome_bruteforce(pos.polynomial(), policy);
  }
  const Outcome by_product = pos.classify();
  MumberSolver none(1);
  const AnalysisView v = pos.analyze(policy, none);
  out << "brute-force outcome: " << to_string(brute) << "-position\n";
  out << "product classification: " << to_string(by_product) << "-position, " << verdict(pos, v) << "\n";
  out << "agreement: " << (brute == by_product ? "yes" : "NO") << "\n";
  if (mex) {
    const std::int64_t m = pos.numeric().modulus().value();
    out << "mumber (recursive mex): " << *mex << ", product mumber: " << v.product << "\n";
    if (*mex != v.product) {
      out << "note: under " << to_string(policy)
          << " the recursive mex differs from the product residue; P-positions still coincide with product 1";
      if (*mex >= m) out << " (the option mumbers cover every residue mod " << m << ")";
      out << "\n";
    }
  }
  const Hint h = pos.hint(policy);
  const auto moves = pos.legal_moves(policy);
  if (moves.empty()) {
    out << "no moves: the position is terminal\n";
  } else if (h.move) {
    out << "hint: " << move_text(*h.move) << "\n  " << h.explanation << "\n";
  } else {
    out << "hint: none, " << h.explanation << "\n";
  }
  return 0;
}

int cmd_play(const PositionArgs& a, const std::string& vs, std::istream& in, std::ostream& out) {
  const Variant variant = variant_of(a);
  GameSession s = new_session(variant, parse_integer_list(a.heaps), vs == "engine" ? Opponent::Engine : Opponent::Human,
                              parse_policy(a.policy));
  MumberSolver solver(2'000'000);
  out << variant.describe() << "\n"
      << "commands: r <heap-index> <amount> | c <amount> | hint | moves | analyze | quit\n";
  auto show = [&] {
    out << "heaps " << heap_list(s.position.heaps()) << ", " << s.player_to_move << " to move\n";
  };
  show();
  std::string line;
  while (s.status == SessionStatus::InProgress && out << "> " && std::getline(in, line)) {
    std::istringstream words(line);
    std::string cmd;
    words >> cmd;
    if (cmd.empty()) continue;
    if (cmd == "quit" || cmd == "q") return 0;
    if (cmd == "hint") {
      const Hint h = s.position.hint(s.policy);
      out << (h.move ? move_text(*h.move) + "\n  " : std::string("none, ")) << h.explanation << "\n";
      continue;
    }
    if (cmd == "moves") {
      for (const auto& m : s.position.legal_moves(s.policy)) out << "  " << move_text(m) << "\n";
      continue;
    }
    if (cmd == "analyze") {
      print_analysis(out, variant, s.position, s.policy, solver);
      continue;
    }
    MoveAction move;
    std::int64_t x = 0;
    std::int64_t y = 0;
    if ((cmd == "r" || cmd == "reduce") && words >> x >> y && x >= 0) {
      move = MoveAction::reduce(static_cast<std::size_t>(x), y);
    } else if ((cmd == "c" || cmd == "consolidate") && words >> x) {
      move = MoveAction::consolidate(x);
    } else {
      out << "unrecognised command: " << line << "\n";
      continue;
    }
    try {
      const std::string mover = s.player_to_move;
      play(s, move);
      out << mover << ": " << move_text(move) << " -> " << heap_list(s.position.heaps()) << "\n";
    } catch (const Error& e) {
      out << "illegal: " << e.what() << "\n";
      continue;
    }
    if (s.status == SessionStatus::InProgress && s.is_engine(s.player_to_move)) {
      const MoveAction reply = *engine_choice(s.position, s.policy);
      play(s, reply);
      out << "engine: " << move_text(reply) << " -> " << heap_list(s.position.heaps()) << "\n";
    }
    if (s.status == SessionStatus::InProgress) show();
  }
  if (s.status == SessionStatus::Won) out << s.winner << " wins\n";
  return 0;
}

std::optional<std::string> env(const char* name) {
  if (const char* v = std::getenv(name); v != nullptr && *v != '\0') return std::string(v);
  return std::nullopt;
}

int cmd_serve(std::string store, int port, const std::string& host, const std::string& static_dir, std::ostream& out) {
  if (auto v = env("MUM_STORE_DIR")) store = *v;
  if (auto v = env("MUM_PORT")) port = static_cast<int>(parse_integer(*v));
  SessionService service(store.empty() ? std::nullopt : std::optional<std::filesystem::path>(store));
  for (const auto& [id, why] : service.unloadable()) out << "warning: session " << id << " not loaded: " << why << "\n";
  httplib::Server server;
  register_routes(server, service, static_dir.empty() ? std::nullopt : std::optional<std::string>(static_dir));
  out << "serving " << service.size() << " session(s) on http://" << host << ":" << port;
  if (!store.empty()) out << " from " << store;
  out << std::endl;
  if (!server.listen(host, port)) {
    throw std::runtime_error("cannot listen on " + host + ":" + std::to_string(port));
  }
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multiplicative Modular Nim: analysis, tables, solving and play", "mum"};
  app.require_subcommand(1);

  PositionArgs analyze_args;
  auto* analyze = app.add_subcommand("analyze", "classify a position and show its algebra");
  add_position_options(analyze, analyze_args);

  TableArgs table_args;
  std::string kind;
  auto* table = app.add_subcommand("table", "print a reference table");
  table->add_option("kind", kind, "mex, inverses or mum15")->required()->check(CLI::IsMember({"mex", "inverses", "mum15"}));
  table->add_option("--mod", table_args.modulus, "prime for mex (default 5), modulus for the decomposition (default 15)");
  table->add_option("--field", table_args.field, "field p,n,bits for inverses (default 2,3,0b1011)");
  table->add_option("--max", table_args.max, "largest single heap in the mex table");
  table->add_option("--class-max", table_args.class_max, "largest member listed per residue class");
  table->add_option("--values", table_args.values, "heap values for the decomposition table");
  table->add_option("--format", table_args.format, "text or csv")->check(CLI::IsMember({"text", "csv"}));

  PositionArgs solve_args;
  std::size_t budget = 5'000'000;
  auto* solve = app.add_subcommand("solve", "brute-force game-tree search with the optimal move");
  add_position_options(solve, solve_args);
  solve->add_option("--budget", budget, "maximum search nodes");

  PositionArgs play_args;
  std::string vs = "human";
  auto* play_cmd = app.add_subcommand("play", "hot-seat game on the terminal");
  add_position_options(play_cmd, play_args);
  play_cmd->add_option("--vs", vs, "second seat: human or engine")->check(CLI::IsMember({"human", "engine"}));

  std::string store;
  int port = 8080;
  std::string host = "127.0.0.1";
  std::string static_dir;
  auto* serve = app.add_subcommand("serve", "HTTP session service");
  serve->add_option("--store", store, "directory for session documents (MUM_STORE_DIR takes precedence)");
  serve->add_option("--port", port, "TCP port (MUM_PORT takes precedence)");
  serve->add_option("--host", host, "bind address");
  serve->add_option("--static", static_dir, "directory of web assets to serve at /");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*analyze) return cmd_analyze(analyze_args, out);
    if (*table) return cmd_table(kind, table_args, out);
    if (*solve) return cmd_solve(solve_args, budget, out);
    if (*play_cmd) return cmd_play(play_args, vs, in, out);
    if (*serve) return cmd_serve(store, port, host, static_dir, out);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::SearchBudgetExceeded) {
      err << "SearchBudgetExceeded: " << e.what() << "; try a smaller position or a larger --budget\n";
      return 3;
    }
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace mum::cli
