// Command-line front end: eval, equiv, law, assert, actor run|observe.
//
// Reports are line records. The first line is the result, then `key value`
// lines. Exit codes: 0 holds/success, 1 fails, 2 unknown, 3 usage or input error.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "effects/effects.hpp"

namespace {

using namespace effects;

constexpr int kHolds = 0;
constexpr int kFails = 1;
constexpr int kUnknown = 2;
constexpr int kUsage = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int exit_code(const Verdict& v) {
  switch (v.kind) {
    case VerdictKind::Holds: return kHolds;
    case VerdictKind::Fails: return kFails;
    case VerdictKind::Unknown: return kUnknown;
  }
  return kUsage;
}

class Timer {
 public:
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void print_time(const Timer& t) {
  std::ostringstream ss;
  ss.setf(std::ios::fixed);
  ss.precision(1);
  ss << t.ms();
  std::cout << "time-ms " << ss.str() << "\n";
}

void print_verdict(const Verdict& v) {
  std::cout << headline(v) << "\n";
  if (v.is_fails() && v.witness) {
    for (std::size_t i = 0; i < v.witness->programs.size(); ++i)
      std::cout << "replay-" << i << " " << to_string(v.witness->replay(i)) << "\n";
  }
  std::cout << "cases " << v.cases << "\n";
  std::cout << "definite " << v.definite << "\n";
  std::cout << "indeterminate " << v.indeterminate << "\n";
}

std::string config_line(const EnumConfig& c) {
  return "config value-depth=" + std::to_string(c.value_depth) + " cells=" + std::to_string(c.max_cells) +
         " ctx-depth=" + std::to_string(c.ctx_depth) + " max-steps=" + std::to_string(c.max_steps) +
         " max-cases=" + std::to_string(c.max_cases) + " seed=" + std::to_string(c.seed) +
         (c.first_order ? " first-order" : "");
}

std::uint64_t default_seed() {
  if (const char* s = std::getenv("EFFECTS_SEED")) {
    try {
      return std::stoull(s);
    } catch (const std::exception&) {
      throw Error("EFFECTS_SEED must be a non-negative integer");
    }
  }
  return 0;
}

struct EnumFlags {
  std::size_t value_depth = 2;
  std::size_t cells = 3;
  std::size_t ctx_depth = 2;
  std::size_t max_steps = 2000;
  std::size_t max_cases = 20000;
  std::optional<std::uint64_t> seed;
  bool first_order = false;

  void add(CLI::App* app, bool with_ctx = true) {
    app->add_option("--value-depth", value_depth, "Depth of enumerated values")->capture_default_str();
    app->add_option("--cells", cells, "Largest enumerated memory")->capture_default_str();
    if (with_ctx) app->add_option("--ctx-depth", ctx_depth, "Depth of enumerated uses")->capture_default_str();
    app->add_option("--max-steps", max_steps, "Step budget per evaluation")->capture_default_str();
    app->add_option("--max-cases", max_cases, "Case budget before sampling")->capture_default_str();
    app->add_option("--seed", seed, "Seed (default: EFFECTS_SEED or 0)");
  }

  EnumConfig config() const {
    EnumConfig c;
    c.value_depth = value_depth;
    c.max_cells = cells;
    c.ctx_depth = ctx_depth;
    c.max_steps = max_steps;
    c.max_cases = max_cases;
    c.seed = seed ? *seed : default_seed();
    c.first_order = first_order;
    c.validate();
    return c;
  }
};

void echo_command(int argc, char** argv) {
  std::cout << "command";
  for (int i = 1; i < argc; ++i) std::cout << " " << argv[i];
  std::cout << "\n";
}

// --- eval -------------------------------------------------------------------

struct EvalArgs {
  std::string file;
  std::string inline_expr;
  std::size_t max_steps = 2000;
  bool trace = false;
  bool detect_loops = false;
};

int run_eval(const EvalArgs& a) {
  if (a.file.empty() == a.inline_expr.empty()) throw CLI::ValidationError("eval needs exactly one of FILE or -e EXPR");
  const Timer timer;
  const std::string text = a.inline_expr.empty() ? read_file(a.file) : a.inline_expr;
  const auto forms = read_sexps(text);
  if (forms.size() != 1) throw Error("expected exactly one expression");
  Description d;
  if (forms[0].has_head("describe")) {
    // (describe (memory ...) EXPR) starts from a given memory.
    if (forms[0].items.size() != 3) forms[0].fail("expected (describe (memory ...) EXPR)");
    d.memory = parse_memory(forms[0].items[1]);
    d.expr = parse_expr(forms[0].items[2]);
  } else {
    d.expr = parse_expr(forms[0]);
  }
  EvalOptions opts;
  opts.max_steps = a.max_steps;
  opts.detect_loops = a.detect_loops;
  Outcome o;
  if (a.trace) {
    const auto t = eval_with_trace(d, a.max_steps);
    for (const auto& v : t.visited) std::cout << "step " << to_string(v) << "\n";
    o = t.outcome;
  } else {
    o = eval(d, opts);
  }
  switch (o.kind) {
    case OutcomeKind::Value: std::cout << "VALUE " << to_string(o.value()) << "\n"; break;
    case OutcomeKind::Stuck: std::cout << "STUCK " << to_string(o.last.expr) << "\n"; break;
    case OutcomeKind::Timeout: std::cout << "TIMEOUT " << o.steps << "\n"; break;
    case OutcomeKind::Diverged: std::cout << "DIVERGED " << o.steps << "\n"; break;
  }
  std::cout << "memory " << render_memory(o.last.memory) << "\n";
  std::cout << "steps " << o.steps << "\n";
  print_time(timer);
  switch (o.kind) {
    case OutcomeKind::Value: return kHolds;
    case OutcomeKind::Timeout: return kUnknown;
    default: return kFails;
  }
}

// --- equiv ------------------------------------------------------------------

struct EquivArgs {
  std::string method = "ciu";
  std::vector<std::string> exprs;
  EnumFlags flags;
};

int run_equiv(const EquivArgs& a) {
  if (a.exprs.size() != 2) throw CLI::ValidationError("equiv needs two expressions");
  const Timer timer;
  const EnumConfig cfg = a.flags.config();
  std::cout << config_line(cfg) << " method=" << a.method << "\n";
  const Expr e0 = parse(a.exprs[0]);
  const Expr e1 = parse(a.exprs[1]);
  const Verdict v = a.method == "strong-iso" ? strong_iso(e0, e1, cfg) : ciu_test(e0, e1, cfg);
  print_verdict(v);
  if (cfg.first_order) {
    // Agreement statistics between the two oracles on the restricted domain.
    const Verdict other = a.method == "strong-iso" ? ciu_test(e0, e1, cfg) : strong_iso(e0, e1, cfg);
    const auto word = [](const Verdict& x) { return headline(x).substr(0, headline(x).find(' ')); };
    std::cout << "agreement " << (v.kind == other.kind ? "yes" : "no") << " " << a.method << "=" << word(v)
              << " other=" << word(other) << "\n";
  }
  print_time(timer);
  return exit_code(v);
}

// --- law --------------------------------------------------------------------

struct LawArgs {
  std::string name;
  bool all = false;
  std::string file;
  std::size_t cases = 100;
  std::size_t per_instance = 200;
  EnumFlags flags;
};

int run_law(const LawArgs& a) {
  if (a.all == !a.name.empty()) throw CLI::ValidationError("law needs exactly one of --name or --all");
  const Timer timer;
  std::vector<Law> laws = builtin_laws();
  if (!a.file.empty())
    for (Law& l : parse_laws(read_file(a.file))) laws.push_back(std::move(l));
  const EnumConfig cfg = a.flags.config();
  LawOptions opts;
  opts.instances = a.cases;
  opts.cases_per_instance = a.per_instance;
  opts.seed = cfg.seed;
  std::cout << config_line(cfg) << " instances=" << opts.instances << " cases-per-instance="
            << opts.cases_per_instance << "\n";
  if (!a.all) {
    const Law* law = find_law(laws, a.name);
    if (!law) throw Error("unknown law '" + a.name + "'");
    const LawResult r = law_check(*law, cfg, opts);
    print_verdict(r.verdict);
    std::cout << "instances " << r.instances << "\n";
    std::cout << "expected " << (law->expect_holds ? "holds" : "fails") << "\n";
    std::cout << "as-expected " << (r.as_expected ? "yes" : "no") << "\n";
    print_time(timer);
    return exit_code(r.verdict);
  }
  bool all_expected = true;
  for (const Law& law : laws) {
    const LawResult r = law_check(law, cfg, opts);
    all_expected = all_expected && r.as_expected;
    std::cout << "law " << law.name << " " << headline(r.verdict) << "\n";
    std::cout << "  expected " << (law.expect_holds ? "holds" : "fails") << " as-expected "
              << (r.as_expected ? "yes" : "no") << " instances " << r.instances << " cases " << r.verdict.cases
              << " indeterminate " << r.verdict.indeterminate << "\n";
  }
  std::cout << "summary " << (all_expected ? "all-as-expected" : "unexpected-results") << "\n";
  print_time(timer);
  return all_expected ? kHolds : kFails;
}

// --- assert -----------------------------------------------------------------

struct AssertArgs {
  std::string file;
  EnumFlags flags;
};

int run_assert(const AssertArgs& a) {
  const Timer timer;
  FormulaFile ff = parse_formula_file(read_file(a.file));
  LogicConfig lc;
  lc.enums = a.flags.config();
  std::cout << config_line(lc.enums) << "\n";
  const Checker checker(lc, ff.theory);
  int code = kHolds;
  for (const auto& [name, phi] : ff.assertions) {
    const Verdict v = checker.valid(phi);
    std::cout << "assert " << name << " " << headline(v) << "\n";
    std::cout << "  cases " << v.cases << " indeterminate " << v.indeterminate << "\n";
    if (v.is_fails()) code = kFails;
    else if (v.is_unknown() && code == kHolds) code = kUnknown;
  }
  print_time(timer);
  return code;
}

// --- actor ------------------------------------------------------------------

struct ActorArgs {
  std::string config;
  std::string scheduler = "rr";
  std::string script;
  std::optional<std::uint64_t> seed;
  std::size_t samples = 64;
  std::size_t max_steps = 2000;
  std::size_t window = 8;
};

int run_actor(const ActorArgs& a, bool observe) {
  const Timer timer;
  const Configuration c = parse_config(read_file(a.config));
  const std::uint64_t seed = a.seed ? *a.seed : default_seed();
  std::cout << "config scheduler=" << (observe ? "random" : a.scheduler) << " seed=" << seed
            << " max-steps=" << a.max_steps << " window=" << a.window;
  if (observe) std::cout << " samples=" << a.samples;
  std::cout << "\n";
  if (observe) {
    const ObserveResult r = observe_event(c, a.samples, a.max_steps, {}, seed);
    std::cout << "OBSERVED " << observation_name(r.observation) << "\n";
    std::cout << "samples " << r.samples << "\n";
    std::cout << "runs-with-event " << r.runs_with_event << "\n";
    for (const auto& [tag, n] : r.runs_per_tag) std::cout << "tag " << tag << " " << n << "\n";
    print_time(timer);
    return kHolds;
  }
  std::unique_ptr<Scheduler> sched;
  if (a.scheduler == "rr") {
    sched = std::make_unique<RoundRobinScheduler>(a.window);
  } else if (a.scheduler == "random") {
    sched = std::make_unique<RandomScheduler>(seed);
  } else {
    if (a.script.empty()) throw CLI::ValidationError("--scheduler script needs a script file");
    sched = std::make_unique<ScriptedScheduler>(parse_script(read_file(a.script)));
  }
  const RunResult r = run(c, *sched, a.max_steps);
  for (std::size_t i = 0; i < r.trace.size(); ++i) std::cout << "step " << i << " " << to_string(r.trace[i].label) << "\n";
  std::cout << "RUN " << (r.quiescent ? "quiescent" : r.stopped ? "stopped" : "budget") << "\n";
  std::cout << "final " << render_config(r.final) << "\n";
  std::cout << "audit interface-monotone " << (audit_interface_monotone(c, r.trace) ? "pass" : "fail") << "\n";
  std::cout << "audit anonymous-privacy " << (audit_anonymous_privacy(r) ? "pass" : "fail") << "\n";
  if (a.scheduler == "rr")
    std::cout << "audit fairness-window " << (r.max_delivery_wait <= a.window ? "pass" : "fail") << " max-wait "
              << r.max_delivery_wait << "\n";
  print_time(timer);
  return kHolds;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semantics workbench for a call-by-value lambda language with cells and actors"};
  app.require_subcommand(1);

  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand("eval", "Reduce an expression");
  eval_cmd->add_option("FILE", eval_args.file, "File holding one expression");
  eval_cmd->add_option("-e", eval_args.inline_expr, "Inline expression");
  eval_cmd->add_option("--max-steps", eval_args.max_steps, "Step budget")->capture_default_str();
  eval_cmd->add_flag("--trace", eval_args.trace, "Print each description");
  eval_cmd->add_flag("--detect-loops", eval_args.detect_loops, "Report exact cycles as divergence");

  EquivArgs equiv_args;
  auto* equiv_cmd = app.add_subcommand("equiv", "Compare two expressions");
  equiv_cmd->add_option("--method", equiv_args.method, "strong-iso or ciu")
      ->check(CLI::IsMember({"strong-iso", "ciu"}))
      ->capture_default_str();
  equiv_cmd->add_flag("--first-order", equiv_args.flags.first_order, "Atoms and cells only; compare both oracles");
  equiv_args.flags.add(equiv_cmd);
  equiv_cmd->add_option("EXPRS", equiv_args.exprs, "E0 E1")->expected(2)->required();

  LawArgs law_args;
  auto* law_cmd = app.add_subcommand("law", "Check a law from the catalog");
  law_cmd->add_option("--name", law_args.name, "Law name");
  law_cmd->add_flag("--all", law_args.all, "Check every law");
  law_cmd->add_option("--file", law_args.file, "Extra law definitions");
  law_cmd->add_option("--cases", law_args.cases, "Instances per schema law")->capture_default_str();
  law_cmd->add_option("--per-instance", law_args.per_instance, "Cases per instance")->capture_default_str();
  law_args.flags.add(law_cmd);

  AssertArgs assert_args;
  auto* assert_cmd = app.add_subcommand("assert", "Check formulas for validity");
  assert_args.flags.add(assert_cmd, false);
  assert_cmd->add_option("FILE", assert_args.file, "Formula file")->required();

  ActorArgs actor_args;
  auto* actor_cmd = app.add_subcommand("actor", "Actor configurations");
  actor_cmd->require_subcommand(1);
  auto add_actor_flags = [&](CLI::App* cmd, bool observe) {
    if (!observe) {
      cmd->add_option("--scheduler", actor_args.scheduler, "rr, random or script")
          ->check(CLI::IsMember({"rr", "random", "script"}))
          ->capture_default_str();
      cmd->add_option("--script", actor_args.script, "Script file for --scheduler script");
      cmd->add_option("--window", actor_args.window, "Fairness window")->capture_default_str();
    }
    cmd->add_option("--seed", actor_args.seed, "Seed (default: EFFECTS_SEED or 0)");
    cmd->add_option("--samples", actor_args.samples, "Sampled runs")->capture_default_str();
    cmd->add_option("--max-steps", actor_args.max_steps, "Transitions per run")->capture_default_str();
    cmd->add_option("CONFIG", actor_args.config, "Configuration file")->required();
  };
  auto* actor_run = actor_cmd->add_subcommand("run", "Run one schedule");
  add_actor_flags(actor_run, false);
  auto* actor_observe = actor_cmd->add_subcommand("observe", "Sample random schedules for events");
  add_actor_flags(actor_observe, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    echo_command(argc, argv);
    if (*eval_cmd) return run_eval(eval_args);
    if (*equiv_cmd) return run_equiv(equiv_args);
    if (*law_cmd) return run_law(law_args);
    if (*assert_cmd) return run_assert(assert_args);
    if (*actor_run) return run_actor(actor_args, false);
    if (*actor_observe) return run_actor(actor_args, true);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ScriptError& e) {
    std::cout << "SCRIPT-ERROR " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
