// rpmon: monitor construction, Booleanization, game products and bounded
// verification for RP-LTL specifications.
//
// Exit codes: 0 success, 1 oracle or property failure, 2 usage or parse
// error, 3 external tool failure.

#include "rpmon/booleanize.hh"
#include "rpmon/oracle.hh"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <sys/wait.h>

#ifndef RPMON_DEFAULT_SOLVER
#define RPMON_DEFAULT_SOLVER "z3"
#endif

using namespace rpmon;

namespace
{
  enum exit_code { ok = 0, oracle_failed = 1, usage = 2, external = 3 };

  struct tool_error : std::runtime_error
  {
    tool_error(const std::string& m, int code) : std::runtime_error(m), code(code) {}
    int code;
  };

  struct run_config
  {
    std::string spec_path;
    std::string solver = RPMON_DEFAULT_SOLVER;
    unsigned timeout_ms = 2000;
    std::string translator;
    std::string hoa;
    std::size_t max_states = 5000;
    unsigned fixpoint_iters = 25;
    bool gen_inv_p = false;
    std::string chc;
    int box = 2;
    std::uint64_t seed = 1;
    std::string format = "json";
    std::string output;
    std::string dot;
    bool debug_soundness = false;
    bool inject_fault = false;
    unsigned samples = 200;
  };

  std::string
  read_file(const std::string& path)
  {
    std::ifstream in(path, std::ios::binary);
    if (!in)
      throw tool_error("cannot read " + path, usage);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
  }

  void
  write_output(const std::string& path, const std::string& text)
  {
    if (path.empty() || path == "-")
      {
        std::cout << text;
        return;
      }
    std::ofstream out(path, std::ios::binary);
    if (!out)
      throw tool_error("cannot write " + path, usage);
    out << text;
  }

  /// Summary lines go to stdout when the artifact goes to a file.
  std::ostream&
  report_stream(const run_config& c)
  {
    return c.output.empty() || c.output == "-" ? std::cerr : std::cout;
  }

  solver_config
  make_solver_config(const run_config& c)
  {
    solver_config s;
    s.command = c.solver.find(' ') == std::string::npos ? c.solver + " -in -smt2" : c.solver;
    s.timeout_ms = c.timeout_ms;
    return s;
  }

  monitor_config
  make_monitor_config(const run_config& c)
  {
    monitor_config m;
    m.max_states = c.max_states;
    m.engine.fixpoint.max_iterations = c.fixpoint_iters;
    m.engine.gen_inv_p = c.gen_inv_p;
    m.engine.chc_command = c.chc;
    m.engine.inject_fault = c.inject_fault;
    return m;
  }

  std::string
  shell_quote(const std::string& s)
  {
    std::string q = "'";
    for (char ch: s)
      q += ch == '\'' ? std::string("'\\''") : std::string(1, ch);
    return q + "'";
  }

  std::string
  run_translator(const std::string& cmd, const std::string& formula)
  {
    std::string line = cmd + " " + shell_quote(formula);
    FILE* p = popen(line.c_str(), "r");
    if (!p)
      throw tool_error("cannot start translator '" + cmd + "'", external);
    std::string out;
    char buf[4096];
    for (std::size_t n; (n = fread(buf, 1, sizeof buf, p)) > 0;)
      out.append(buf, n);
    int status = pclose(p);
    if (status != 0 || out.empty())
      throw tool_error("translator '" + cmd + "' failed", external);
    return out;
  }

  struct built
  {
    spec sp;
    std::unique_ptr<solver> s;
    std::unique_ptr<monitor_builder> builder;
    std::unique_ptr<soundness_auditor> auditor;
    monitor m;
  };

  built
  build_monitor(const run_config& c)
  {
    built b;
    b.sp = parse_spec_file(c.spec_path);
    b.s = std::make_unique<solver>(make_solver_config(c));
    b.builder = std::make_unique<monitor_builder>(b.sp, *b.s, make_monitor_config(c));
    if (c.debug_soundness)
      {
        b.auditor = std::make_unique<soundness_auditor>(*b.s);
        b.builder->engine().set_audit(std::ref(*b.auditor));
      }
    b.m = b.builder->build();
    return b;
  }

  parity_dpa
  obtain_dpa(const run_config& c, const booleanized& bz)
  {
    if (!c.hoa.empty())
      {
        try
          {
            return parse_hoa(read_file(c.hoa));
          }
        catch (const hoa_error& e)
          {
            throw tool_error(c.hoa + ": " + e.what(), usage);
          }
      }
    if (c.translator.empty())
      throw tool_error("product needs --hoa or --translator", usage);
    try
      {
        return parse_hoa(run_translator(c.translator, bz.text));
      }
    catch (const hoa_error& e)
      {
        throw tool_error(std::string("translator output: ") + e.what(), external);
      }
  }

  // ------------------------------------------------------------ commands

  int
  cmd_check(const run_config& c)
  {
    spec sp = parse_spec_file(c.spec_path);
    predicate_table t = predicate_table::from_spec(sp);
    std::cout << "OK, " << t.size() << " atoms, " << t.prop_preds().size() << " PropPreds\n";
    for (std::size_t i = 0; i < t.size(); ++i)
      std::cout << "  atom " << i << ": " << to_string(t.atom(i)) << "\n";
    for (auto& p: t.prop_preds())
      std::cout << "  prop-pred: " << to_string(p) << "\n";
    return ok;
  }

  int
  cmd_booleanize(const run_config& c)
  {
    spec sp = parse_spec_file(c.spec_path);
    booleanized bz = booleanize(sp.phi());
    std::cout << bz.text << "\n";
    for (std::size_t i = 0; i < bz.props.size(); ++i)
      std::cout << "# p" << i << " = " << to_string(bz.props[i]) << "\n";
    return ok;
  }

  void
  monitor_summary(std::ostream& os, const monitor& m)
  {
    os << "states: " << m.states.size() << " (UNSAT " << m.count(verdict::unsat) << ", SAFETY "
       << m.count(verdict::safety) << ", OPEN " << m.count(verdict::open) << ")\n";
    os << "GF discharged: " << m.gf_discharged << " obligation(s)\n";
    bool unsat_bound = false, all_closed = true;
    for (auto* t: m.outgoing(m.init))
      {
        if (m.verdicts[t->to] == verdict::unsat)
          unsat_bound = true;
        else if (!m.states[t->to].as_formula().is_true())
          all_closed = false;
      }
    os << "initial obligations UNSAT-bound: " << (unsat_bound && all_closed ? "yes" : "no") << "\n";
    os << "all states SAFETY: " << (m.count(verdict::open) == 0 ? "yes" : "no") << "\n";
  }

  int
  cmd_monitor(const run_config& c)
  {
    built b = build_monitor(c);
    if (c.format != "json" && c.format != "dot")
      throw tool_error("monitor supports --format json or dot", usage);
    write_output(c.output, c.format == "dot" ? to_dot(b.m) : to_json(b.m));
    if (!c.dot.empty())
      write_output(c.dot, to_dot(b.m));
    monitor_summary(report_stream(c), b.m);
    if (b.auditor)
      {
        report_stream(c) << b.auditor->report().summary("rule soundness audit");
        if (!b.auditor->report().ok())
          return oracle_failed;
      }
    return ok;
  }

  int
  cmd_product(const run_config& c)
  {
    built b = build_monitor(c);
    booleanized bz = booleanize(b.sp.phi());
    parity_dpa dpa = obtain_dpa(c, bz);
    symbolic_game g;
    try
      {
        g = game_from_dpa(dpa, bz.props, b.sp.input_vars(), b.sp.program_vars());
      }
    catch (const std::invalid_argument& e)
      {
        throw tool_error(e.what(), c.hoa.empty() ? external : usage);
      }
    product_game p = product(g, b.m, *b.s);
    if (c.format != "game")
      throw tool_error("product supports --format game", usage);
    write_output(c.output, serialize(p));
    auto& os = report_stream(c);
    os << "game locations: " << g.locs.size() << "\n";
    os << "product locations: " << p.locs.size() << " (UNSAT " << p.count(verdict::unsat)
       << ", SAFETY " << p.count(verdict::safety) << ", OPEN " << p.count(verdict::open) << ")\n";
    std::size_t open = p.count(verdict::open);
    std::size_t losing = p.count(verdict::unsat);
    if (open == 0)
      os << "winning condition: safety on all reachable locations ("
         << losing << " losing UNSAT sinks)\n";
    else
      os << "winning condition: parity on " << open << " of " << p.locs.size()
         << " locations, safety on " << p.count(verdict::safety)
         << ", losing on " << losing << "\n";
    return ok;
  }

  int
  cmd_verify(const run_config& c)
  {
    built b = build_monitor(c);
    formula phi = b.sp.phi();
    oracle_config oc;
    oc.radius = c.box;
    oc.seed = c.seed;
    oc.random_lassos = c.samples;
    oc.targeted = targeted_constants(b.sp);
    lasso_source src(b.sp, oc, *b.s);
    auto ws = src.mixed(phi);
    bool pass = true;
    auto show = [&](const oracle_report& r, const std::string& name)
    {
      std::cout << r.summary(name);
      pass = pass && r.ok();
    };
    std::cout << "monitor: " << b.m.states.size() << " states, " << ws.size() << " lassos\n";
    show(check_state_correctness(b.m, phi, ws), "monitor-state correctness");
    show(check_verdicts(b.m, phi, ws), "verdict conditions");
    if (b.auditor)
      show(b.auditor->report(), "rule soundness audit");
    if (!c.hoa.empty() || !c.translator.empty())
      {
        booleanized bz = booleanize(phi);
        symbolic_game g = game_from_dpa(obtain_dpa(c, bz), bz.props, b.sp.input_vars(),
                                        b.sp.program_vars());
        product_game p = product(g, b.m, *b.s);
        show(check_pseudo_language(g, p, ws), "pseudo-language equality");
      }
    std::cout << (pass ? "verify: pass\n" : "verify: FAIL\n");
    return pass ? ok : oracle_failed;
  }
}

int
main(int argc, char** argv)
{
  CLI::App app{"Monitor-based analysis of RP-LTL specifications"};
  app.require_subcommand(1);
  run_config c;

  auto common = [&](CLI::App* sub, bool build)
  {
    sub->add_option("spec", c.spec_path, "Specification file")->required();
    if (!build)
      return;
    sub->add_option("--solver", c.solver, "SMT-LIB2 solver executable")->envname("RPMON_SOLVER");
    sub->add_option("--timeout-ms", c.timeout_ms, "Per-query solver timeout")
      ->envname("RPMON_TIMEOUT_MS");
    sub->add_option("--max-states", c.max_states, "Monitor state cap")->envname("RPMON_MAX_STATES");
    sub->add_option("--fixpoint-iters", c.fixpoint_iters, "Fixpoint iteration budget")
      ->envname("RPMON_FIXPOINT_ITERS")->check(CLI::PositiveNumber);
    sub->add_flag("--enable-gen-inv-p", c.gen_inv_p, "Enable the Gen-Inv-P rule")
      ->envname("RPMON_ENABLE_GEN_INV_P");
    sub->add_option("--chc", c.chc, "CHC solver used for invariant strengthening")
      ->envname("RPMON_CHC");
    sub->add_flag("--debug-soundness", c.debug_soundness, "Audit every rule application")
      ->envname("RPMON_DEBUG_SOUNDNESS");
    sub->add_flag("--inject-fault", c.inject_fault)->group("");
    sub->add_option("-o,--output", c.output, "Output file (default stdout)");
  };

  auto* check = app.add_subcommand("check", "Parse and summarize a specification");
  common(check, false);
  auto* boolz = app.add_subcommand("booleanize", "Print the propositional abstraction");
  common(boolz, false);

  auto* mon = app.add_subcommand("monitor", "Build the monitor");
  common(mon, true);
  mon->add_option("--format", c.format, "json or dot")->envname("RPMON_FORMAT")
    ->check(CLI::IsMember({"json", "dot"}));
  mon->add_option("--dot", c.dot, "Also write a DOT rendering");

  auto* prod = app.add_subcommand("product", "Build the game-monitor product");
  common(prod, true);
  prod->add_option("--hoa", c.hoa, "Parity automaton in HOA format")->envname("RPMON_HOA");
  prod->add_option("--translator", c.translator, "LTL-to-HOA translator executable")
    ->envname("RPMON_TRANSLATOR");
  prod->add_option("--format", c.format, "game")->check(CLI::IsMember({"game"}));

  auto* ver = app.add_subcommand("verify", "Run the bounded lasso oracles");
  common(ver, true);
  ver->add_option("--hoa", c.hoa, "Parity automaton in HOA format")->envname("RPMON_HOA");
  ver->add_option("--translator", c.translator, "LTL-to-HOA translator executable")
    ->envname("RPMON_TRANSLATOR");
  ver->add_option("--box", c.box, "Value radius for random lassos")->envname("RPMON_BOX")
    ->check(CLI::NonNegativeNumber);
  ver->add_option("--seed", c.seed, "Random seed")->envname("RPMON_SEED");
  ver->add_option("--samples", c.samples, "Random lassos")->envname("RPMON_SAMPLES");

  try
    {
      app.parse(argc, argv);
    }
  catch (const CLI::ParseError& e)
    {
      int r = app.exit(e);
      return r == 0 ? ok : usage;
    }
  if (prod->parsed())
    c.format = c.format == "json" ? "game" : c.format;

  try
    {
      if (check->parsed())
        return cmd_check(c);
      if (boolz->parsed())
        return cmd_booleanize(c);
      if (mon->parsed())
        return cmd_monitor(c);
      if (prod->parsed())
        return cmd_product(c);
      if (ver->parsed())
        return cmd_verify(c);
    }
  catch (const parse_error& e)
    {
      std::cerr << c.spec_path << ":" << e.what() << "\n";
      return usage;
    }
  catch (const tool_error& e)
    {
      std::cerr << "rpmon: " << e.what() << "\n";
      return e.code;
    }
  catch (const smt_process_error& e)
    {
      std::cerr << "rpmon: solver failure: " << e.what() << "\n";
      return external;
    }
  catch (const state_overflow& e)
    {
      std::cerr << "rpmon: " << e.what() << "\n";
      return oracle_failed;
    }
  catch (const monitor_error& e)
    {
      std::cerr << "rpmon: internal error: " << e.what() << "\n";
      return oracle_failed;
    }
  catch (const std::exception& e)
    {
      std::cerr << "rpmon: " << e.what() << "\n";
      return usage;
    }
  return usage;
}
