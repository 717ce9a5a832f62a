#include "rpmon/smt.hh"

#include <cerrno>
#include <chrono>
#include <csignal>
#include <cstring>
#include <sstream>

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

namespace rpmon
{
  namespace
  {
    const char* marker = "rpmon-done";

    std::string
    num(std::int64_t k)
    {
      if (k < 0)
        return "(- " + std::to_string(-k) + ")";
      return std::to_string(k);
    }

    using symbol_fn = std::function<std::string(const std::string&)>;

    std::string
    term_text(const lin_term& t, const symbol_fn& sym, bool with_constant)
    {
      std::vector<std::string> parts;
      for (auto& [v, c]: t.coeffs())
        parts.push_back(c == 1 ? sym(v) : "(* " + num(c) + " " + sym(v) + ")");
      if (with_constant && (t.constant() != 0 || parts.empty()))
        parts.push_back(num(t.constant()));
      if (parts.empty())
        return "0";
      if (parts.size() == 1)
        return parts.front();
      std::string r = "(+";
      for (auto& p: parts)
        r += " " + p;
      return r + ")";
    }

    void
    qf_text(std::ostream& os, const formula& f, const symbol_fn& sym)
    {
      switch (f.kind())
        {
        case op::tt:
          os << "true";
          return;
        case op::ff:
          os << "false";
          return;
        case op::atom:
          {
            static const char* names[] = {"<=", "<", "=", "distinct", ">=", ">"};
            const lin_term& t = f.atom_term();
            // sum c*v + k (cmp) 0  written as  sum c*v (cmp) -k
            lin_term vars = t - lin_term(t.constant());
            os << "(" << names[static_cast<int>(f.atom_cmp())] << " "
               << term_text(vars, sym, false) << " " << num(-t.constant()) << ")";
            return;
          }
        case op::not_:
          os << "(not ";
          qf_text(os, f[0], sym);
          os << ")";
          return;
        case op::and_:
        case op::or_:
          os << (f.is(op::and_) ? "(and" : "(or");
          for (auto& c: f.children())
            {
              os << " ";
              qf_text(os, c, sym);
            }
          os << ")";
          return;
        default:
          throw std::invalid_argument("temporal operator in SMT query: " + to_string(f));
        }
    }

    struct fo_printer
    {
      std::map<std::string, std::string> env;
      unsigned next = 0;

      std::string
      sym(const std::string& v) const
      {
        auto it = env.find(v);
        return it != env.end() ? it->second : smt_symbol(v);
      }

      void
      print(std::ostream& os, const fo_formula& f)
      {
        switch (f.type())
          {
          case fo_formula::kind::leaf:
            qf_text(os, f.leaf(), [this](const std::string& v) { return sym(v); });
            return;
          case fo_formula::kind::and_:
          case fo_formula::kind::or_:
            os << (f.type() == fo_formula::kind::and_ ? "(and" : "(or");
            for (auto& c: f.children())
              {
                os << " ";
                print(os, c);
              }
            os << ")";
            return;
          case fo_formula::kind::not_:
            os << "(not ";
            print(os, f.children().front());
            os << ")";
            return;
          case fo_formula::kind::forall:
          case fo_formula::kind::exists:
            {
              auto saved = env;
              os << (f.type() == fo_formula::kind::forall ? "(forall (" : "(exists (");
              bool first = true;
              for (auto& b: f.bound())
                {
                  std::string name = "|!b" + std::to_string(next++) + "|";
                  env[b] = name;
                  os << (first ? "" : " ") << "(" << name << " Int)";
                  first = false;
                }
              os << ") ";
              print(os, f.children().front());
              os << ")";
              env = saved;
              return;
            }
          }
      }
    };
  }

  std::string
  smt_symbol(const std::string& v)
  {
    return "|" + v + "|";
  }

  std::string
  smtlib(const fo_formula& f)
  {
    std::ostringstream os;
    fo_printer p;
    p.print(os, f);
    return os.str();
  }

  std::string
  smtlib(const formula& f)
  {
    std::ostringstream os;
    qf_text(os, f, smt_symbol);
    return os.str();
  }

  std::string
  smtlib_plain(const formula& f)
  {
    std::ostringstream os;
    qf_text(os, f, [](const std::string& v)
    {
      return is_primed(v) ? unprimed(v) + "_p" : v;
    });
    return os.str();
  }

  // ------------------------------------------------------------ term reader

  namespace
  {
    struct converter
    {
      const std::map<std::string, std::string>& names;
      std::vector<std::map<std::string, sexpr>> lets;

      const sexpr*
      lookup_let(const std::string& s) const
      {
        for (auto it = lets.rbegin(); it != lets.rend(); ++it)
          {
            auto f = it->find(s);
            if (f != it->end())
              return &f->second;
          }
        return nullptr;
      }

      std::optional<lin_term>
      term(const sexpr& e)
      {
        if (e.is_atom)
          {
            if (auto* b = lookup_let(e.atom))
              return term(*b);
            const std::string& s = e.atom;
            if (!s.empty() && (std::isdigit(static_cast<unsigned char>(s[0]))))
              {
                try
                  {
                    return lin_term(std::stoll(s));
                  }
                catch (...)
                  {
                    return std::nullopt;
                  }
              }
            auto it = names.find(s);
            return lin_term::var(it != names.end() ? it->second : s);
          }
        if (e.size() == 0 || !e[0].is_atom)
          return std::nullopt;
        const std::string& h = e[0].atom;
        if (h == "let")
          return with_let(e, [&](const sexpr& b) { return term(b); });
        if (h == "+" || h == "-")
          {
            if (e.size() < 2)
              return std::nullopt;
            auto acc = term(e[1]);
            if (!acc)
              return std::nullopt;
            if (h == "-" && e.size() == 2)
              return -*acc;
            for (std::size_t i = 2; i < e.size(); ++i)
              {
                auto t = term(e[i]);
                if (!t)
                  return std::nullopt;
                *acc = h == "+" ? *acc + *t : *acc - *t;
              }
            return acc;
          }
        if (h == "*")
          {
            lin_term acc(1);
            for (std::size_t i = 1; i < e.size(); ++i)
              {
                auto t = term(e[i]);
                if (!t)
                  return std::nullopt;
                if (t->is_constant())
                  acc = acc * t->constant();
                else if (acc.is_constant())
                  acc = *t * acc.constant();
                else
                  return std::nullopt;
              }
            return acc;
          }
        return std::nullopt;
      }

      template<class F>
      auto
      with_let(const sexpr& e, F&& body) -> decltype(body(e))
      {
        if (e.size() != 3 || e[1].is_atom)
          return std::nullopt;
        std::map<std::string, sexpr> scope;
        for (auto& b: e[1].list)
          {
            if (b.is_atom || b.size() != 2 || !b[0].is_atom)
              return std::nullopt;
            scope[b[0].atom] = b[1];
          }
        lets.push_back(std::move(scope));
        auto r = body(e[2]);
        lets.pop_back();
        return r;
      }

      bool
      is_bool_term(const sexpr& e)
      {
        if (e.is_atom)
          {
            if (e.atom == "true" || e.atom == "false")
              return true;
            if (auto* b = lookup_let(e.atom))
              return is_bool_term(*b);
            return false;
          }
        if (e.size() == 0 || !e[0].is_atom)
          return false;
        static const std::set<std::string> bool_heads =
          {"and", "or", "not", "=>", "<=", ">=", "<", ">", "=", "distinct", "xor"};
        if (e[0].atom == "let")
          return e.size() == 3 && is_bool_term(e[2]);
        if (e[0].atom == "ite")
          return e.size() == 4 && is_bool_term(e[2]);
        return bool_heads.count(e[0].atom) > 0;
      }

      std::optional<formula>
      form(const sexpr& e)
      {
        if (e.is_atom)
          {
            if (e.atom == "true")
              return f_true();
            if (e.atom == "false")
              return f_false();
            if (auto* b = lookup_let(e.atom))
              return form(*b);
            return std::nullopt;
          }
        if (e.size() == 0 || !e[0].is_atom)
          return std::nullopt;
        const std::string& h = e[0].atom;
        if (h == "let")
          return with_let(e, [&](const sexpr& b) { return form(b); });
        std::vector<formula> args;
        auto all_forms = [&]() -> bool
        {
          for (std::size_t i = 1; i < e.size(); ++i)
            {
              auto f = form(e[i]);
              if (!f)
                return false;
              args.push_back(*f);
            }
          return true;
        };
        if (h == "and" || h == "or")
          {
            if (!all_forms())
              return std::nullopt;
            return h == "and" ? f_and(args) : f_or(args);
          }
        if (h == "not")
          {
            if (e.size() != 2 || !all_forms())
              return std::nullopt;
            return f_not(args[0]);
          }
        if (h == "=>")
          {
            if (e.size() != 3 || !all_forms())
              return std::nullopt;
            return f_implies(args[0], args[1]);
          }
        if (h == "xor")
          {
            if (e.size() != 3 || !all_forms())
              return std::nullopt;
            return f_not(f_iff(args[0], args[1]));
          }
        if (h == "ite")
          {
            if (e.size() != 4 || !all_forms())
              return std::nullopt;
            return f_or(f_and(args[0], args[1]), f_and(f_not(args[0]), args[2]));
          }
        if (h == "=" && e.size() == 3 && is_bool_term(e[1]))
          {
            if (!all_forms())
              return std::nullopt;
            return f_iff(args[0], args[1]);
          }
        static const std::map<std::string, cmp> cmps =
          {{"<=", cmp::le}, {"<", cmp::lt}, {"=", cmp::eq}, {"distinct", cmp::ne},
           {">=", cmp::ge}, {">", cmp::gt}};
        auto c = cmps.find(h);
        if (c == cmps.end() || e.size() < 3)
          return std::nullopt;
        std::vector<lin_term> ts;
        for (std::size_t i = 1; i < e.size(); ++i)
          {
            auto t = term(e[i]);
            if (!t)
              return std::nullopt;
            ts.push_back(*t);
          }
        std::vector<formula> chain;
        for (std::size_t i = 0; i + 1 < ts.size(); ++i)
          chain.push_back(f_cmp(ts[i], c->second, ts[i + 1]));
        return f_and(chain);
      }
    };
  }

  std::optional<formula>
  from_smtlib(const sexpr& e, const std::map<std::string, std::string>& name_map)
  {
    converter c{name_map, {}};
    return c.form(e);
  }

  // ---------------------------------------------------------------- process

  solver::solver(solver_config cfg) : cfg_(std::move(cfg))
  {
    start();
  }

  solver::~solver()
  {
    stop();
  }

  void
  solver::start()
  {
    std::vector<std::string> argv_s;
    {
      std::istringstream is(cfg_.command);
      std::string w;
      while (is >> w)
        argv_s.push_back(w);
    }
    if (argv_s.empty())
      throw smt_process_error("empty solver command");

    int in_pipe[2], out_pipe[2], err_pipe[2];
    if (pipe2(in_pipe, O_CLOEXEC) || pipe2(out_pipe, O_CLOEXEC) || pipe2(err_pipe, O_CLOEXEC))
      throw smt_process_error("pipe failed");
    pid_t pid = fork();
    if (pid < 0)
      throw smt_process_error("fork failed");
    if (pid == 0)
      {
        dup2(in_pipe[0], 0);
        dup2(out_pipe[1], 1);
        dup2(out_pipe[1], 2);
        std::vector<char*> argv;
        for (auto& a: argv_s)
          argv.push_back(a.data());
        argv.push_back(nullptr);
        execvp(argv[0], argv.data());
        // Report the exec failure through the dedicated pipe.
        char c = 1;
        [[maybe_unused]] auto r = write(err_pipe[1], &c, 1);
        _exit(127);
      }
    close(in_pipe[0]);
    close(out_pipe[1]);
    close(err_pipe[1]);
    char c;
    ssize_t n = read(err_pipe[0], &c, 1);
    close(err_pipe[0]);
    if (n == 1)
      {
        waitpid(pid, nullptr, 0);
        close(in_pipe[1]);
        close(out_pipe[0]);
        throw smt_process_error("cannot execute solver '" + argv_s[0] + "'");
      }
    pid_ = pid;
    to_child_ = in_pipe[1];
    from_child_ = out_pipe[0];
    pending_.clear();
    current_timeout_ = 0;
    signal(SIGPIPE, SIG_IGN);
    send("(set-option :print-success false)\n(set-logic " + cfg_.logic + ")\n");
  }

  void
  solver::fresh_session()
  {
    std::lock_guard<std::mutex> lock(mtx_);
    stop();
  }

  void
  solver::stop()
  {
    if (pid_ < 0)
      return;
    send("(exit)\n");
    close(to_child_);
    close(from_child_);
    // Give the process a moment, then make sure it is gone.
    for (int i = 0; i < 50; ++i)
      {
        if (waitpid(pid_, nullptr, WNOHANG) == pid_)
          {
            pid_ = -1;
            return;
          }
        usleep(1000);
      }
    kill(pid_, SIGKILL);
    waitpid(pid_, nullptr, 0);
    pid_ = -1;
  }

  void
  solver::send(const std::string& s)
  {
    std::size_t off = 0;
    while (off < s.size())
      {
        ssize_t n = write(to_child_, s.data() + off, s.size() - off);
        if (n < 0)
          {
            if (errno == EINTR)
              continue;
            throw smt_process_error("solver process closed its input");
          }
        off += static_cast<std::size_t>(n);
      }
  }

  std::vector<std::string>
  solver::read_until_marker(unsigned timeout_ms, bool& timed_out)
  {
    using clock = std::chrono::steady_clock;
    auto deadline = clock::now() + std::chrono::milliseconds(timeout_ms);
    std::vector<std::string> lines;
    timed_out = false;
    for (;;)
      {
        std::size_t nl;
        while ((nl = pending_.find('\n')) != std::string::npos)
          {
            std::string line = pending_.substr(0, nl);
            pending_.erase(0, nl + 1);
            if (!line.empty() && line.back() == '\r')
              line.pop_back();
            if (line == marker)
              return lines;
            if (!line.empty())
              lines.push_back(line);
          }
        auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - clock::now()).count();
        if (left <= 0)
          {
            timed_out = true;
            return lines;
          }
        pollfd p{from_child_, POLLIN, 0};
        int r = poll(&p, 1, static_cast<int>(left));
        if (r < 0 && errno == EINTR)
          continue;
        if (r == 0)
          continue;
        char buf[4096];
        ssize_t n = read(from_child_, buf, sizeof buf);
        if (n <= 0)
          throw smt_process_error("solver process terminated");
        pending_.append(buf, static_cast<std::size_t>(n));
      }
  }

  std::vector<std::string>
  solver::round_trip(const std::string& cmds, unsigned timeout_ms, bool& timed_out)
  {
    if (pid_ < 0)
      start();
    if (timeout_ms != current_timeout_)
      {
        send("(set-option :timeout " + std::to_string(timeout_ms) + ")\n");
        current_timeout_ = timeout_ms;
      }
    send(cmds);
    send(std::string("(echo \"") + marker + "\")\n");
    // The solver's own timeout should fire first; the guard catches hangs.
    auto lines = read_until_marker(timeout_ms * 2 + 5000, timed_out);
    if (timed_out)
      {
        ++stats_.timeouts;
        ++stats_.restarts;
        kill(pid_, SIGKILL);
        waitpid(pid_, nullptr, 0);
        close(to_child_);
        close(from_child_);
        pid_ = -1;
        start();
      }
    return lines;
  }

  std::vector<std::string>
  solver::raw(const std::string& commands, unsigned timeout_ms)
  {
    std::lock_guard<std::mutex> lock(mtx_);
    bool to;
    return round_trip(commands, timeout_ms, to);
  }

  std::string
  solver::declarations(const fo_formula& f) const
  {
    std::string d;
    for (auto& v: free_vars(f))
      d += "(declare-const " + smt_symbol(v) + " Int)\n";
    return d;
  }

  std::optional<std::string>
  solver::cache_get(const std::string& k)
  {
    auto it = index_.find(k);
    if (it == index_.end())
      return std::nullopt;
    lru_.splice(lru_.begin(), lru_, it->second);
    return it->second->second;
  }

  void
  solver::cache_put(const std::string& k, const std::string& v)
  {
    if (cfg_.cache_capacity == 0)
      return;
    lru_.emplace_front(k, v);
    index_[k] = lru_.begin();
    while (lru_.size() > cfg_.cache_capacity)
      {
        index_.erase(lru_.back().first);
        lru_.pop_back();
      }
  }

  sat_result
  solver::check_sat(const fo_formula& f)
  {
    if (f.is_true())
      return sat_result::sat;
    if (f.is_false())
      return sat_result::unsat;
    std::lock_guard<std::mutex> lock(mtx_);
    ++stats_.queries;
    std::string text = smtlib(f);
    std::string key = "sat " + text;
    if (auto hit = cache_get(key))
      {
        ++stats_.cache_hits;
        return *hit == "sat" ? sat_result::sat
          : *hit == "unsat" ? sat_result::unsat : sat_result::unknown;
      }
    unsigned to = cfg_.timeout_ms;
    if (f.is_quantified())
      to *= cfg_.quantified_multiplier;
    std::string cmds = "(push 1)\n" + declarations(f) + "(assert " + text
      + ")\n(check-sat)\n(pop 1)\n";
    bool timed_out;
    auto lines = round_trip(cmds, to, timed_out);
    sat_result r = sat_result::unknown;
    std::string answer = "unknown";
    if (!timed_out)
      {
        for (auto& l: lines)
          {
            if (l == "sat" || l == "unsat" || l == "unknown")
              answer = l;
            else if (l.rfind("(error", 0) == 0)
              throw smt_process_error("solver error: " + l);
          }
        r = answer == "sat" ? sat_result::sat
          : answer == "unsat" ? sat_result::unsat : sat_result::unknown;
      }
    // Timeouts are not cached: a later call may use a larger budget.
    if (!timed_out && r != sat_result::unknown)
      cache_put(key, answer);
    return r;
  }

  truth
  solver::valid(const fo_formula& f)
  {
    switch (check_sat(fo_not(f)))
      {
      case sat_result::unsat: return truth::yes;
      case sat_result::sat: return truth::no;
      default: return truth::unknown;
      }
  }

  truth
  solver::entails(const fo_formula& a, const fo_formula& b)
  {
    switch (check_sat(fo_and(a, fo_not(b))))
      {
      case sat_result::unsat: return truth::yes;
      case sat_result::sat: return truth::no;
      default: return truth::unknown;
      }
  }

  std::optional<formula>
  solver::eliminate(const fo_formula& f)
  {
    if (!f.is_quantified())
      return f.leaf();
    std::lock_guard<std::mutex> lock(mtx_);
    ++stats_.queries;
    std::string text = smtlib(f);
    std::string key = "qe " + text;
    std::optional<std::string> answer = cache_get(key);
    if (answer)
      ++stats_.cache_hits;
    else
      {
        std::string cmds = "(push 1)\n" + declarations(f) + "(assert " + text
          + ")\n(apply (then qe simplify))\n(pop 1)\n";
        bool timed_out;
        auto lines = round_trip(cmds, cfg_.timeout_ms * cfg_.quantified_multiplier, timed_out);
        if (timed_out)
          return std::nullopt;
        std::string joined;
        for (auto& l: lines)
          joined += l + "\n";
        if (joined.find("(error") != std::string::npos)
          return std::nullopt;
        answer = joined;
        cache_put(key, joined);
      }
    std::vector<sexpr> es;
    try
      {
        es = parse_sexprs(*answer);
      }
    catch (const sexpr_error&)
      {
        return std::nullopt;
      }
    if (es.size() != 1 || es[0].is_atom || es[0].size() == 0 || !es[0][0].is("goals"))
      return std::nullopt;
    std::vector<formula> goals;
    for (std::size_t g = 1; g < es[0].size(); ++g)
      {
        const sexpr& goal = es[0][g];
        if (goal.is_atom || goal.size() == 0 || !goal[0].is("goal"))
          return std::nullopt;
        std::vector<formula> conj;
        for (std::size_t i = 1; i < goal.size(); ++i)
          {
            const sexpr& item = goal[i];
            if (item.is_atom && !item.atom.empty() && item.atom[0] == ':')
              {
                ++i;  // skip keyword value
                continue;
              }
            auto c = from_smtlib(item);
            if (!c)
              return std::nullopt;
            conj.push_back(*c);
          }
        goals.push_back(f_and(conj));
      }
    return f_or(goals);
  }

  std::optional<valuation>
  solver::model(const formula& f)
  {
    if (f.is_false())
      return std::nullopt;
    auto vars = free_vars(f);
    if (vars.empty())
      return f.is_true() ? std::optional<valuation>(valuation{}) : std::nullopt;
    std::lock_guard<std::mutex> lock(mtx_);
    ++stats_.queries;
    std::string names;
    for (auto& v: vars)
      names += " " + smt_symbol(v);
    std::string cmds = "(push 1)\n" + declarations(f) + "(assert " + smtlib(f)
      + ")\n(check-sat)\n(get-value (" + names + "))\n(pop 1)\n";
    bool timed_out;
    auto lines = round_trip(cmds, cfg_.timeout_ms, timed_out);
    if (timed_out || lines.empty() || lines[0] != "sat")
      return std::nullopt;
    std::string rest;
    for (std::size_t i = 1; i < lines.size(); ++i)
      rest += lines[i] + "\n";
    valuation v;
    try
      {
        auto es = parse_sexprs(rest);
        if (es.size() != 1 || es[0].is_atom)
          return std::nullopt;
        for (auto& pair: es[0].list)
          {
            if (pair.is_atom || pair.size() != 2 || !pair[0].is_atom)
              return std::nullopt;
            const sexpr& val = pair[1];
            std::int64_t k;
            if (val.is_atom)
              k = std::stoll(val.atom);
            else if (val.size() == 2 && val[0].is("-") && val[1].is_atom)
              k = -std::stoll(val[1].atom);
            else
              return std::nullopt;
            v[pair[0].atom] = k;
          }
      }
    catch (const std::exception&)
      {
        return std::nullopt;
      }
    return v;
  }
}
