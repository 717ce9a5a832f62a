// Minimal SMT-LIB2 front end over libz3: reads commands from stdin and
// answers each top-level command on stdout.  Command-line arguments are
// accepted and ignored so that it can stand in for "z3 -in -smt2".

#include <z3.h>

#include <iostream>
#include <string>

int
main()
{
  Z3_config cfg = Z3_mk_config();
  Z3_context ctx = Z3_mk_context(cfg);
  Z3_del_config(cfg);
  // report errors in-band instead of aborting
  Z3_set_error_handler(ctx, [](Z3_context, Z3_error_code) {});

  std::string buf;
  int depth = 0;
  bool in_string = false;
  bool in_quoted = false;
  char c;
  while (std::cin.get(c))
    {
      if (depth == 0 && !in_string && c == ';')
        {
          std::string rest;
          std::getline(std::cin, rest);
          continue;
        }
      if (depth == 0 && c != '(')
        continue;
      buf += c;
      if (in_string)
        {
          if (c == '"')
            in_string = false;
          continue;
        }
      if (in_quoted)
        {
          if (c == '|')
            in_quoted = false;
          continue;
        }
      if (c == '"')
        in_string = true;
      else if (c == '|')
        in_quoted = true;
      else if (c == '(')
        ++depth;
      else if (c == ')' && --depth == 0)
        {
          if (buf == "(exit)")
            break;
          std::string r = Z3_eval_smtlib2_string(ctx, buf.c_str());
          if (Z3_get_error_code(ctx) != Z3_OK)
            {
              // a timed out or interrupted check answers unknown like z3 does
              std::string msg = Z3_get_error_msg(ctx, Z3_get_error_code(ctx));
              if (buf.rfind("(check-sat", 0) == 0)
                r = "unknown\n";
              else
                r = "(error \"" + msg + "\")\n";
            }
          std::cout << r << std::flush;
          buf.clear();
        }
    }
  Z3_del_context(ctx);
  return 0;
}
