// Runs the command-line tool and captures its exit status and both
// output streams.

#pragma once

#include "support.hh"

#include <array>
#include <cstdio>
#include <filesystem>
#include <sys/wait.h>
#include <unistd.h>

namespace rpmon::test
{
  struct result
  {
    int status = -1;
    std::string out, err;
  };

  inline result
  run(const std::string& args)
  {
    auto err_path = std::filesystem::temp_directory_path()
      / ("rpmon-cli-" + std::to_string(::getpid()) + ".err");
    std::string cmd = std::string(RPMON_CLI) + " " + args + " 2>" + err_path.string();
    result r;
    FILE* p = ::popen(cmd.c_str(), "r");
    if (!p)
      throw std::runtime_error("cannot run " + cmd);
    std::array<char, 4096> buf;
    while (std::size_t n = std::fread(buf.data(), 1, buf.size(), p))
      r.out.append(buf.data(), n);
    int st = ::pclose(p);
    r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    r.err = test::slurp(err_path.string());
    std::filesystem::remove(err_path);
    return r;
  }
}
