#pragma once

#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "fmn/cli.hpp"
#include "fmn/workflows.hpp"

namespace fmn::test {

inline FabProfile oregon_profile() { return profile_from_json(preset_json("intel-oregon-paper")); }
inline HardwareSpec flagship() { return spec_from_json(preset_json("flagship")); }

inline double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

struct CliRun {
  int code;
  std::string out, err;
};

inline CliRun cli(std::vector<std::string> args) {
  args.insert(args.begin(), "forgetmenot");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

template <typename Fn>
Error expect_error(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e;
  }
  ADD_FAILURE() << "expected fmn::Error";
  return Error(Errc::invalid_argument, "none");
}

}  // namespace fmn::test

#include <cstdio>
#include <sys/wait.h>

namespace fmn::test {

/// Runs the built binary through the shell; stderr is discarded.
inline CliRun cli_process(const std::string& args) {
  const std::string cmd = std::string(FMN_CLI_PATH) + " " + args + " 2>/dev/null";
  CliRun r{-1, {}, {}};
  FILE* p = ::popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int status = ::pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

}  // namespace fmn::test
