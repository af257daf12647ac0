// One line per acceptance criterion. Exits 0 once every criterion has run;
// failures are reported in the output, not through the exit status.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>

#include "scenarios.hpp"

int main(int argc, char** argv) {
  using namespace weyl::cli;
  ScenarioOptions o;
  std::string only;
  for (int k = 1; k < argc; ++k) {
    const std::string a = argv[k];
    if (a == "--threads" && k + 1 < argc)
      o.threads = std::atoi(argv[++k]);
    else if (a == "--only" && k + 1 < argc)
      only = argv[++k];
    else {
      std::cerr << "usage: acceptance [--threads N] [--only KEY]\n";
      return 2;
    }
  }
  int passed = 0, total = 0;
  for (const auto& s : scenarios()) {
    if (!only.empty() && s.key != only && std::to_string(s.id) != only) continue;
    const auto t0 = std::chrono::steady_clock::now();
    ScenarioResult r;
    try {
      r = s.run(o);
    } catch (const std::exception& e) {
      r.id = s.id;
      r.key = s.key;
      r.pass = false;
      r.summary = std::string("threw: ") + e.what();
    }
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    ++total;
    passed += r.pass;
    std::printf("%s #%d %s: %s [%.1fs]\n", r.pass ? "PASS" : "FAIL", s.id, s.key.c_str(), r.summary.c_str(), sec);
    std::fflush(stdout);
  }
  std::printf("ACCEPTANCE COMPLETE: %d/%d criteria passed\n", passed, total);
  return 0;
}
