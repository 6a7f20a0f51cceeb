// Acceptance suite: one PASS/FAIL line per criterion.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <string>

#include "tubeforge/acceptance.hpp"

using namespace tubeforge;

namespace {

struct Capture {
  std::string text;
  int status = -1;
};

Capture run_selftest(const std::string& threads) {
  Capture c;
  const std::string cmd = "TUBEFORGE_THREADS=" + threads + " '" + TUBEFORGE_CLI_PATH + "' selftest";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return c;
  char buffer[4096];
  while (std::size_t n = std::fread(buffer, 1, sizeof buffer, pipe)) c.text.append(buffer, n);
  c.status = pclose(pipe);
  return c;
}

acceptance::CriterionResult determinism() {
  acceptance::CriterionResult r{11, "Determinism", false, {}, 0.0};
  const auto start = std::chrono::steady_clock::now();
  const Capture a1 = run_selftest("1");
  const Capture a2 = run_selftest("1");
  const Capture b1 = run_selftest("8");
  const Capture b2 = run_selftest("8");
  const bool produced = !a1.text.empty() && a1.text.find("1.") != std::string::npos;
  const bool same = a1.text == a2.text && b1.text == b2.text && a1.text == b1.text;
  r.passed = produced && same;
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  r.detail = std::string("selftest reports ") + (same ? "byte-identical" : "DIFFER") +
             " across 2 runs each with TUBEFORGE_THREADS=1 and 8 (" +
             std::to_string(a1.text.size()) + " bytes)";
  return r;
}

}  // namespace

int main() {
  auto results = acceptance::run_all();
  results.push_back(determinism());
  acceptance::write_report(std::cout, results, true);
  const bool ok = acceptance::all_passed(results);
  int failed = 0;
  for (const auto& r : results) failed += r.passed ? 0 : 1;
  std::cout << (ok ? "ALL PASS" : std::to_string(failed) + " criterion(s) FAILED") << '\n';
  return ok ? 0 : 1;
}
