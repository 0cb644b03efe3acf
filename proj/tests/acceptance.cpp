// Acceptance suite: runs every verification criterion at its stated size and
// tolerance, printing one line per criterion. Exit code 0 only if nothing
// failed (skips are not failures, but nothing is skipped at full scale).

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>

#include "forgetting/cli.hpp"
#include "forgetting/montecarlo.hpp"

int main(int argc, char** argv) {
  unsigned jobs = 0;
  std::string out_path = "acceptance_report.json";
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--jobs" && i + 1 < argc) {
      jobs = static_cast<unsigned>(std::stoul(argv[++i]));
    } else if (arg == "--out" && i + 1 < argc) {
      out_path = argv[++i];
    } else {
      std::cerr << "usage: acceptance [--jobs N] [--out report.json]\n";
      return 1;
    }
  }

  try {
    const forgetting::VerifyReport report =
        forgetting::verify("all", "full", jobs);
    for (const auto& check : report.checks) {
      std::cout << forgetting::cli::report_line(check) << '\n';
      std::cout.flush();
    }
    std::ofstream out(out_path);
    out << forgetting::cli::report_json(report) << '\n';

    int failed = 0;
    for (const auto& check : report.checks) {
      if (check.status == forgetting::CheckStatus::kFail) ++failed;
    }
    if (failed > 0) {
      std::cout << failed << " criterion(s) failed\n";
      return 1;
    }
    std::cout << "all criteria passed\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "acceptance suite aborted: " << e.what() << '\n';
    return 1;
  }
}
