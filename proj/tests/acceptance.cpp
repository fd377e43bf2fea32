// Acceptance suite: one line per criterion, exit status 1 if any fails.
//
//   acceptance [--seed S] [--workers W] [--report FILE] [criterion|suite ...]
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <string>

#include "udag/parallel.hpp"
#include "udag/suites.hpp"

int main(int argc, char** argv) {
  udag::SuiteOptions options;
  options.workers = udag::default_workers();
  std::string report_path;
  std::set<int> ids;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--seed" && i + 1 < argc) {
      options.seed = std::stoull(argv[++i]);
    } else if (arg == "--workers" && i + 1 < argc) {
      options.workers = std::stoi(argv[++i]);
    } else if (arg == "--report" && i + 1 < argc) {
      report_path = argv[++i];
    } else if (!arg.empty() && std::isdigit(static_cast<unsigned char>(arg[0]))) {
      ids.insert(std::stoi(arg));
    } else {
      try {
        for (int id : udag::suite_criteria(arg)) ids.insert(id);
      } catch (const std::exception& e) {
        std::cerr << e.what() << '\n';
        return 2;
      }
    }
  }
  if (ids.empty()) {
    for (int id = 1; id <= udag::kCriterionCount; ++id) ids.insert(id);
  }

  udag::AcceptanceRunner runner(options);
  nlohmann::json reports = nlohmann::json::array();
  int failures = 0;
  for (int id : ids) {
    const udag::CriterionResult result = runner.run(id);
    std::cout << udag::summary_line(result) << std::endl;
    failures += result.pass ? 0 : 1;
    reports.push_back(result.report);
  }
  if (!report_path.empty()) std::ofstream(report_path) << reports.dump(2) << '\n';
  std::cout << (ids.size() - failures) << '/' << ids.size() << " criteria passed" << std::endl;
  return failures == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
