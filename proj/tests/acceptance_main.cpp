#include <cstdlib>
#include <iostream>
#include <string>
#include <thread>

#include "lrp/acceptance.hpp"

int main(int argc, char** argv) {
  lrp::AcceptanceOptions options;
  options.workers = std::max(1u, std::thread::hardware_concurrency());
  for (int i = 1; i < argc; ++i) options.only.push_back(std::atoi(argv[i]));
  int failed = 0;
  lrp::run_acceptance(options, [&](const lrp::CriterionResult& r) {
    std::cout << lrp::format_result(r) << std::endl;
    failed += !r.pass;
  });
  std::cout << (failed ? "acceptance: " + std::to_string(failed) + " failed" : std::string("acceptance: all passed"))
            << std::endl;
  return failed ? 1 : 0;
}
