// Runs every online strategy on one generated scenario and prints the
// comparison table. Usage: demo_compare [generator] [seed]

#include <iostream>

#include <warmstart/harness.hpp>

int main(int argc, char** argv) {
  using namespace warmstart;
  try {
    RunConfig c;
    c.scenario.generator = argc > 1 ? argv[1] : "drifting_trajectories";
    c.scenario.seed = argc > 2 ? std::stoull(argv[2]) : 1;
    std::vector<CostLedger> ledgers;
    for (const auto& st : strategy_names()) {
      c.strategy = st;
      ledgers.push_back(cmd_simulate(c).ledger);
    }
    std::cout << cmd_report(ledgers).csv;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
