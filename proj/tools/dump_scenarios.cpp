// Regenerates the checked-in scenario JSON files from the builders.
// Usage: dump_scenarios <output-dir>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "sltm/scenario.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: dump_scenarios <output-dir>\n";
    return 2;
  }
  std::filesystem::path dir(argv[1]);
  std::filesystem::create_directories(dir);
  for (const std::string& name : sltm::bundled_scenario_names()) {
    std::ofstream out(dir / (name + ".json"));
    out << sltm::scenario_to_json(sltm::bundled_scenario(name)) << "\n";
    std::cout << "wrote " << (dir / (name + ".json")).string() << "\n";
  }
  return 0;
}
