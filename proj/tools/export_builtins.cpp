// Writes every builtin scenario to <dir>/<name>.json.
#include <filesystem>
#include <iostream>

#include "neurocactus/builtins.hpp"
#include "neurocactus/io.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: export_builtins <dir>\n";
    return 2;
  }
  std::filesystem::create_directories(argv[1]);
  for (const auto& s : neurocactus::builtin_scenarios()) {
    const auto path = std::filesystem::path(argv[1]) / (s.name + ".json");
    neurocactus::write_text_file(path.string(), neurocactus::write_scenario(s));
    std::cout << path.string() << '\n';
  }
  return 0;
}
