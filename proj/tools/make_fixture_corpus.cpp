#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "corpus.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Writes a small synthetic corpus with scripts and a mock-mode config"};
  std::string dir;
  std::uint64_t seed = 7;
  app.add_option("dir", dir, "Target directory")->required();
  app.add_option("--seed", seed, "Fixture seed")->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  namespace fs = std::filesystem;
  const fs::path root = fs::absolute(dir);
  ttscorpus::fixtures::write_corpus(root / "input", ttscorpus::fixtures::default_corpus(seed));
  std::ofstream(root / "config.json")
      << ttscorpus::fixtures::mock_config_json(root / "input", root / "output");
  std::cout << "wrote " << (root / "input").string() << " and " << (root / "config.json").string()
            << "\n";
  return 0;
}
