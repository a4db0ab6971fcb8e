#include "corpus.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "ttscorpus/audio/wav.hpp"

namespace ttscorpus::fixtures {

std::vector<CorpusBook> default_corpus(std::uint64_t seed) {
  std::vector<CorpusBook> books;
  books.push_back({"book_one", {"narrator_a"}, {.sentences = 10, .seed = seed, .narrators = {"narrator_a"}}});
  books.push_back({"book_two",
                   {"narrator_b"},
                   {.sentences = 12, .seed = seed + 1, .narrators = {"narrator_b"}, .guest_every = 4,
                    .guest = "guest_c"}});
  books.push_back({"book_three",
                   {"narrator_a"},
                   {.sentences = 8, .seed = seed + 2, .narrators = {"narrator_a"}, .music_tail_s = 3.0}});
  return books;
}

void write_corpus(const std::filesystem::path& dir, const std::vector<CorpusBook>& books) {
  std::filesystem::create_directories(dir);
  for (const auto& b : books) {
    const auto book = make_book(b.options);
    audio::write_wav16(dir / (b.stem + ".wav"), book.audio);
    std::ofstream(dir / (b.stem + ".script.json"))
        << providers::ScriptLibrary::script_to_json(book.script).dump(1) << "\n";
    if (!b.narrators.empty()) {
      std::ofstream(dir / (b.stem + ".meta.json"))
          << nlohmann::json{{"narrators", b.narrators}, {"title", b.stem}}.dump(1) << "\n";
    }
  }
}

std::string mock_config_json(const std::filesystem::path& input, const std::filesystem::path& output,
                             int workers, std::uint64_t seed) {
  nlohmann::json j = {{"input_dir", input.string()},
                      {"output_dir", output.string()},
                      {"worker_count", workers},
                      {"random_seed", seed},
                      {"providers", {{"mode", "mock"}}}};
  return j.dump(2) + "\n";
}

}  // namespace ttscorpus::fixtures
