// Seeds a replay store from JSON Lines of {idiom, original_code, response},
// keyed as the default-model evaluate run would key them.
#include <fstream>
#include <iostream>

#include "json.hpp"
#include "pyidiom/llm.hpp"

int main(int argc, char** argv) {
  if (argc != 3) {
    std::cerr << "usage: replay_import <responses.jsonl> <replay-dir>\n";
    return 2;
  }
  std::ifstream in(argv[1]);
  if (!in) {
    std::cerr << "cannot read " << argv[1] << "\n";
    return 1;
  }
  pyidiom::llm::ReplayStore store(argv[2]);
  std::size_t stored = 0;
  for (std::string line; std::getline(in, line);) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto obj = nlohmann::json::parse(line);
    const auto idiom = pyidiom::parse_idiom(obj.at("idiom").get<std::string>());
    if (!idiom) {
      std::cerr << "unknown idiom in: " << line << "\n";
      return 1;
    }
    pyidiom::llm::ChatRequest request;
    request.prompt = pyidiom::llm::build_prompt(*idiom, obj.at("original_code").get<std::string>());
    store.store(request, obj.at("response").get<std::string>());
    ++stored;
  }
  std::cout << stored << " entries\n";
  return 0;
}
