#include <fstream>
#include <iostream>
#include <sstream>
#include "pyidiom/syntax.hpp"
int main(int argc, char** argv) {
  int bad = 0;
  for (int i = 1; i < argc; ++i) {
    std::ifstream in(argv[i], std::ios::binary);
    std::stringstream ss; ss << in.rdbuf();
    try {
      auto u = pyidiom::parse(ss.str(), argv[i]);
      if (pyidiom::serialize(u) != u.text()) { std::cout << "ROUNDTRIP " << argv[i] << "\n"; ++bad; }
    } catch (const pyidiom::SyntaxError& e) { std::cout << "ERR " << argv[i] << ": " << e.what() << "\n"; ++bad; }
  }
  std::cout << bad << " failures\n";
}
