#pragma once

// Reader for the whitespace-separated oracle tables in tests/fixtures.

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#ifndef ISTATE_FIXTURE_DIR
#error "ISTATE_FIXTURE_DIR must point at tests/fixtures"
#endif

namespace fixtures {

inline std::vector<std::vector<double>> load(const std::string& name) {
  const std::string path = std::string(ISTATE_FIXTURE_DIR) + "/" + name;
  std::ifstream in(path);
  if (!in) throw std::runtime_error("missing fixture " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::vector<double> r;
    for (std::string tok; ss >> tok;) r.push_back(std::stod(tok));
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace fixtures
