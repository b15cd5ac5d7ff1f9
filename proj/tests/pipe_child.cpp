// Test helper speaking the pipe controller protocol.
//   pipe_child zero             answers 0
//   pipe_child garbage          answers a malformed line
//   pipe_child silent           never answers
//   pipe_child exit             exits before answering
//   pipe_child kernel <csv>     backstepping feedback from a dumped kernel
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

namespace {

std::vector<double> load_feedback_row(const std::string& path) {
  std::ifstream in(path);
  std::string header, line;
  std::getline(in, header);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  std::vector<double> k;
  if (header == "x,k") {
    // k(1 - y) weights u(y)
    for (auto it = rows.rbegin(); it != rows.rend(); ++it) k.push_back((*it)[1]);
  } else {
    // x,y,k lower triangle; the last nx rows are x = 1
    std::size_t nx = 0;
    while (nx * (nx + 1) / 2 < rows.size()) ++nx;
    for (std::size_t r = rows.size() - nx; r < rows.size(); ++r) k.push_back(rows[r][2]);
  }
  return k;
}

double trapezoid(const std::vector<double>& w, const std::vector<double>& u) {
  const std::size_t n = u.size() - 1;
  double s = 0.5 * (w[0] * u[0] + w[n] * u[n]);
  for (std::size_t j = 1; j < n; ++j) s += w[j] * u[j];
  return s * (1.0 / static_cast<double>(n));
}

}  // namespace

int main(int argc, char** argv) {
  std::ios::sync_with_stdio(false);
  const std::string mode = argc > 1 ? argv[1] : "zero";
  std::vector<double> weights;
  if (mode == "kernel") {
    if (argc < 3) return 2;
    weights = load_feedback_row(argv[2]);
  }
  if (mode == "exit") return 0;
  std::string line;
  while (std::getline(std::cin, line)) {
    if (mode == "silent") {
      std::this_thread::sleep_for(std::chrono::seconds(60));
      return 0;
    }
    if (mode == "garbage") {
      std::cout << "not json" << std::endl;
      continue;
    }
    double action = 0.0;
    if (mode == "kernel") {
      const auto msg = nlohmann::json::parse(line);
      const auto obs = msg.at("obs").get<std::vector<double>>();
      action = trapezoid(weights, obs);
    }
    std::cout << nlohmann::json{{"action", action}}.dump() << std::endl;
  }
  return 0;
}
