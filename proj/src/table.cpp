#include "plab/table.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "plab/errors.hpp"

namespace plab {

std::string format_number(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void DecayTable::add(int n, std::string statistic, double value, double noise_floor,
                     std::optional<double> bound) {
  if (!std::isfinite(value)) {
    throw Error("non-finite value for statistic '" + statistic + "' at n=" + std::to_string(n));
  }
  rows_.push_back({n, std::move(statistic), value, noise_floor, bound});
}

std::vector<DecayRow> DecayTable::series(const std::string& statistic) const {
  std::vector<DecayRow> out;
  std::ranges::copy_if(rows_, std::back_inserter(out),
                       [&](const DecayRow& r) { return r.statistic == statistic; });
  return out;
}

std::vector<std::string> DecayTable::statistics() const {
  std::vector<std::string> out;
  for (const DecayRow& r : rows_) {
    if (std::ranges::find(out, r.statistic) == out.end()) out.push_back(r.statistic);
  }
  return out;
}

std::optional<DecayRow> DecayTable::last(const std::string& statistic) const {
  for (auto it = rows_.rbegin(); it != rows_.rend(); ++it) {
    if (it->statistic == statistic) return *it;
  }
  return std::nullopt;
}

std::string DecayTable::to_csv() const {
  std::string out = "n,statistic,value,noise_floor,bound\n";
  for (const DecayRow& r : rows_) {
    out += std::to_string(r.n) + ',' + r.statistic + ',' + format_number(r.value) + ',' +
           format_number(r.noise_floor) + ',' + (r.bound ? format_number(*r.bound) : "") + '\n';
  }
  return out;
}

void DecayTable::write_csv(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << to_csv();
  if (!out) throw IoError("failed writing " + path.string());
}

DecayTable DecayTable::read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingArtifacts("missing " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "n,statistic,value,noise_floor,bound") {
    throw IoError(path.string() + ": not a decay table");
  }
  DecayTable table;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() == 4) f.emplace_back();
    if (f.size() != 5) throw IoError(path.string() + ": malformed row '" + line + "'");
    std::optional<double> bound;
    if (!f[4].empty()) bound = std::stod(f[4]);
    table.rows_.push_back({std::stoi(f[0]), f[1], std::stod(f[2]), std::stod(f[3]), bound});
  }
  return table;
}

}  // namespace plab
