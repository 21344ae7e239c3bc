#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace plab {

struct DecayRow {
  int n;
  std::string statistic;
  double value;
  double noise_floor;
  std::optional<double> bound;
};

/// Per-depth scalar diagnostics. Serialized as CSV with header
/// n,statistic,value,noise_floor,bound (bound empty when absent) using
/// shortest round-trip number formatting, so equal tables give equal bytes.
class DecayTable {
 public:
  void add(int n, std::string statistic, double value, double noise_floor,
           std::optional<double> bound = std::nullopt);

  const std::vector<DecayRow>& rows() const { return rows_; }
  bool empty() const { return rows_.empty(); }

  /// Rows of one statistic in insertion order.
  std::vector<DecayRow> series(const std::string& statistic) const;
  /// Distinct statistic names in first-appearance order.
  std::vector<std::string> statistics() const;
  std::optional<DecayRow> last(const std::string& statistic) const;

  std::string to_csv() const;
  void write_csv(const std::filesystem::path& path) const;
  static DecayTable read_csv(const std::filesystem::path& path);

 private:
  std::vector<DecayRow> rows_;
};

std::string format_number(double v);

}  // namespace plab
