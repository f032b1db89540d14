#pragma once

#include "sacrc/model.hpp"
#include "sacrc/random.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace sacrc::testing {

inline Matrix gaussian(Index rows, Index cols, CounterRng& rng) {
  Matrix out(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) out(i, j) = rng.normal();
  }
  return out;
}

inline Vector gaussian(Index n, CounterRng& rng) { return gaussian(n, 1, rng).col(0); }

inline std::vector<std::string> class_names(std::size_t count) {
  std::vector<std::string> out;
  for (std::size_t c = 0; c < count; ++c) out.push_back("class" + std::to_string(c));
  return out;
}

/// Unit-norm Gaussian atoms in m dimensions, class sizes as given.
inline Dictionary random_dictionary(Index m, const std::vector<Index>& sizes, CounterRng& rng) {
  Index total = 0;
  for (const Index s : sizes) total += s;
  return Dictionary(gaussian(m, total, rng), ClassPartition(class_names(sizes.size()), sizes),
                    Normalize::kYes);
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  const std::filesystem::path dir = std::filesystem::temp_directory_path() / ("sacrc_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

}  // namespace sacrc::testing
