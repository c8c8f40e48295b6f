#pragma once

#include <unistd.h>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "gnnrisk/error.hpp"
#include "gnnrisk/rng.hpp"
#include "gnnrisk/types.hpp"

// Passes when `stmt` throws gnnrisk::Error of the given kind.
#define EXPECT_ERROR_KIND(stmt, expected_kind)                                   \
  do {                                                                           \
    bool thrown_ = false;                                                        \
    try {                                                                        \
      stmt;                                                                      \
    } catch (const ::gnnrisk::Error& e_) {                                       \
      thrown_ = true;                                                            \
      EXPECT_EQ(e_.kind(), expected_kind) << e_.what();                          \
    }                                                                            \
    EXPECT_TRUE(thrown_) << "expected " << ::gnnrisk::to_string(expected_kind); \
  } while (false)

namespace gnnrisk::testing {

inline Matrix random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
  }
  return m;
}

inline Matrix random_symmetric(Rng& rng, Eigen::Index d) {
  const Matrix a = random_matrix(rng, d, d);
  return 0.5 * (a + a.transpose());
}

inline Vector random_vector(Rng& rng, Eigen::Index d) {
  Vector v(d);
  for (Eigen::Index i = 0; i < d; ++i) v[i] = rng.normal();
  return v;
}

// Plain Gaussian elimination with partial pivoting on (A^T A + lambda I) x = A^T b.
// Written against raw vectors so it shares nothing with the library solver.
inline std::vector<double> normal_equations_oracle(const Matrix& a, const Vector& b, double lambda) {
  const std::size_t n = static_cast<std::size_t>(a.rows());
  const std::size_t d = static_cast<std::size_t>(a.cols());
  std::vector<std::vector<double>> m(d, std::vector<double>(d + 1, 0.0));
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      double s = 0.0;
      for (std::size_t r = 0; r < n; ++r) {
        s += a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i)) *
             a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j));
      }
      m[i][j] = s + (i == j ? lambda : 0.0);
    }
    double s = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      s += a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i)) *
           b[static_cast<Eigen::Index>(r)];
    }
    m[i][d] = s;
  }
  for (std::size_t col = 0; col < d; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < d; ++r) {
      if (std::abs(m[r][col]) > std::abs(m[pivot][col])) pivot = r;
    }
    std::swap(m[col], m[pivot]);
    for (std::size_t r = col + 1; r < d; ++r) {
      const double f = m[r][col] / m[col][col];
      for (std::size_t c = col; c <= d; ++c) m[r][c] -= f * m[col][c];
    }
  }
  std::vector<double> x(d, 0.0);
  for (std::size_t i = d; i-- > 0;) {
    double s = m[i][d];
    for (std::size_t j = i + 1; j < d; ++j) s -= m[i][j] * x[j];
    x[i] = s / m[i][i];
  }
  return x;
}

// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("gnnrisk-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace gnnrisk::testing
