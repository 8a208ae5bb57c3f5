#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace surfelgrad {

struct Resolution {
  int rows = 0;
  int cols = 0;

  std::size_t count() const { return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols); }
  friend bool operator==(const Resolution&, const Resolution&) = default;
};

// Dense row-major rows x cols grid.
template <typename T>
class Grid {
 public:
  Grid() = default;
  explicit Grid(Resolution res, T fill = T{}) : res_(res), data_(res.count(), fill) {}
  Grid(Resolution res, std::vector<T> data) : res_(res), data_(std::move(data)) {}

  Resolution resolution() const { return res_; }
  int rows() const { return res_.rows; }
  int cols() const { return res_.cols; }
  std::size_t size() const { return data_.size(); }

  T& operator()(int r, int c) { return data_[index(r, c)]; }
  const T& operator()(int r, int c) const { return data_[index(r, c)]; }
  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  std::span<T> values() { return data_; }
  std::span<const T> values() const { return data_; }
  std::vector<T>& storage() { return data_; }
  const std::vector<T>& storage() const { return data_; }

  std::size_t index(int r, int c) const {
    return static_cast<std::size_t>(r) * static_cast<std::size_t>(res_.cols) + static_cast<std::size_t>(c);
  }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  Resolution res_;
  std::vector<T> data_;
};

using Mask = Grid<unsigned char>;

}  // namespace surfelgrad
