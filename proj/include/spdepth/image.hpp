#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace spdepth {

/// Row-major H x W grid of per-pixel values.
template <class T>
class Image {
 public:
  Image() = default;
  Image(std::size_t height, std::size_t width, const T& fill = T{})
      : height_(height), width_(width), data_(height * width, fill) {}

  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T& at(std::size_t row, std::size_t col) { return data_[index(row, col)]; }
  const T& at(std::size_t row, std::size_t col) const {
    return data_[index(row, col)];
  }
  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  template <class U>
  bool same_shape(const Image<U>& other) const {
    return height_ == other.height() && width_ == other.width();
  }

  bool operator==(const Image&) const = default;

 private:
  std::size_t index(std::size_t row, std::size_t col) const {
    if (row >= height_ || col >= width_)
      throw std::out_of_range("Image: pixel index out of range");
    return row * width_ + col;
  }

  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<T> data_;
};

}  // namespace spdepth
