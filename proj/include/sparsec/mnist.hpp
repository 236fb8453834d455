#pragma once

#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sparsec/dataset.hpp"

namespace sparsec {

// IDX is the big-endian binary format the original MNIST files ship in:
// magic number, dimension sizes, then raw unsigned bytes.

namespace detail {

inline uint32_t read_be32(std::istream& in, const std::string& path) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (!in) throw std::runtime_error(path + ": truncated IDX header");
  return (uint32_t(b[0]) << 24) | (uint32_t(b[1]) << 16) | (uint32_t(b[2]) << 8) | uint32_t(b[3]);
}

}  // namespace detail

struct IdxImages {
  int count = 0;
  int rows = 0;
  int cols = 0;
  std::vector<uint8_t> pixels;  // count * rows * cols, row-major per image
};

inline IdxImages read_idx_images(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  const uint32_t magic = detail::read_be32(in, path);
  if (magic != 0x00000803u)
    throw std::runtime_error(path + ": bad magic number for IDX image file");
  IdxImages img;
  img.count = static_cast<int>(detail::read_be32(in, path));
  img.rows = static_cast<int>(detail::read_be32(in, path));
  img.cols = static_cast<int>(detail::read_be32(in, path));
  const size_t total = static_cast<size_t>(img.count) * img.rows * img.cols;
  img.pixels.resize(total);
  in.read(reinterpret_cast<char*>(img.pixels.data()), static_cast<std::streamsize>(total));
  if (!in) throw std::runtime_error(path + ": truncated IDX image data");
  return img;
}

inline std::vector<uint8_t> read_idx_labels(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  const uint32_t magic = detail::read_be32(in, path);
  if (magic != 0x00000801u)
    throw std::runtime_error(path + ": bad magic number for IDX label file");
  const auto count = detail::read_be32(in, path);
  std::vector<uint8_t> labels(count);
  in.read(reinterpret_cast<char*>(labels.data()), static_cast<std::streamsize>(count));
  if (!in) throw std::runtime_error(path + ": truncated IDX label data");
  return labels;
}

/// Extracts the 7-vs-9 binary subset from an MNIST IDX image/label pair:
/// digit 7 becomes class 1, digit 9 class 0, pixels scaled by 1/255.
inline Dataset mnist_to_dataset(const std::string& images_path, const std::string& labels_path) {
  const IdxImages img = read_idx_images(images_path);
  const std::vector<uint8_t> labels = read_idx_labels(labels_path);
  if (static_cast<int>(labels.size()) != img.count)
    throw std::runtime_error("IDX image/label count mismatch: " + std::to_string(img.count) + " images vs " +
                             std::to_string(labels.size()) + " labels");
  const int f = img.rows * img.cols;
  std::vector<int> keep;
  for (int i = 0; i < img.count; ++i)
    if (labels[static_cast<size_t>(i)] == 7 || labels[static_cast<size_t>(i)] == 9) keep.push_back(i);

  Dataset ds;
  ds.features.resize(static_cast<Eigen::Index>(keep.size()), f);
  ds.labels.resize(keep.size());
  ds.feature_names.reserve(static_cast<size_t>(f));
  for (int j = 0; j < f; ++j) ds.feature_names.push_back("px" + std::to_string(j));
  for (size_t r = 0; r < keep.size(); ++r) {
    const int i = keep[r];
    ds.labels[r] = labels[static_cast<size_t>(i)] == 7 ? 1 : 0;
    const size_t base = static_cast<size_t>(i) * static_cast<size_t>(f);
    for (int j = 0; j < f; ++j)
      ds.features(static_cast<Eigen::Index>(r), j) = img.pixels[base + static_cast<size_t>(j)] / 255.0;
  }
  return ds;
}

}  // namespace sparsec
