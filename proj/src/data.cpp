#include "sgrbm/data.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "sgrbm/errors.hpp"
#include "sgrbm/image.hpp"

namespace sgrbm {

namespace {

constexpr std::uint32_t kImagesMagic = 0x00000803;
constexpr std::uint32_t kLabelsMagic = 0x00000801;

std::uint32_t read_u32_be(std::ifstream& in, const std::string& path, std::size_t offset) {
  unsigned char bytes[4];
  in.read(reinterpret_cast<char*>(bytes), 4);
  if (in.gcount() != 4) {
    throw ParseError(path + ": truncated file at offset " + std::to_string(offset) +
                     " (wanted 4 bytes)");
  }
  return (std::uint32_t{bytes[0]} << 24) | (std::uint32_t{bytes[1]} << 16) |
         (std::uint32_t{bytes[2]} << 8) | std::uint32_t{bytes[3]};
}

void write_u32_be(std::ofstream& out, std::uint32_t value) {
  const unsigned char bytes[4] = {
      static_cast<unsigned char>(value >> 24), static_cast<unsigned char>(value >> 16),
      static_cast<unsigned char>(value >> 8), static_cast<unsigned char>(value)};
  out.write(reinterpret_cast<const char*>(bytes), 4);
}

std::string hex32(std::uint32_t value) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "0x%08x", value);
  return buf;
}

std::vector<std::uint8_t> read_payload(std::ifstream& in, const std::string& path,
                                       std::size_t offset, std::size_t count) {
  std::vector<std::uint8_t> bytes(count);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(count));
  if (static_cast<std::size_t>(in.gcount()) != count) {
    throw ParseError(path + ": truncated data at offset " +
                     std::to_string(offset + static_cast<std::size_t>(in.gcount())) +
                     " (wanted " + std::to_string(count) + " bytes from offset " +
                     std::to_string(offset) + ")");
  }
  return bytes;
}

std::vector<int> load_idx_labels(const std::string& path, std::size_t expected_count) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open file");
  const std::uint32_t magic = read_u32_be(in, path, 0);
  if (magic != kLabelsMagic) {
    throw ParseError(path + ": bad magic " + hex32(magic) + " at offset 0, expected " +
                     hex32(kLabelsMagic));
  }
  const std::uint32_t n = read_u32_be(in, path, 4);
  if (expected_count != 0 && n != expected_count) {
    throw ParseError(path + ": label count " + std::to_string(n) + " does not match image count " +
                     std::to_string(expected_count));
  }
  const auto bytes = read_payload(in, path, 8, n);
  std::vector<int> labels(bytes.begin(), bytes.end());
  return labels;
}

}  // namespace

Dataset load_idx(const std::string& images_path) {
  std::ifstream in(images_path, std::ios::binary);
  if (!in) throw ParseError(images_path + ": cannot open file");
  const std::uint32_t magic = read_u32_be(in, images_path, 0);
  if (magic != kImagesMagic) {
    throw ParseError(images_path + ": bad magic " + hex32(magic) + " at offset 0, expected " +
                     hex32(kImagesMagic));
  }
  const std::uint32_t n = read_u32_be(in, images_path, 4);
  const std::uint32_t rows = read_u32_be(in, images_path, 8);
  const std::uint32_t cols = read_u32_be(in, images_path, 12);
  const std::size_t dim = static_cast<std::size_t>(rows) * cols;
  const auto bytes = read_payload(in, images_path, 16, static_cast<std::size_t>(n) * dim);

  Dataset dataset;
  dataset.items.resize(n, static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t p = 0; p < dim; ++p) {
      dataset.items(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(p)) =
          static_cast<double>(bytes[i * dim + p]) / 255.0;
    }
  }
  dataset.meta.source = images_path;
  dataset.meta.rows = static_cast<int>(rows);
  dataset.meta.cols = static_cast<int>(cols);
  dataset.meta.preprocessing = "u8/255";
  return dataset;
}

Dataset load_idx(const std::string& images_path, const std::string& labels_path) {
  Dataset dataset = load_idx(images_path);
  dataset.labels = load_idx_labels(labels_path, static_cast<std::size_t>(dataset.size()));
  return dataset;
}

void save_idx_images(const std::string& path, const Matrix& items, int rows, int cols) {
  if (rows <= 0 || cols <= 0 || static_cast<Eigen::Index>(rows) * cols != items.cols()) {
    throw ParameterError("save_idx_images: rows*cols must equal item width");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError(path + ": cannot open file for writing");
  write_u32_be(out, kImagesMagic);
  write_u32_be(out, static_cast<std::uint32_t>(items.rows()));
  write_u32_be(out, static_cast<std::uint32_t>(rows));
  write_u32_be(out, static_cast<std::uint32_t>(cols));
  std::vector<std::uint8_t> buffer(static_cast<std::size_t>(items.cols()));
  for (Eigen::Index i = 0; i < items.rows(); ++i) {
    for (Eigen::Index p = 0; p < items.cols(); ++p) {
      const double v = std::clamp(items(i, p), 0.0, 1.0);
      buffer[static_cast<std::size_t>(p)] = static_cast<std::uint8_t>(std::lround(v * 255.0));
    }
    out.write(reinterpret_cast<const char*>(buffer.data()),
              static_cast<std::streamsize>(buffer.size()));
  }
  if (!out) throw ParseError(path + ": write failed");
}

void save_idx_labels(const std::string& path, const std::vector<int>& labels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError(path + ": cannot open file for writing");
  write_u32_be(out, kLabelsMagic);
  write_u32_be(out, static_cast<std::uint32_t>(labels.size()));
  for (int label : labels) {
    if (label < 0 || label > 255) throw ParameterError("save_idx_labels: label out of u8 range");
    const auto byte = static_cast<unsigned char>(label);
    out.write(reinterpret_cast<const char*>(&byte), 1);
  }
  if (!out) throw ParseError(path + ": write failed");
}

void zca_whiten(Matrix& items) {
  const auto n = items.rows();
  const auto dim = items.cols();
  if (n < 2) throw ParameterError("zca_whiten: need at least two items");

  const Vector mean = items.colwise().mean().transpose();
  items.rowwise() -= mean.transpose();

  const Matrix cov = (items.transpose() * items) / static_cast<double>(n);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(cov);
  if (solver.info() != Eigen::Success) throw NumericError("zca_whiten: eigendecomposition failed");
  const Vector eigenvalues = solver.eigenvalues().cwiseMax(0.0);
  const double eps = 1e-8 * eigenvalues.mean() + 1e-12;
  const Vector inv_sqrt = (eigenvalues.array() + eps).rsqrt();
  const Matrix transform =
      solver.eigenvectors() * inv_sqrt.asDiagonal() * solver.eigenvectors().transpose();
  items = items * transform;

  for (Eigen::Index p = 0; p < dim; ++p) {
    const double sd = std::sqrt(items.col(p).squaredNorm() / static_cast<double>(n));
    if (sd > 0.0) items.col(p) /= sd;
  }
}

Dataset extract_patches(const PatchSpec& spec, RngStream& rng) {
  if (spec.count < 1) throw ParameterError("extract_patches: count must be positive");
  if (spec.patch_size < 1) throw ParameterError("extract_patches: patch_size must be positive");
  if (spec.image_paths.empty()) throw ParameterError("extract_patches: no source images");

  std::vector<GrayImage> images;
  images.reserve(spec.image_paths.size());
  for (const auto& path : spec.image_paths) {
    GrayImage image = read_pgm(path);
    if (image.width < spec.patch_size || image.height < spec.patch_size) {
      throw ParameterError(path + ": patch size " + std::to_string(spec.patch_size) +
                           " exceeds image " + std::to_string(image.width) + "x" +
                           std::to_string(image.height));
    }
    images.push_back(std::move(image));
  }

  const int s = spec.patch_size;
  Dataset dataset;
  dataset.items.resize(spec.count, static_cast<Eigen::Index>(s) * s);
  for (int p = 0; p < spec.count; ++p) {
    const auto& image = images[rng.below(images.size())];
    const int top = static_cast<int>(rng.below(static_cast<std::uint64_t>(image.height - s + 1)));
    const int left = static_cast<int>(rng.below(static_cast<std::uint64_t>(image.width - s + 1)));
    for (int r = 0; r < s; ++r) {
      for (int c = 0; c < s; ++c) {
        dataset.items(p, r * s + c) = static_cast<double>(image.at(top + r, left + c)) / 255.0;
      }
    }
  }
  dataset.meta.source = spec.image_paths.front() +
                        (spec.image_paths.size() > 1
                             ? " (+" + std::to_string(spec.image_paths.size() - 1) + " more)"
                             : "");
  dataset.meta.rows = s;
  dataset.meta.cols = s;
  if (spec.whitening == Whitening::zca) {
    zca_whiten(dataset.items);
    dataset.meta.preprocessing = "zca+standardize";
  } else {
    dataset.meta.preprocessing = "assume-prewhitened";
  }
  return dataset;
}

Dataset subset(const Dataset& dataset, Eigen::Index count, std::uint64_t seed) {
  if (count < 1 || count > dataset.size()) {
    throw ParameterError("subset: count " + std::to_string(count) + " outside [1, " +
                         std::to_string(dataset.size()) + "]");
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(dataset.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  RngStream rng = RngStream::derive(seed, {0});
  for (std::size_t i = order.size() - 1; i > 0; --i) {
    std::swap(order[i], order[rng.below(i + 1)]);
  }

  Dataset out;
  out.items.resize(count, dataset.dim());
  if (dataset.has_labels()) out.labels.resize(static_cast<std::size_t>(count));
  for (Eigen::Index i = 0; i < count; ++i) {
    out.items.row(i) = dataset.items.row(order[static_cast<std::size_t>(i)]);
    if (dataset.has_labels()) {
      out.labels[static_cast<std::size_t>(i)] =
          dataset.labels[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
    }
  }
  out.meta = dataset.meta;
  return out;
}

std::vector<std::vector<Eigen::Index>> minibatch_indices(Eigen::Index n, Eigen::Index batch_size,
                                                         std::uint64_t epoch_seed) {
  if (n < 1) throw ParameterError("minibatch_indices: empty dataset");
  if (batch_size < 1) throw ParameterError("minibatch_indices: batch_size must be >= 1");

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  RngStream rng = RngStream::derive(epoch_seed, {0});
  for (std::size_t i = order.size() - 1; i > 0; --i) {
    std::swap(order[i], order[rng.below(i + 1)]);
  }

  std::vector<std::vector<Eigen::Index>> batches;
  for (Eigen::Index start = 0; start < n; start += batch_size) {
    const Eigen::Index end = std::min(start + batch_size, n);
    batches.emplace_back(order.begin() + start, order.begin() + end);
  }
  return batches;
}

Matrix gather_rows(const Matrix& items, const std::vector<Eigen::Index>& indices) {
  Matrix out(static_cast<Eigen::Index>(indices.size()), items.cols());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = items.row(indices[i]);
  }
  return out;
}

Minibatches::Minibatches(const Dataset& dataset, Eigen::Index batch_size, std::uint64_t epoch_seed)
    : dataset_(dataset), batches_(minibatch_indices(dataset.size(), batch_size, epoch_seed)) {}

std::optional<Matrix> Minibatches::next() {
  if (cursor_ >= batches_.size()) return std::nullopt;
  return gather_rows(dataset_.items, batches_[cursor_++]);
}

}  // namespace sgrbm
