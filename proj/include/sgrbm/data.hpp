#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sgrbm/rng.hpp"

namespace sgrbm {

struct DatasetMeta {
  std::string source;
  int rows = 0;  // image height, when items are images
  int cols = 0;
  std::string preprocessing;
};

struct Dataset {
  Matrix items;             // N x V; binary-type data lives in [0, 1]
  std::vector<int> labels;  // empty when unlabeled
  DatasetMeta meta;

  Eigen::Index size() const { return items.rows(); }
  Eigen::Index dim() const { return items.cols(); }
  bool has_labels() const { return !labels.empty(); }
};

/// Big-endian IDX loaders. Images: magic 0x00000803, u8 pixels scaled to
/// [0, 1] by /255, row-major flattening. Labels: magic 0x00000801.
/// Malformed input throws ParseError naming the byte offset.
Dataset load_idx(const std::string& images_path);
Dataset load_idx(const std::string& images_path, const std::string& labels_path);

void save_idx_images(const std::string& path, const Matrix& items, int rows, int cols);
void save_idx_labels(const std::string& path, const std::vector<int>& labels);

enum class Whitening { zca, assume_prewhitened };

struct PatchSpec {
  int patch_size = 14;
  int count = 100000;
  std::vector<std::string> image_paths;  // PGM P5 sources
  Whitening whitening = Whitening::zca;
};

/// Random patches with uniform top-left corners, flattened row-major. With
/// Whitening::zca the sampled patch matrix is centered, ZCA-whitened against
/// its own covariance, and per-dimension standardized.
Dataset extract_patches(const PatchSpec& spec, RngStream& rng);

/// Applies centering + ZCA + per-dimension standardization in place.
void zca_whiten(Matrix& items);

/// First `count` rows of a seeded shuffle, labels carried along.
Dataset subset(const Dataset& dataset, Eigen::Index count, std::uint64_t seed);

/// Seeded epoch shuffle; every item appears exactly once, the final partial
/// batch is kept.
std::vector<std::vector<Eigen::Index>> minibatch_indices(Eigen::Index n, Eigen::Index batch_size,
                                                         std::uint64_t epoch_seed);

class Minibatches {
 public:
  Minibatches(const Dataset& dataset, Eigen::Index batch_size, std::uint64_t epoch_seed);

  /// Next batch as a (rows x V) matrix, or nullopt at end of epoch.
  std::optional<Matrix> next();

 private:
  const Dataset& dataset_;
  std::vector<std::vector<Eigen::Index>> batches_;
  std::size_t cursor_ = 0;
};

Matrix gather_rows(const Matrix& items, const std::vector<Eigen::Index>& indices);

}  // namespace sgrbm
