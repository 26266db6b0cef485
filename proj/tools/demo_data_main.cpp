// Generates a self-contained demo corpus: a synthetic handwritten-digit set in
// IDX format plus a few smooth textures for the patch pipeline. Useful for
// exercising the CLI without external datasets.
#include <CLI11.hpp>
#include <filesystem>
#include <iostream>

#include "sgrbm/errors.hpp"
#include "sgrbm/synth.hpp"

namespace fs = std::filesystem;

int main(int argc, char** argv) {
  CLI::App app{"write synthetic demo datasets"};
  std::string out_dir = "data";
  int train_count = 10000;
  int test_count = 2000;
  int size = 14;
  int textures = 4;
  int texture_size = 256;
  std::uint64_t seed = 7;
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--train-count", train_count, "training images");
  app.add_option("--test-count", test_count, "test images");
  app.add_option("--size", size, "image side length");
  app.add_option("--textures", textures, "number of texture PGMs");
  app.add_option("--texture-size", texture_size, "texture side length");
  app.add_option("--seed", seed, "generator seed");
  CLI11_PARSE(app, argc, argv);

  try {
    fs::create_directories(out_dir);
    fs::create_directories(fs::path(out_dir) / "textures");

    const sgrbm::Dataset train = sgrbm::synthetic_digits(train_count, size, seed);
    sgrbm::save_idx_images((fs::path(out_dir) / "train-images.idx").string(), train.items, size,
                           size);
    sgrbm::save_idx_labels((fs::path(out_dir) / "train-labels.idx").string(), train.labels);

    const sgrbm::Dataset test =
        sgrbm::synthetic_digits(test_count, size, sgrbm::derive_seed(seed, {1}));
    sgrbm::save_idx_images((fs::path(out_dir) / "test-images.idx").string(), test.items, size,
                           size);
    sgrbm::save_idx_labels((fs::path(out_dir) / "test-labels.idx").string(), test.labels);

    for (int t = 0; t < textures; ++t) {
      const sgrbm::GrayImage image = sgrbm::synthetic_texture(
          texture_size, texture_size, sgrbm::derive_seed(seed, {2, static_cast<std::uint64_t>(t)}));
      sgrbm::write_pgm((fs::path(out_dir) / "textures" / ("texture" + std::to_string(t) + ".pgm"))
                           .string(),
                       image);
    }
    std::cout << "wrote " << train_count << " train / " << test_count << " test digits (" << size
              << "x" << size << ") and " << textures << " textures under " << out_dir << "\n";
  } catch (const sgrbm::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
