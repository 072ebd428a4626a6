// dataset.hpp - labelled 8-bit image sets, stratified subsets, IDX files and
// the synthetic desk-scale task.
#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace colpack::training {

struct Sample {
  std::vector<std::uint8_t> pixels;  // channels x height x width
  std::uint32_t label = 0;
};

struct Dataset {
  std::size_t channels = 1;
  std::size_t height = 1;
  std::size_t width = 1;
  std::size_t num_classes = 0;
  std::vector<Sample> samples;

  std::size_t size() const noexcept { return samples.size(); }
  std::size_t pixels_per_sample() const noexcept { return channels * height * width; }
  std::vector<std::size_t> class_counts() const;
  // Throws DataError on a malformed sample.
  void validate() const;
};

struct DataSplit {
  Dataset train;
  Dataset test;
};

// Class-stratified random subset holding round(fraction * n_c) samples of
// every class c, in original order. Throws ConfigError if a class would end
// up empty or fraction is outside (0, 1].
Dataset dataset_fraction(const Dataset& data, double fraction, std::uint64_t seed);

// MNIST-style IDX pair: images magic 0x00000803, labels magic 0x00000801.
Dataset load_idx(const std::filesystem::path& images, const std::filesystem::path& labels);

struct SyntheticSpec {
  std::size_t num_classes = 10;
  std::size_t channels = 8;
  std::size_t height = 8;
  std::size_t width = 8;
  std::size_t train_per_class = 100;
  std::size_t test_per_class = 50;
  double noise = 60.0;        // pixel noise standard deviation
  std::uint64_t seed = 1;
};

// Each class owns a random prototype image; samples are the prototype moved
// by up to one pixel in each direction plus Gaussian pixel noise.
DataSplit make_synthetic(const SyntheticSpec& spec);

}  // namespace colpack::training
