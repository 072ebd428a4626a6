#include "colpack/training/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <random>
#include <sstream>

#include "colpack/core/error.hpp"

namespace colpack::training {

std::vector<std::size_t> Dataset::class_counts() const {
  std::vector<std::size_t> counts(num_classes, 0);
  for (const Sample& s : samples) {
    if (s.label < num_classes) ++counts[s.label];
  }
  return counts;
}

void Dataset::validate() const {
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].label >= num_classes) {
      throw DataError("dataset: sample " + std::to_string(i) + " has label outside class range");
    }
    if (samples[i].pixels.size() != pixels_per_sample()) {
      throw DataError("dataset: sample " + std::to_string(i) + " has wrong pixel count");
    }
  }
}

Dataset dataset_fraction(const Dataset& data, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw ConfigError("dataset_fraction: fraction must lie in (0, 1]");
  }
  std::vector<std::vector<std::size_t>> by_class(data.num_classes);
  for (std::size_t i = 0; i < data.samples.size(); ++i) {
    by_class.at(data.samples[i].label).push_back(i);
  }
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> chosen;
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    auto& idx = by_class[c];
    if (idx.empty()) continue;
    const auto keep = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(idx.size())));
    if (keep == 0) {
      std::ostringstream msg;
      msg << "dataset_fraction: fraction " << fraction << " leaves class " << c << " empty";
      throw ConfigError(msg.str());
    }
    std::shuffle(idx.begin(), idx.end(), rng);
    chosen.insert(chosen.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(keep));
  }
  std::sort(chosen.begin(), chosen.end());
  Dataset out = data;
  out.samples.clear();
  for (std::size_t i : chosen) out.samples.push_back(data.samples[i]);
  return out;
}

namespace {

std::vector<std::uint8_t> read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint32_t be32(const std::vector<std::uint8_t>& b, std::size_t at, const std::string& what) {
  if (at + 4 > b.size()) throw DataError(what + ": truncated header");
  return (std::uint32_t{b[at]} << 24) | (std::uint32_t{b[at + 1]} << 16) |
         (std::uint32_t{b[at + 2]} << 8) | std::uint32_t{b[at + 3]};
}

}  // namespace

Dataset load_idx(const std::filesystem::path& images, const std::filesystem::path& labels) {
  const auto img = read_all(images);
  const auto lab = read_all(labels);
  if (img.empty()) throw DataError(images.string() + ": empty file");
  if (lab.empty()) throw DataError(labels.string() + ": empty file");
  if (be32(img, 0, images.string()) != 0x00000803u) {
    throw DataError(images.string() + ": bad IDX image magic");
  }
  if (be32(lab, 0, labels.string()) != 0x00000801u) {
    throw DataError(labels.string() + ": bad IDX label magic");
  }
  const std::size_t count = be32(img, 4, images.string());
  const std::size_t rows = be32(img, 8, images.string());
  const std::size_t cols = be32(img, 12, images.string());
  const std::size_t label_count = be32(lab, 4, labels.string());
  if (count != label_count) {
    std::ostringstream msg;
    msg << "IDX: " << count << " images but " << label_count << " labels";
    throw DataError(msg.str());
  }
  const std::size_t plane = rows * cols;
  if (img.size() < 16 + count * plane) throw DataError(images.string() + ": truncated data");
  if (lab.size() < 8 + count) throw DataError(labels.string() + ": truncated data");

  Dataset out;
  out.channels = 1;
  out.height = rows;
  out.width = cols;
  std::uint32_t max_label = 0;
  for (std::size_t i = 0; i < count; ++i) {
    Sample s;
    s.pixels.assign(img.begin() + static_cast<std::ptrdiff_t>(16 + i * plane),
                    img.begin() + static_cast<std::ptrdiff_t>(16 + (i + 1) * plane));
    s.label = lab[8 + i];
    max_label = std::max(max_label, s.label);
    out.samples.push_back(std::move(s));
  }
  out.num_classes = count == 0 ? 0 : max_label + 1;
  return out;
}

DataSplit make_synthetic(const SyntheticSpec& spec) {
  if (spec.num_classes < 2 || spec.channels < 1 || spec.height < 1 || spec.width < 1) {
    throw ConfigError("make_synthetic: need >= 2 classes and nonempty images");
  }
  std::mt19937_64 rng(spec.seed);
  const std::size_t plane = spec.height * spec.width;
  const std::size_t size = spec.channels * plane;
  std::uniform_real_distribution<double> level(0.0, 255.0);
  std::vector<std::vector<double>> protos(spec.num_classes, std::vector<double>(size));
  for (auto& p : protos) {
    for (double& v : p) v = level(rng);
  }

  std::normal_distribution<double> noise(0.0, spec.noise);
  std::uniform_int_distribution<int> move(-1, 1);
  auto draw = [&](std::size_t c) {
    Sample s;
    s.label = static_cast<std::uint32_t>(c);
    s.pixels.resize(size);
    const int dy = move(rng);
    const int dx = move(rng);
    for (std::size_t ch = 0; ch < spec.channels; ++ch) {
      for (std::size_t y = 0; y < spec.height; ++y) {
        for (std::size_t x = 0; x < spec.width; ++x) {
          const long sy = static_cast<long>(y) - dy;
          const long sx = static_cast<long>(x) - dx;
          double v = 0.0;
          if (sy >= 0 && sx >= 0 && sy < static_cast<long>(spec.height) &&
              sx < static_cast<long>(spec.width)) {
            v = protos[c][ch * plane + static_cast<std::size_t>(sy) * spec.width +
                          static_cast<std::size_t>(sx)];
          }
          v += noise(rng);
          s.pixels[ch * plane + y * spec.width + x] =
              static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
        }
      }
    }
    return s;
  };

  DataSplit split;
  for (Dataset* d : {&split.train, &split.test}) {
    d->channels = spec.channels;
    d->height = spec.height;
    d->width = spec.width;
    d->num_classes = spec.num_classes;
  }
  // Interleave classes so every prefix is roughly balanced.
  for (std::size_t i = 0; i < spec.train_per_class; ++i) {
    for (std::size_t c = 0; c < spec.num_classes; ++c) split.train.samples.push_back(draw(c));
  }
  for (std::size_t i = 0; i < spec.test_per_class; ++i) {
    for (std::size_t c = 0; c < spec.num_classes; ++c) split.test.samples.push_back(draw(c));
  }
  return split;
}

}  // namespace colpack::training
