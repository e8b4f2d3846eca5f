#include "pof/dataset.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "pof/error.hpp"
#include "pof/rng.hpp"
#include "pof/table_io.hpp"

namespace pof {

namespace {

constexpr double kCentroidRadius = 2.0;

// Class counts as equal as possible, order shuffled. Keeps empirical label
// frequencies tight while staying exchangeable across positions.
IntVector balanced_labels(int n, int n_classes, Rng& rng) {
  std::vector<int> labels;
  labels.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) labels.push_back(i % n_classes);
  rng.shuffle(labels);
  IntVector out(n);
  for (int i = 0; i < n; ++i) out[i] = labels[static_cast<std::size_t>(i)];
  return out;
}

Dataset sample_gaussian_mixture(const ToyDatasetSpec& spec, int n, Rng& rng) {
  Dataset d;
  d.labels = balanced_labels(n, spec.n_classes, rng);
  d.inputs.resize(n, spec.input_dim);
  for (int i = 0; i < n; ++i) {
    const double angle = 2.0 * M_PI * d.labels[i] / spec.n_classes;
    d.inputs(i, 0) = kCentroidRadius * std::cos(angle) + spec.noise_sigma * rng.normal();
    d.inputs(i, 1) = kCentroidRadius * std::sin(angle) + spec.noise_sigma * rng.normal();
    for (int j = 2; j < spec.input_dim; ++j) d.inputs(i, j) = spec.noise_sigma * rng.normal();
  }
  return d;
}

Dataset sample_two_spirals(const ToyDatasetSpec& spec, int n, Rng& rng) {
  Dataset d;
  d.labels = balanced_labels(n, 2, rng);
  d.inputs.resize(n, spec.input_dim);
  for (int i = 0; i < n; ++i) {
    const double t = 0.5 * M_PI + 3.0 * M_PI * rng.uniform01();
    const double radius = kCentroidRadius * t / (3.5 * M_PI);
    const double rot = d.labels[i] == 0 ? 0.0 : M_PI;
    d.inputs(i, 0) = radius * std::cos(t + rot) + spec.noise_sigma * rng.normal();
    d.inputs(i, 1) = radius * std::sin(t + rot) + spec.noise_sigma * rng.normal();
    for (int j = 2; j < spec.input_dim; ++j) d.inputs(i, j) = spec.noise_sigma * rng.normal();
  }
  return d;
}

}  // namespace

void ToyDatasetSpec::validate() const {
  require(n_classes >= 2, "dataset", "need at least 2 classes");
  require(n_train >= n_classes && n_test >= n_classes, "dataset",
          "train/test sizes must be at least n_classes");
  require(noise_sigma > 0.0, "dataset", "noise_sigma must be positive");
  require(input_dim >= 2, "dataset", "toy generators need input_dim >= 2");
  if (kind == ToyKind::two_spirals) {
    require(n_classes == 2, "dataset", "two-spirals is a 2-class task");
  }
}

Batch Dataset::gather(const std::vector<Index>& rows) const {
  Batch b;
  b.inputs.resize(static_cast<Index>(rows.size()), inputs.cols());
  b.labels.resize(static_cast<Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    require(rows[i] >= 0 && rows[i] < size(), "dataset", "row index out of range");
    b.inputs.row(static_cast<Index>(i)) = inputs.row(rows[i]);
    b.labels[static_cast<Index>(i)] = labels[rows[i]];
  }
  return b;
}

TrainTestSplit generate(const ToyDatasetSpec& spec) {
  spec.validate();
  // Independent streams: no sample or noise draw is shared across splits.
  Rng train_rng(mix_seed(spec.seed, 0x7261696e));
  Rng test_rng(mix_seed(spec.seed, 0x74657374));
  TrainTestSplit out;
  if (spec.kind == ToyKind::gaussian_mixture) {
    out.train = sample_gaussian_mixture(spec, spec.n_train, train_rng);
    out.test = sample_gaussian_mixture(spec, spec.n_test, test_rng);
  } else {
    out.train = sample_two_spirals(spec, spec.n_train, train_rng);
    out.test = sample_two_spirals(spec, spec.n_test, test_rng);
  }
  return out;
}

void export_delimited(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path);
  require(out.good(), "io", "cannot open " + path.string() + " for writing");
  for (Index i = 0; i < data.size(); ++i) {
    for (Index j = 0; j < data.inputs.cols(); ++j) {
      out << format_full(data.inputs(i, j)) << "\t";
    }
    out << data.labels[i] << "\n";
  }
  require(out.good(), "io", "write failed for " + path.string());
}

Dataset import_delimited(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(in.good(), "io", "cannot open " + path.string());
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::vector<double> cells;
    double v = 0.0;
    while (ls >> v) cells.push_back(v);
    require(cells.size() >= 2, "io", path.string() + ": row needs features and a label");
    const double label = cells.back();
    cells.pop_back();
    require(label == std::floor(label), "io", path.string() + ": label column must be integral");
    labels.push_back(static_cast<int>(label));
    if (!rows.empty()) {
      require(cells.size() == rows.front().size(), "io", path.string() + ": ragged rows");
    }
    rows.push_back(std::move(cells));
  }
  require(!rows.empty(), "io", path.string() + ": no samples");

  Dataset d;
  d.inputs.resize(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  d.labels.resize(static_cast<Index>(labels.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      d.inputs(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
    }
    d.labels[static_cast<Index>(i)] = labels[i];
  }
  return d;
}

}  // namespace pof
