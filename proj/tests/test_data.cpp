#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <map>
#include <set>

#include "pof/dataset.hpp"
#include "pof/error.hpp"
#include "pof/sampler.hpp"

using namespace pof;

namespace {

ToyDatasetSpec default_spec(std::uint64_t seed = 7) {
  ToyDatasetSpec s;
  s.seed = seed;
  return s;
}

}  // namespace

TEST_CASE("generation is a pure function of the spec") {
  const TrainTestSplit a = generate(default_spec());
  const TrainTestSplit b = generate(default_spec());
  CHECK(a.train.inputs == b.train.inputs);
  CHECK(a.train.labels == b.train.labels);
  CHECK(a.test.inputs == b.test.inputs);
  CHECK(a.test.labels == b.test.labels);

  const TrainTestSplit c = generate(default_spec(8));
  CHECK(a.train.inputs != c.train.inputs);
}

TEST_CASE("vanishing noise collapses samples onto separable centroids") {
  ToyDatasetSpec s = default_spec();
  s.noise_sigma = 1e-9;
  s.n_train = 400;
  s.n_test = 400;
  const TrainTestSplit d = generate(s);

  // Nearest-centroid classification from class means is perfect.
  Matrix centroids = Matrix::Zero(s.n_classes, 2);
  Eigen::VectorXi counts = Eigen::VectorXi::Zero(s.n_classes);
  for (Index i = 0; i < d.train.size(); ++i) {
    centroids.row(d.train.labels[i]) += d.train.inputs.row(i);
    ++counts[d.train.labels[i]];
  }
  for (int c = 0; c < s.n_classes; ++c) centroids.row(c) /= counts[c];

  int wrong = 0;
  for (Index i = 0; i < d.train.size(); ++i) {
    Index best = 0;
    (centroids.rowwise() - d.train.inputs.row(i)).rowwise().norm().minCoeff(&best);
    if (static_cast<int>(best) != d.train.labels[i]) ++wrong;
  }
  CHECK(wrong == 0);
}

TEST_CASE("label frequencies stay within 5% of uniform") {
  ToyDatasetSpec s = default_spec(11);
  s.n_train = 10000;
  const TrainTestSplit d = generate(s);
  Eigen::VectorXi counts = Eigen::VectorXi::Zero(s.n_classes);
  for (Index i = 0; i < d.train.size(); ++i) ++counts[d.train.labels[i]];
  for (int c = 0; c < s.n_classes; ++c) {
    const double freq = static_cast<double>(counts[c]) / s.n_train;
    CHECK(std::abs(freq - 1.0 / s.n_classes) < 0.05 / s.n_classes);
  }
}

TEST_CASE("degenerate specs are rejected") {
  ToyDatasetSpec s = default_spec();
  s.n_train = 2;
  CHECK_THROWS_AS(generate(s), Error);

  ToyDatasetSpec neg = default_spec();
  neg.noise_sigma = 0.0;
  CHECK_THROWS_AS(generate(neg), Error);

  ToyDatasetSpec spiral = default_spec();
  spiral.kind = ToyKind::two_spirals;
  spiral.n_classes = 4;
  CHECK_THROWS_AS(generate(spiral), Error);
}

TEST_CASE("train and test share no samples") {
  const TrainTestSplit d = generate(default_spec(13));
  std::set<std::pair<double, double>> train_rows;
  for (Index i = 0; i < d.train.size(); ++i) {
    train_rows.emplace(d.train.inputs(i, 0), d.train.inputs(i, 1));
  }
  for (Index i = 0; i < d.test.size(); ++i) {
    CHECK(train_rows.count({d.test.inputs(i, 0), d.test.inputs(i, 1)}) == 0);
  }
}

TEST_CASE("two-spirals generator produces both classes at matched radii") {
  ToyDatasetSpec s = default_spec(17);
  s.kind = ToyKind::two_spirals;
  s.n_classes = 2;
  s.noise_sigma = 0.05;
  s.n_train = 500;
  s.n_test = 100;
  const TrainTestSplit d = generate(s);
  CHECK(d.train.labels.minCoeff() == 0);
  CHECK(d.train.labels.maxCoeff() == 1);
  CHECK(d.train.inputs.rowwise().norm().maxCoeff() < 3.0);
}

TEST_CASE("shuffle-epoch pass covers every sample exactly once") {
  ToyDatasetSpec s = default_spec(19);
  s.n_train = 103;  // not a multiple of the batch size
  s.n_test = 4;
  const TrainTestSplit d = generate(s);
  BatchSampler sampler(d.train, 20, 5, SamplerMode::shuffle_epoch);

  std::multiset<double> seen;
  int batches = 0;
  Index last_size = -1;
  while (sampler.has_next()) {
    const Batch b = sampler.next();
    ++batches;
    last_size = b.size();
    for (Index i = 0; i < b.size(); ++i) seen.insert(b.inputs(i, 0));
  }
  CHECK(batches == sampler.batches_per_epoch());
  CHECK(last_size == 3);  // 103 = 5*20 + 3
  CHECK(seen.size() == 103);
  std::multiset<double> expected;
  for (Index i = 0; i < d.train.size(); ++i) expected.insert(d.train.inputs(i, 0));
  CHECK(seen == expected);

  CHECK_THROWS_AS(sampler.next(), Error);  // exhausted without reset
  sampler.reset();
  CHECK(sampler.has_next());
}

TEST_CASE("identical seeds give identical batch sequences") {
  const TrainTestSplit d = generate(default_spec(23));
  for (auto mode : {SamplerMode::shuffle_epoch, SamplerMode::iid_with_replacement}) {
    BatchSampler a(d.train, 32, 99, mode);
    BatchSampler b(d.train, 32, 99, mode);
    for (int i = 0; i < 10; ++i) {
      const Batch ba = a.next();
      const Batch bb = b.next();
      CHECK(ba.inputs == bb.inputs);
      CHECK(ba.labels == bb.labels);
    }
  }
}

TEST_CASE("replacement sampling hits every sample at a near-uniform rate") {
  ToyDatasetSpec s = default_spec(29);
  s.n_train = 50;
  s.n_test = 4;
  const TrainTestSplit d = generate(s);
  BatchSampler sampler(d.train, 100, 31, SamplerMode::iid_with_replacement);

  std::map<double, int> counts;
  for (Index i = 0; i < d.train.size(); ++i) counts[d.train.inputs(i, 0)] = 0;
  const int draws = 500;
  for (int t = 0; t < draws; ++t) {
    const Batch b = sampler.next();
    for (Index i = 0; i < b.size(); ++i) ++counts[b.inputs(i, 0)];
  }
  const double total = 100.0 * draws;
  const double p = 1.0 / 50.0;
  const double sigma = std::sqrt(p * (1.0 - p) / total);
  for (const auto& [key, count] : counts) {
    CHECK(std::abs(count / total - p) <= 3.0 * sigma);
  }
}

TEST_CASE("delimited export/import round-trips bit-exactly") {
  ToyDatasetSpec s = default_spec(37);
  s.n_train = 64;
  s.n_test = 8;
  const TrainTestSplit d = generate(s);
  const auto path = std::filesystem::temp_directory_path() / "pof_dataset_roundtrip.tsv";
  export_delimited(d.train, path);
  const Dataset back = import_delimited(path);
  CHECK(back.inputs == d.train.inputs);
  CHECK(back.labels == d.train.labels);
  std::filesystem::remove(path);
}
