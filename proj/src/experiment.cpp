#include "pof/experiment.hpp"

#include <algorithm>

#include "pof/error.hpp"
#include "pof/table_io.hpp"

namespace pof {

namespace fs = std::filesystem;

const ConfigSchema& experiment_schema() {
  static const ConfigSchema schema = {
      {"dataset.kind", {FieldKind::choice, {"gaussian-mixture", "two-spirals"}}},
      {"dataset.n_classes", {FieldKind::integer, {}}},
      {"dataset.n_train", {FieldKind::integer, {}}},
      {"dataset.n_test", {FieldKind::integer, {}}},
      {"dataset.input_dim", {FieldKind::integer, {}}},
      {"dataset.noise_sigma", {FieldKind::real, {}}},
      {"dataset.seed", {FieldKind::integer, {}}},

      {"model.widths", {FieldKind::int_list, {}}},
      {"model.activation", {FieldKind::choice, {"relu", "tanh"}}},
      {"model.loss", {FieldKind::choice, {"softmax-cross-entropy", "squared-error"}}},
      {"model.classifier_layers", {FieldKind::integer, {}}},
      {"model.init_sigma", {FieldKind::real, {}}},
      {"model.init_seed", {FieldKind::integer, {}}},

      {"pretrain.method", {FieldKind::choice, {"sgd", "sam"}}},
      {"pretrain.epochs", {FieldKind::integer, {}}},
      {"pretrain.batch_size", {FieldKind::integer, {}}},
      {"pretrain.lr", {FieldKind::real, {}}},
      {"pretrain.momentum", {FieldKind::real, {}}},
      {"pretrain.nesterov", {FieldKind::boolean, {}}},
      {"pretrain.weight_decay", {FieldKind::real, {}}},
      {"pretrain.lr_schedule", {FieldKind::milestones, {}}},
      {"pretrain.rho", {FieldKind::real, {}}},
      {"pretrain.seed", {FieldKind::integer, {}}},

      {"posttrain.enabled", {FieldKind::boolean, {}}},
      {"posttrain.epochs", {FieldKind::integer, {}}},
      {"posttrain.batch_size", {FieldKind::integer, {}}},
      {"posttrain.lr", {FieldKind::real, {}}},
      {"posttrain.momentum", {FieldKind::real, {}}},
      {"posttrain.nesterov", {FieldKind::boolean, {}}},
      {"posttrain.weight_decay", {FieldKind::real, {}}},
      {"posttrain.lr_schedule", {FieldKind::milestones, {}}},
      {"posttrain.gamma_mode", {FieldKind::choice, {"fixed", "uniform", "linear-growth"}}},
      {"posttrain.gamma", {FieldKind::real, {}}},
      {"posttrain.gamma_lo", {FieldKind::real, {}}},
      {"posttrain.gamma_hi", {FieldKind::real, {}}},
      {"posttrain.weak_batch_size", {FieldKind::integer, {}}},
      {"posttrain.drift_correction", {FieldKind::boolean, {}}},
      {"posttrain.reject_asymmetric", {FieldKind::boolean, {}}},
      {"posttrain.max_redraws", {FieldKind::integer, {}}},
      {"posttrain.seed", {FieldKind::integer, {}}},

      {"linesearch.xi_max", {FieldKind::real, {}}},
      {"linesearch.coarse_points", {FieldKind::integer, {}}},
      {"linesearch.refine", {FieldKind::choice, {"parabolic", "golden-section"}}},
      {"linesearch.refine_tol", {FieldKind::real, {}}},
      {"linesearch.asymmetry_ratio", {FieldKind::real, {}}},

      {"diagnostics.list", {FieldKind::text, {}}},
      {"diagnostics.n_batches", {FieldKind::integer, {}}},
      {"diagnostics.xi_batches", {FieldKind::integer, {}}},
      {"diagnostics.batch_size", {FieldKind::integer, {}}},
      {"diagnostics.top_k", {FieldKind::integer, {}}},
      {"diagnostics.n_bins", {FieldKind::integer, {}}},
      {"diagnostics.slice_points", {FieldKind::integer, {}}},
      {"diagnostics.slice_half_range", {FieldKind::real, {}}},
      {"diagnostics.seed", {FieldKind::integer, {}}},

      {"run.snapshot_every", {FieldKind::integer, {}}},
  };
  return schema;
}

KvConfig default_experiment_config() {
  return KvConfig::from_string(R"(
dataset.kind = gaussian-mixture
dataset.n_classes = 4
dataset.n_train = 2000
dataset.n_test = 2000
dataset.input_dim = 2
dataset.noise_sigma = 0.8
dataset.seed = 1

model.widths = 2,16,16,16,16,4
model.activation = tanh
model.loss = softmax-cross-entropy
model.classifier_layers = 1
model.init_sigma = 0.1
model.init_seed = 2

pretrain.method = sgd
pretrain.epochs = 200
pretrain.batch_size = 256
pretrain.lr = 0.1
pretrain.momentum = 0.9
pretrain.nesterov = true
pretrain.weight_decay = 5e-4
pretrain.lr_schedule = 60:0.2,120:0.2,160:0.2
pretrain.rho = 0.05
pretrain.seed = 3

posttrain.enabled = true
posttrain.epochs = 20
posttrain.batch_size = 256
posttrain.lr = 3e-3
posttrain.momentum = 0.9
posttrain.nesterov = true
posttrain.weight_decay = 5e-4
posttrain.gamma_mode = uniform
posttrain.gamma_lo = 0.0
posttrain.gamma_hi = 2.0
posttrain.weak_batch_size = 32
posttrain.drift_correction = false
posttrain.reject_asymmetric = true
posttrain.max_redraws = 8
posttrain.seed = 5

linesearch.xi_max = 10.0
linesearch.coarse_points = 32
linesearch.refine = parabolic
linesearch.refine_tol = 1e-4
linesearch.asymmetry_ratio = 0.5

diagnostics.list = delta-l,xi-hist,proj-hessian,grad-corr,slice,perturb-hist
diagnostics.n_batches = 400
diagnostics.xi_batches = 200
diagnostics.batch_size = 32
diagnostics.top_k = 10
diagnostics.n_bins = 24
diagnostics.slice_points = 41
diagnostics.slice_half_range = 0
diagnostics.seed = 7

run.snapshot_every = 0
)");
}

namespace {

LineSearchConfig parse_linesearch(const KvConfig& kv) {
  LineSearchConfig ls;
  ls.xi_max = kv.get_real("linesearch.xi_max", ls.xi_max);
  ls.coarse_points = static_cast<int>(kv.get_int("linesearch.coarse_points", ls.coarse_points));
  ls.refine = kv.get_text("linesearch.refine", "parabolic") == "golden-section"
                  ? RefineMethod::golden_section
                  : RefineMethod::parabolic;
  ls.refine_tol = kv.get_real("linesearch.refine_tol", ls.refine_tol);
  ls.asymmetry_ratio = kv.get_real("linesearch.asymmetry_ratio", ls.asymmetry_ratio);
  ls.validate();
  return ls;
}

SgdConfig parse_sgd(const KvConfig& kv, const std::string& prefix, double default_lr) {
  SgdConfig cfg;
  cfg.lr = kv.get_real(prefix + ".lr", default_lr);
  cfg.momentum = kv.get_real(prefix + ".momentum", 0.9);
  cfg.nesterov = kv.get_bool(prefix + ".nesterov", true);
  cfg.weight_decay = kv.get_real(prefix + ".weight_decay", 5e-4);
  cfg.schedule = kv.get_milestones(prefix + ".lr_schedule");
  cfg.validate();
  return cfg;
}

}  // namespace

ExperimentConfig parse_experiment_config(const KvConfig& kv) {
  kv.validate(experiment_schema());

  ExperimentConfig cfg;
  cfg.dataset.kind = kv.get_text("dataset.kind", "gaussian-mixture") == "two-spirals"
                         ? ToyKind::two_spirals
                         : ToyKind::gaussian_mixture;
  cfg.dataset.n_classes = static_cast<int>(kv.get_int("dataset.n_classes", 4));
  cfg.dataset.n_train = static_cast<int>(kv.get_int("dataset.n_train", 2000));
  cfg.dataset.n_test = static_cast<int>(kv.get_int("dataset.n_test", 2000));
  cfg.dataset.input_dim = static_cast<int>(kv.get_int("dataset.input_dim", 2));
  cfg.dataset.noise_sigma = kv.get_real("dataset.noise_sigma", 0.8);
  cfg.dataset.seed = static_cast<std::uint64_t>(kv.get_int("dataset.seed", 1));
  cfg.dataset.validate();

  cfg.model.layer_widths = kv.get_int_list("model.widths", {2, 16, 16, 16, 16, 4});
  cfg.model.activation =
      kv.get_text("model.activation", "tanh") == "relu" ? Activation::relu : Activation::tanh;
  cfg.model.loss = kv.get_text("model.loss", "softmax-cross-entropy") == "squared-error"
                       ? LossKind::squared_error
                       : LossKind::softmax_cross_entropy;
  cfg.classifier_layers = static_cast<int>(kv.get_int("model.classifier_layers", 1));
  cfg.classifier_init_sigma = kv.get_real("model.init_sigma", 0.1);
  cfg.init_seed = static_cast<std::uint64_t>(kv.get_int("model.init_seed", 2));
  require(cfg.model.layer_widths.front() == cfg.dataset.input_dim, "config",
          "model.widths must start at dataset.input_dim");
  if (cfg.model.loss == LossKind::softmax_cross_entropy) {
    require(cfg.model.layer_widths.back() == cfg.dataset.n_classes, "config",
            "model.widths must end at dataset.n_classes");
  }

  const LineSearchConfig ls = parse_linesearch(kv);

  cfg.pretrain.method =
      kv.get_text("pretrain.method", "sgd") == "sam" ? TrainMethod::sam : TrainMethod::sgd;
  cfg.pretrain.epochs = static_cast<int>(kv.get_int("pretrain.epochs", 200));
  cfg.pretrain.batch_size = static_cast<int>(kv.get_int("pretrain.batch_size", 256));
  cfg.pretrain.seed = static_cast<std::uint64_t>(kv.get_int("pretrain.seed", 3));
  cfg.pretrain.sgd = parse_sgd(kv, "pretrain", 0.1);
  cfg.pretrain.sam.rho = kv.get_real("pretrain.rho", 0.05);
  cfg.pretrain.sam.base = cfg.pretrain.sgd;
  cfg.pretrain.run_label = "pretrain";

  cfg.posttrain_enabled = kv.get_bool("posttrain.enabled", true);
  cfg.posttrain.method = TrainMethod::pof;
  cfg.posttrain.epochs = static_cast<int>(kv.get_int("posttrain.epochs", 20));
  cfg.posttrain.batch_size = static_cast<int>(kv.get_int("posttrain.batch_size", 256));
  cfg.posttrain.seed = static_cast<std::uint64_t>(kv.get_int("posttrain.seed", 5));
  cfg.posttrain.pof.base = parse_sgd(kv, "posttrain", 3e-3);
  const std::string gamma_mode = kv.get_text("posttrain.gamma_mode", "uniform");
  cfg.posttrain.pof.gamma.mode = gamma_mode == "fixed"
                                     ? GammaMode::fixed
                                     : gamma_mode == "linear-growth" ? GammaMode::linear_growth
                                                                     : GammaMode::uniform;
  cfg.posttrain.pof.gamma.fixed_value = kv.get_real("posttrain.gamma", 2.0);
  cfg.posttrain.pof.gamma.lo = kv.get_real("posttrain.gamma_lo", 0.0);
  cfg.posttrain.pof.gamma.hi = kv.get_real("posttrain.gamma_hi", 2.0);
  cfg.posttrain.pof.weak_batch_size = static_cast<int>(kv.get_int("posttrain.weak_batch_size", 32));
  cfg.posttrain.pof.drift_correction = kv.get_bool("posttrain.drift_correction", false);
  cfg.posttrain.pof.reject_asymmetric = kv.get_bool("posttrain.reject_asymmetric", true);
  cfg.posttrain.pof.max_redraws = static_cast<int>(kv.get_int("posttrain.max_redraws", 8));
  cfg.posttrain.pof.linesearch = ls;
  cfg.posttrain.run_label = "posttrain";

  cfg.diag.list = kv.get_name_list(
      "diagnostics.list", {"delta-l", "xi-hist", "proj-hessian", "grad-corr", "slice",
                           "perturb-hist"});
  cfg.diag.n_batches = static_cast<int>(kv.get_int("diagnostics.n_batches", 400));
  cfg.diag.xi_batches = static_cast<int>(kv.get_int("diagnostics.xi_batches", 200));
  cfg.diag.batch_size = static_cast<int>(kv.get_int("diagnostics.batch_size", 32));
  cfg.diag.top_k = static_cast<int>(kv.get_int("diagnostics.top_k", 10));
  cfg.diag.n_bins = static_cast<int>(kv.get_int("diagnostics.n_bins", 24));
  cfg.diag.slice_points = static_cast<int>(kv.get_int("diagnostics.slice_points", 41));
  cfg.diag.slice_half_range = kv.get_real("diagnostics.slice_half_range", 0.0);
  cfg.diag.seed = static_cast<std::uint64_t>(kv.get_int("diagnostics.seed", 7));
  cfg.diag.linesearch = ls;

  cfg.snapshot_every = static_cast<int>(kv.get_int("run.snapshot_every", 0));
  cfg.pretrain.snapshot_every = cfg.snapshot_every;
  cfg.posttrain.snapshot_every = cfg.snapshot_every;

  cfg.config_hash = kv.hash();
  cfg.canonical_config = kv.canonical();
  return cfg;
}

namespace {

bool wants(const DiagnosticsOptions& diag, const std::string& name) {
  return std::find(diag.list.begin(), diag.list.end(), name) != diag.list.end();
}

void write_metrics(const std::vector<EpochMetrics>& metrics, const fs::path& dir) {
  TableWriter table(dir / "metrics.tsv", {"epoch", "train_loss", "train_error", "test_loss",
                                          "test_error", "mean_xi_star", "lr_scale"});
  TableWriter timings(dir / "timings.tsv", {"epoch", "wall_seconds"});
  for (const EpochMetrics& em : metrics) {
    table.row({std::to_string(em.epoch), format_full(em.train_loss), format_full(em.train_error),
               format_full(em.test_loss), format_full(em.test_error),
               format_full(em.mean_xi_star), format_full(em.lr_scale)});
    timings.row({std::to_string(em.epoch), format_full(em.wall_seconds)});
  }
}

void write_pof_log(const std::vector<PofStepLog>& logs, const fs::path& path) {
  TableWriter table(path, {"iter", "xi_star", "gamma", "delta_theta_norm", "loss_at_zero",
                           "loss_at_star", "asymmetric", "redraws"});
  for (const PofStepLog& log : logs) {
    table.row({std::to_string(log.iter), format_full(log.xi_star), format_full(log.gamma),
               format_full(log.delta_theta_norm), format_full(log.loss_at_zero),
               format_full(log.loss_at_star), log.asymmetric ? "1" : "0",
               std::to_string(log.redraws)});
  }
}

void write_perturb_log(const std::vector<double>& sizes, const fs::path& path) {
  TableWriter table(path, {"iter", "size"});
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    table.row({std::to_string(i + 1), format_full(sizes[i])});
  }
}

void write_delta_l(const DeltaLReport& report, const fs::path& path) {
  TableWriter table(path, {"layer", "lambda_max", "delta_l", "s_at_min", "reliable"});
  for (const DeltaLLayerRow& row : report.rows) {
    table.row({std::to_string(row.layer), format_full(row.lambda_max), format_full(row.delta_l),
               format_full(row.s_at_min), row.reliable ? "1" : "0"});
  }
  auto summary_path = path;
  summary_path.replace_extension(".summary.txt");
  SummaryWriter summary(summary_path);
  summary.put("method", report.method_label);
  summary.put("final_layer_delta_l", report.rows.back().delta_l);
  summary.put("final_layer_lambda_max", report.rows.back().lambda_max);
}

// Scan width matched to the classifier curvature, as in the delta-l scan.
double auto_slice_range(const Checkpoint& ckpt, const Batch& train_scope, double lambda_top) {
  const double loss = forward_loss(ckpt.params, ckpt.spec, train_scope);
  return 3.0 * std::sqrt(2.0 * (loss + 1e-12) / std::max(lambda_top, 1e-9));
}

std::vector<fs::path> run_diagnostics(const Checkpoint& ckpt, const TrainTestSplit& data,
                                      const DiagnosticsOptions& diag, const fs::path& dir,
                                      const std::string& label) {
  fs::create_directories(dir);
  std::vector<fs::path> written;
  const Batch full_train = data.train.as_batch();
  const Batch full_test = data.test.as_batch();

  if (wants(diag, "delta-l")) {
    DeltaLScanConfig cfg;
    cfg.power = diag.power;
    const DeltaLReport report = delta_l_scan(ckpt, full_train, full_test, cfg, label);
    write_delta_l(report, dir / "delta_l.tsv");
    written.push_back(dir / "delta_l.tsv");
  }

  if (wants(diag, "xi-hist")) {
    for (const auto& [name, set] :
         {std::pair<const char*, const Dataset*>{"train", &data.train}, {"test", &data.test}}) {
      XiStarSummary stats;
      const Histogram h =
          xi_star_histogram(ckpt, *set, diag.linesearch, diag.xi_batches, diag.batch_size,
                            mix_seed(diag.seed, name[0]), diag.n_bins, &stats);
      const fs::path path = dir / (std::string("xi_hist_") + name + ".tsv");
      write_histogram(h, path,
                      {{"scope", name},
                       {"n_asymmetric", std::to_string(stats.n_asymmetric)},
                       {"n_saturated", std::to_string(stats.n_saturated)}});
      written.push_back(path);
    }
  }

  if (wants(diag, "proj-hessian")) {
    for (const auto& [name, set] :
         {std::pair<const char*, const Dataset*>{"train", &data.train}, {"test", &data.test}}) {
      double median = 0.0;
      const Histogram h =
          projected_hessian_histogram(ckpt, *set, diag.n_batches, diag.batch_size,
                                      mix_seed(diag.seed, 100 + name[0]), diag.n_bins, &median);
      const fs::path path = dir / (std::string("proj_hessian_") + name + ".tsv");
      write_histogram(h, path, {{"scope", name}});
      written.push_back(path);
    }
  }

  if (wants(diag, "grad-corr")) {
    const auto counts =
        grad_eigvec_correlation_counts(ckpt, data.train, diag.top_k, diag.xi_batches,
                                       diag.batch_size, mix_seed(diag.seed, 200), diag.power);
    const fs::path path = dir / "grad_corr.tsv";
    TableWriter table(path, {"eigenvector_index", "count"});
    long long mode_count = -1;
    int mode_index = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
      table.row({std::to_string(i + 1), std::to_string(counts[i])});
      if (counts[i] > mode_count) {
        mode_count = counts[i];
        mode_index = static_cast<int>(i) + 1;
      }
    }
    auto summary_path = path;
    summary_path.replace_extension(".summary.txt");
    SummaryWriter summary(summary_path);
    summary.put("mode_index", static_cast<long long>(mode_index));
    written.push_back(path);
  }

  if (wants(diag, "slice")) {
    const BlockSpan theta = ckpt.split.theta_span(*ckpt.params.layout);
    const auto pairs =
        top_k_eigenpairs(ckpt.params, ckpt.spec, full_train, ckpt.split, theta, 1, diag.power);
    const double half = diag.slice_half_range > 0.0
                            ? diag.slice_half_range
                            : auto_slice_range(ckpt, full_train, pairs.front().value);
    const auto table =
        landscape_slice(ckpt, full_train, theta, pairs.front().vector, half, diag.slice_points);
    const fs::path path = dir / "slice_classifier.tsv";
    TableWriter writer(path, {"s", "loss"});
    for (const auto& [s, loss] : table) writer.row({format_full(s), format_full(loss)});
    written.push_back(path);
  }

  return written;
}

void stage_context(const char* stage, const Error& e) {
  fail(e.kind(), "stage=", stage, ": ", e.what());
}

}  // namespace

RunRecord run_experiment(const ExperimentConfig& cfg, const fs::path& run_dir, bool force) {
  if (fs::exists(run_dir) && !fs::is_empty(run_dir)) {
    require(force, "io",
            run_dir.string() + " already holds results; pass force to overwrite");
    fs::remove_all(run_dir);
  }
  fs::create_directories(run_dir);

  RunRecord record;
  record.config_hash = cfg.config_hash;
  record.run_dir = run_dir;

  {
    std::ofstream snapshot(run_dir / "config.cfg");
    snapshot << cfg.canonical_config;
  }

  // Data stage.
  TrainTestSplit data;
  try {
    data = generate(cfg.dataset);
    fs::create_directories(run_dir / "data");
    export_delimited(data.train, run_dir / "data" / "train.tsv");
    export_delimited(data.test, run_dir / "data" / "test.tsv");
  } catch (const Error& e) {
    stage_context("data", e);
  }

  // Model init + pre-training.
  Checkpoint start;
  start.spec = cfg.model;
  start.split = make_suffix_split(start.spec.n_layers(), cfg.classifier_layers);
  start.spec.init = default_init(start.spec, start.split, cfg.classifier_init_sigma);
  {
    Rng rng(cfg.init_seed);
    start.params = init_params(start.spec, rng);
    start.rng_label = "init:seed=" + std::to_string(cfg.init_seed);
  }

  TrainResult pre;
  const fs::path pre_dir = run_dir / "pretrain";
  try {
    fs::create_directories(pre_dir);
    pre = train(start, data.train, data.test, cfg.pretrain);
    write_metrics(pre.metrics, pre_dir);
    write_perturb_log(pre.perturbation_sizes, pre_dir / "perturb_log.tsv");
    if (wants(cfg.diag, "perturb-hist")) {
      write_histogram(perturbation_size_histogram(pre.perturbation_sizes, cfg.diag.n_bins),
                      pre_dir / "perturb_hist.tsv",
                      {{"method", method_name(cfg.pretrain.method)}});
    }
    save_checkpoint(pre.final_checkpoint, pre_dir / "final.ckpt");
    record.pretrain_checkpoint = pre_dir / "final.ckpt";
    record.pretrain_final_test_error = pre.metrics.back().test_error;
    double total = 0.0;
    for (const auto& em : pre.metrics) total += em.wall_seconds;
    record.mean_epoch_seconds_pretrain = total / static_cast<double>(pre.metrics.size());
  } catch (const Error& e) {
    stage_context("pretrain", e);
  }

  try {
    const auto reports = run_diagnostics(pre.final_checkpoint, data, cfg.diag,
                                         run_dir / "diag_pre", method_name(cfg.pretrain.method));
    record.reports.insert(record.reports.end(), reports.begin(), reports.end());
  } catch (const Error& e) {
    stage_context("diagnostics-pre", e);
  }

  if (cfg.posttrain_enabled) {
    TrainResult post;
    const fs::path post_dir = run_dir / "posttrain";
    try {
      fs::create_directories(post_dir);
      post = train(pre.final_checkpoint, data.train, data.test, cfg.posttrain);
      write_metrics(post.metrics, post_dir);
      write_pof_log(post.pof_log, post_dir / "pof_step_log.tsv");
      write_perturb_log(post.perturbation_sizes, post_dir / "perturb_log.tsv");
      if (wants(cfg.diag, "perturb-hist")) {
        write_histogram(perturbation_size_histogram(post.perturbation_sizes, cfg.diag.n_bins),
                        post_dir / "perturb_hist.tsv", {{"method", "pof"}});
      }
      save_checkpoint(post.final_checkpoint, post_dir / "final.ckpt");
      record.posttrain_checkpoint = post_dir / "final.ckpt";
      record.posttrain_final_test_error = post.metrics.back().test_error;
      double total = 0.0;
      for (const auto& em : post.metrics) total += em.wall_seconds;
      record.mean_epoch_seconds_posttrain = total / static_cast<double>(post.metrics.size());
    } catch (const Error& e) {
      stage_context("posttrain", e);
    }

    try {
      const auto reports = run_diagnostics(post.final_checkpoint, data, cfg.diag,
                                           run_dir / "diag_post", "pof");
      record.reports.insert(record.reports.end(), reports.begin(), reports.end());
      const auto rows =
          compare_checkpoints(pre.final_checkpoint, post.final_checkpoint, data.train, data.test,
                              cfg.diag);
      write_comparison(rows, run_dir / "compare.tsv");
      record.reports.push_back(run_dir / "compare.tsv");
    } catch (const Error& e) {
      stage_context("diagnostics-post", e);
    }
  }

  SummaryWriter rec(run_dir / "run_record.txt");
  rec.put("config_hash", format_full(static_cast<double>(record.config_hash)));
  rec.put("config_hash_hex", [&] {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(record.config_hash));
    return std::string(buf);
  }());
  rec.put("pretrain_checkpoint", record.pretrain_checkpoint.string());
  rec.put("posttrain_checkpoint", record.posttrain_checkpoint.string());
  rec.put("pretrain_final_test_error", record.pretrain_final_test_error);
  rec.put("posttrain_final_test_error", record.posttrain_final_test_error);
  rec.put("n_reports", static_cast<long long>(record.reports.size()));
  return record;
}

std::vector<ComparisonRow> compare_checkpoints(const Checkpoint& a, const Checkpoint& b,
                                               const Dataset& train_set, const Dataset& test_set,
                                               const DiagnosticsOptions& diag) {
  require(a.spec.layer_widths == b.spec.layer_widths && a.spec.activation == b.spec.activation &&
              a.spec.loss == b.spec.loss && a.spec.with_bias == b.spec.with_bias,
          "compare", "checkpoints disagree on the architecture");
  require(a.split.classifier_layers == b.split.classifier_layers, "compare",
          "checkpoints disagree on the classifier split");

  const Batch full_train = train_set.as_batch();
  const Batch full_test = test_set.as_batch();

  std::vector<ComparisonRow> rows;
  auto add = [&](const std::string& name, double va, double vb) {
    rows.push_back({name, va, vb});
  };

  add("test_loss", forward_loss(a.params, a.spec, full_test),
      forward_loss(b.params, b.spec, full_test));
  add("test_error", error_rate(a.params, a.spec, full_test),
      error_rate(b.params, b.spec, full_test));

  DeltaLScanConfig scan;
  scan.power = diag.power;
  const DeltaLReport da = delta_l_scan(a, full_train, full_test, scan, "a");
  const DeltaLReport db = delta_l_scan(b, full_train, full_test, scan, "b");
  for (std::size_t i = 0; i < da.rows.size(); ++i) {
    add("delta_l_layer" + std::to_string(da.rows[i].layer), da.rows[i].delta_l, db.rows[i].delta_l);
  }
  add("lambda_max_classifier", da.rows.back().lambda_max, db.rows.back().lambda_max);

  for (const auto& [name, set] :
       {std::pair<const char*, const Dataset*>{"train", &train_set}, {"test", &test_set}}) {
    double ma = 0.0;
    double mb = 0.0;
    projected_hessian_histogram(a, *set, diag.n_batches, diag.batch_size,
                                mix_seed(diag.seed, 300 + name[0]), diag.n_bins, &ma);
    projected_hessian_histogram(b, *set, diag.n_batches, diag.batch_size,
                                mix_seed(diag.seed, 300 + name[0]), diag.n_bins, &mb);
    add(std::string("median_proj_hessian_") + name, ma, mb);
  }
  return rows;
}

void write_comparison(const std::vector<ComparisonRow>& rows, const fs::path& path) {
  TableWriter table(path, {"metric", "checkpoint_a", "checkpoint_b", "delta"});
  for (const ComparisonRow& row : rows) {
    table.row({row.metric, format_full(row.value_a), format_full(row.value_b),
               format_full(row.value_b - row.value_a)});
  }
}

}  // namespace pof
