#include "pof/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "pof/error.hpp"

namespace pof {

namespace {

constexpr char kMagic[8] = {'P', 'O', 'F', 'L', 'A', 'B', 'C', 'K'};
constexpr std::uint32_t kVersion = 1;

void put_bytes(std::ofstream& out, const void* data, std::size_t n) {
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
}

void put_u8(std::ofstream& out, std::uint8_t v) { put_bytes(out, &v, 1); }

void put_u32(std::ofstream& out, std::uint32_t v) {
  std::uint8_t b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<std::uint8_t>(v >> (8 * i));
  put_bytes(out, b, 4);
}

void put_u64(std::ofstream& out, std::uint64_t v) {
  std::uint8_t b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<std::uint8_t>(v >> (8 * i));
  put_bytes(out, b, 8);
}

void put_f64(std::ofstream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

void get_bytes(std::ifstream& in, void* data, std::size_t n, const char* what) {
  in.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
  require(in.gcount() == static_cast<std::streamsize>(n), "checkpoint",
          std::string("truncated file while reading ") + what);
}

std::uint8_t get_u8(std::ifstream& in, const char* what) {
  std::uint8_t v = 0;
  get_bytes(in, &v, 1, what);
  return v;
}

std::uint32_t get_u32(std::ifstream& in, const char* what) {
  std::uint8_t b[4];
  get_bytes(in, b, 4, what);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

std::uint64_t get_u64(std::ifstream& in, const char* what) {
  std::uint8_t b[8];
  get_bytes(in, b, 8, what);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

double get_f64(std::ifstream& in, const char* what) {
  return std::bit_cast<double>(get_u64(in, what));
}

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  ckpt.spec.validate();
  ckpt.split.validate(ckpt.spec.n_layers());
  require(ckpt.params.layout != nullptr, "checkpoint", "params carry no layout");
  require(static_cast<int>(ckpt.spec.init.size()) == ckpt.spec.n_layers(), "checkpoint",
          "spec.init must be filled before saving");

  std::ofstream out(path, std::ios::binary);
  require(out.good(), "io", "cannot open " + path.string() + " for writing");

  put_bytes(out, kMagic, sizeof(kMagic));
  put_u32(out, kVersion);

  put_u32(out, static_cast<std::uint32_t>(ckpt.spec.layer_widths.size()));
  for (int w : ckpt.spec.layer_widths) put_u32(out, static_cast<std::uint32_t>(w));
  put_u8(out, static_cast<std::uint8_t>(ckpt.spec.activation));
  put_u8(out, static_cast<std::uint8_t>(ckpt.spec.loss));
  put_u8(out, ckpt.spec.with_bias ? 1 : 0);
  put_u8(out, 0);  // reserved
  for (const LayerInit& li : ckpt.spec.init) {
    put_u8(out, static_cast<std::uint8_t>(li.kind));
    put_f64(out, li.sigma);
  }

  put_u32(out, static_cast<std::uint32_t>(ckpt.split.feature_layers.size()));
  for (int l : ckpt.split.feature_layers) put_u32(out, static_cast<std::uint32_t>(l));
  put_u32(out, static_cast<std::uint32_t>(ckpt.split.classifier_layers.size()));
  for (int l : ckpt.split.classifier_layers) put_u32(out, static_cast<std::uint32_t>(l));

  put_u32(out, static_cast<std::uint32_t>(ckpt.rng_label.size()));
  put_bytes(out, ckpt.rng_label.data(), ckpt.rng_label.size());

  put_u64(out, static_cast<std::uint64_t>(ckpt.params.values.size()));
  for (Index i = 0; i < ckpt.params.values.size(); ++i) put_f64(out, ckpt.params.values[i]);

  out.flush();
  require(out.good(), "io", "write failed for " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "io", "cannot open " + path.string());

  char magic[8];
  get_bytes(in, magic, sizeof(magic), "magic");
  require(std::memcmp(magic, kMagic, sizeof(kMagic)) == 0, "checkpoint",
          path.string() + " is not a checkpoint file");
  const std::uint32_t version = get_u32(in, "version");
  require(version == kVersion, "checkpoint",
          "unsupported checkpoint version " + std::to_string(version));

  Checkpoint ckpt;
  const std::uint32_t n_widths = get_u32(in, "width count");
  require(n_widths >= 3 && n_widths < 1u << 16, "checkpoint", "implausible width count");
  for (std::uint32_t i = 0; i < n_widths; ++i) {
    ckpt.spec.layer_widths.push_back(static_cast<int>(get_u32(in, "width")));
  }
  ckpt.spec.activation = static_cast<Activation>(get_u8(in, "activation"));
  ckpt.spec.loss = static_cast<LossKind>(get_u8(in, "loss kind"));
  ckpt.spec.with_bias = get_u8(in, "bias flag") != 0;
  get_u8(in, "reserved");
  for (int l = 0; l < ckpt.spec.n_layers(); ++l) {
    LayerInit li;
    li.kind = static_cast<InitKind>(get_u8(in, "init kind"));
    li.sigma = get_f64(in, "init sigma");
    ckpt.spec.init.push_back(li);
  }

  const std::uint32_t n_feature = get_u32(in, "feature layer count");
  for (std::uint32_t i = 0; i < n_feature; ++i) {
    ckpt.split.feature_layers.push_back(static_cast<int>(get_u32(in, "feature layer id")));
  }
  const std::uint32_t n_classifier = get_u32(in, "classifier layer count");
  for (std::uint32_t i = 0; i < n_classifier; ++i) {
    ckpt.split.classifier_layers.push_back(static_cast<int>(get_u32(in, "classifier layer id")));
  }

  const std::uint32_t label_len = get_u32(in, "rng label length");
  ckpt.rng_label.resize(label_len);
  if (label_len > 0) get_bytes(in, ckpt.rng_label.data(), label_len, "rng label");

  const std::uint64_t n_values = get_u64(in, "value count");
  ckpt.params.layout = std::make_shared<ParamLayout>(make_layout(ckpt.spec));
  require(static_cast<std::uint64_t>(ckpt.params.layout->total_size()) == n_values, "checkpoint",
          "value count does not match the stored architecture");
  ckpt.params.values.resize(static_cast<Index>(n_values));
  for (std::uint64_t i = 0; i < n_values; ++i) {
    ckpt.params.values[static_cast<Index>(i)] = get_f64(in, "parameter value");
  }

  ckpt.spec.validate();
  ckpt.split.validate(ckpt.spec.n_layers());
  return ckpt;
}

}  // namespace pof
