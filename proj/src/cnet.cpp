#include "tilefix/cnet.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numeric>

#include "tilefix/rng.hpp"

namespace tilefix {

namespace {

constexpr std::size_t kW1Size = static_cast<std::size_t>(kHidden1) * kInputDim;
constexpr std::size_t kW2Size = static_cast<std::size_t>(kHidden2) * kHidden1;
constexpr std::size_t kW3Size = static_cast<std::size_t>(kOutputDim) * kHidden2;

struct Activations {
  std::array<double, kHidden1> a1;
  std::array<double, kHidden2> a2;
  std::array<double, kOutputDim> logits;
  std::array<double, kOutputDim> probs;
};

// Exploits the one-hot structure: layer 1 only touches the 8 active columns
// plus the height column.
void run_forward(const CNet& net, const EncodedInput& x, Activations& act) {
  std::array<int, 8> cols;
  for (int slot = 0; slot < 8; ++slot) {
    cols[static_cast<std::size_t>(slot)] =
        slot * kChannelCount + x.channels[static_cast<std::size_t>(slot)];
  }
  for (int j = 0; j < kHidden1; ++j) {
    const double* row = net.w1.data() + static_cast<std::size_t>(j) * kInputDim;
    double z = net.b1[static_cast<std::size_t>(j)] + row[kInputDim - 1] * x.height_value;
    for (int col : cols) {
      z += row[col];
    }
    act.a1[static_cast<std::size_t>(j)] = std::tanh(z);
  }
  for (int j = 0; j < kHidden2; ++j) {
    const double* row = net.w2.data() + static_cast<std::size_t>(j) * kHidden1;
    double z = net.b2[static_cast<std::size_t>(j)];
    for (int i = 0; i < kHidden1; ++i) {
      z += row[i] * act.a1[static_cast<std::size_t>(i)];
    }
    act.a2[static_cast<std::size_t>(j)] = std::tanh(z);
  }
  for (int k = 0; k < kOutputDim; ++k) {
    const double* row = net.w3.data() + static_cast<std::size_t>(k) * kHidden2;
    double z = net.b3[static_cast<std::size_t>(k)];
    for (int j = 0; j < kHidden2; ++j) {
      z += row[j] * act.a2[static_cast<std::size_t>(j)];
    }
    act.logits[static_cast<std::size_t>(k)] = z;
  }
  const double zmax = *std::max_element(act.logits.begin(), act.logits.end());
  double sum = 0.0;
  for (int k = 0; k < kOutputDim; ++k) {
    const double e = std::exp(act.logits[static_cast<std::size_t>(k)] - zmax);
    act.probs[static_cast<std::size_t>(k)] = e;
    sum += e;
  }
  for (double& p : act.probs) {
    p /= sum;
  }
}

double loss_from_logits(const Activations& act, tile_t label) {
  const double zmax = *std::max_element(act.logits.begin(), act.logits.end());
  double sum = 0.0;
  for (double z : act.logits) {
    sum += std::exp(z - zmax);
  }
  return zmax + std::log(sum) - act.logits[label];
}

struct Deltas {
  std::array<double, kOutputDim> d3;
  std::array<double, kHidden2> d2;
  std::array<double, kHidden1> d1;
};

void run_backward_deltas(const CNet& net, const Activations& act, tile_t label, Deltas& d) {
  for (int k = 0; k < kOutputDim; ++k) {
    d.d3[static_cast<std::size_t>(k)] =
        act.probs[static_cast<std::size_t>(k)] - (k == label ? 1.0 : 0.0);
  }
  for (int j = 0; j < kHidden2; ++j) {
    double sum = 0.0;
    for (int k = 0; k < kOutputDim; ++k) {
      sum += net.w3[static_cast<std::size_t>(k) * kHidden2 + j] * d.d3[static_cast<std::size_t>(k)];
    }
    const double a = act.a2[static_cast<std::size_t>(j)];
    d.d2[static_cast<std::size_t>(j)] = sum * (1.0 - a * a);
  }
  for (int i = 0; i < kHidden1; ++i) {
    double sum = 0.0;
    for (int j = 0; j < kHidden2; ++j) {
      sum += net.w2[static_cast<std::size_t>(j) * kHidden1 + i] * d.d2[static_cast<std::size_t>(j)];
    }
    const double a = act.a1[static_cast<std::size_t>(i)];
    d.d1[static_cast<std::size_t>(i)] = sum * (1.0 - a * a);
  }
}

}  // namespace

EncodedInput encode_input(const SurroundingInfo& s, int level_height, bool normalize) {
  if (level_height < 1) {
    throw std::invalid_argument("encode_input: level height must be >= 1");
  }
  EncodedInput x;
  x.channels = s.neighbors;
  x.height_value = normalize
                       ? static_cast<double>(s.center_height) / std::max(level_height - 1, 1)
                       : static_cast<double>(s.center_height);
  return x;
}

CNet CNet::random_init(std::uint64_t seed) {
  CNet net;
  net.rng_seed = seed;
  Rng rng(seed);
  const auto xavier = [&rng](std::vector<double>& w, int fan_in, int fan_out, std::size_t n) {
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    w.resize(n);
    for (double& v : w) {
      v = (rng.uniform_real() * 2.0 - 1.0) * limit;
    }
  };
  xavier(net.w1, kInputDim, kHidden1, kW1Size);
  xavier(net.w2, kHidden1, kHidden2, kW2Size);
  xavier(net.w3, kHidden2, kOutputDim, kW3Size);
  net.b1.assign(kHidden1, 0.0);
  net.b2.assign(kHidden2, 0.0);
  net.b3.assign(kOutputDim, 0.0);
  return net;
}

CNet CNet::zero_init() {
  CNet net;
  net.w1.assign(kW1Size, 0.0);
  net.w2.assign(kW2Size, 0.0);
  net.w3.assign(kW3Size, 0.0);
  net.b1.assign(kHidden1, 0.0);
  net.b2.assign(kHidden2, 0.0);
  net.b3.assign(kOutputDim, 0.0);
  return net;
}

int effective_level_height(const CNet& net, const Level& level) {
  return net.trained_level_height > 0 ? static_cast<int>(net.trained_level_height)
                                      : level.height();
}

EncodedInput encode_for_net(const CNet& net, const SurroundingInfo& s, int level_height) {
  return encode_input(s, level_height, net.normalize_height);
}

std::array<double, kOutputDim> forward(const CNet& net, const EncodedInput& x) {
  Activations act;
  run_forward(net, x, act);
  return act.probs;
}

double loss_of(const CNet& net, const EncodedInput& x, tile_t label) {
  if (label >= kOutputDim) {
    throw std::invalid_argument("loss_of: label out of range");
  }
  Activations act;
  run_forward(net, x, act);
  return loss_from_logits(act, label);
}

Gradients Gradients::zeros() {
  Gradients g;
  g.w1.assign(kW1Size, 0.0);
  g.w2.assign(kW2Size, 0.0);
  g.w3.assign(kW3Size, 0.0);
  g.b1.assign(kHidden1, 0.0);
  g.b2.assign(kHidden2, 0.0);
  g.b3.assign(kOutputDim, 0.0);
  return g;
}

Gradients backprop(const CNet& net, const EncodedInput& x, tile_t label) {
  Activations act;
  Deltas d;
  run_forward(net, x, act);
  run_backward_deltas(net, act, label, d);

  Gradients g = Gradients::zeros();
  for (int k = 0; k < kOutputDim; ++k) {
    g.b3[static_cast<std::size_t>(k)] = d.d3[static_cast<std::size_t>(k)];
    double* row = g.w3.data() + static_cast<std::size_t>(k) * kHidden2;
    for (int j = 0; j < kHidden2; ++j) {
      row[j] = d.d3[static_cast<std::size_t>(k)] * act.a2[static_cast<std::size_t>(j)];
    }
  }
  for (int j = 0; j < kHidden2; ++j) {
    g.b2[static_cast<std::size_t>(j)] = d.d2[static_cast<std::size_t>(j)];
    double* row = g.w2.data() + static_cast<std::size_t>(j) * kHidden1;
    for (int i = 0; i < kHidden1; ++i) {
      row[i] = d.d2[static_cast<std::size_t>(j)] * act.a1[static_cast<std::size_t>(i)];
    }
  }
  for (int i = 0; i < kHidden1; ++i) {
    g.b1[static_cast<std::size_t>(i)] = d.d1[static_cast<std::size_t>(i)];
    double* row = g.w1.data() + static_cast<std::size_t>(i) * kInputDim;
    for (int slot = 0; slot < 8; ++slot) {
      row[slot * kChannelCount + x.channels[static_cast<std::size_t>(slot)]] =
          d.d1[static_cast<std::size_t>(i)];
    }
    row[kInputDim - 1] = d.d1[static_cast<std::size_t>(i)] * x.height_value;
  }
  return g;
}

double gradient_error_vs_fd(const CNet& net, const EncodedInput& x, tile_t label,
                            const Gradients& analytic) {
  constexpr double kStep = 1e-5;
  constexpr double kScaleGuard = 1e-6;

  CNet probe = net;  // perturbed in place, restored after each probe
  double worst = 0.0;

  const auto check = [&](std::vector<double>& params, const std::vector<double>& grads,
                         std::size_t idx) {
    const double saved = params[idx];
    params[idx] = saved + kStep;
    const double up = loss_of(probe, x, label);
    params[idx] = saved - kStep;
    const double down = loss_of(probe, x, label);
    params[idx] = saved;
    const double numeric = (up - down) / (2.0 * kStep);
    const double a = grads[idx];
    const double err = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric),
                                                         kScaleGuard});
    worst = std::max(worst, err);
  };

  const auto sweep = [&](std::vector<double>& params, const std::vector<double>& grads,
                         std::size_t stride) {
    for (std::size_t i = 0; i < params.size(); i += stride) {
      check(params, grads, i);
    }
  };

  // Every bias, strided weights, plus the columns layer 1 actually reads for
  // this input on a couple of rows.
  sweep(probe.b1, analytic.b1, 1);
  sweep(probe.b2, analytic.b2, 1);
  sweep(probe.b3, analytic.b3, 1);
  sweep(probe.w1, analytic.w1, 131);
  sweep(probe.w2, analytic.w2, 61);
  sweep(probe.w3, analytic.w3, 7);
  for (int row : {0, kHidden1 / 2}) {
    const std::size_t base = static_cast<std::size_t>(row) * kInputDim;
    for (int slot = 0; slot < 8; ++slot) {
      check(probe.w1, analytic.w1,
            base + static_cast<std::size_t>(slot * kChannelCount +
                                            x.channels[static_cast<std::size_t>(slot)]));
    }
    check(probe.w1, analytic.w1, base + kInputDim - 1);
  }
  return worst;
}

double gradient_check(const CNet& net, const EncodedInput& x, tile_t label) {
  return gradient_error_vs_fd(net, x, label, backprop(net, x, label));
}

TrainingReport train(CNet& net, const TrainingSet& ts, const TrainingConfig& config) {
  if (ts.samples.empty()) {
    throw std::invalid_argument("train: empty training set");
  }
  if (config.epochs < 1) {
    throw std::invalid_argument("train: epochs must be >= 1");
  }

  net.trained_level_height = static_cast<std::uint32_t>(ts.max_level_height);

  const std::size_t n = ts.samples.size();
  std::vector<EncodedInput> inputs;
  std::vector<tile_t> labels;
  inputs.reserve(n);
  labels.reserve(n);
  for (const Combination& comb : ts.samples) {
    inputs.push_back(encode_for_net(net, surrounding_of(comb), ts.max_level_height));
    labels.push_back(comb.center());
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(config.seed);

  TrainingReport report;
  report.mean_loss.reserve(static_cast<std::size_t>(config.epochs));
  report.accuracy.reserve(static_cast<std::size_t>(config.epochs));

  Activations act;
  Deltas d;
  const double lr = config.learning_rate;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    double loss_sum = 0.0;
    std::size_t correct = 0;
    for (std::size_t pos : order) {
      const EncodedInput& x = inputs[pos];
      const tile_t label = labels[pos];
      run_forward(net, x, act);
      loss_sum += loss_from_logits(act, label);
      const auto pred = std::distance(
          act.probs.begin(), std::max_element(act.probs.begin(), act.probs.end()));
      correct += (pred == label);
      run_backward_deltas(net, act, label, d);

      for (int k = 0; k < kOutputDim; ++k) {
        const double dk = d.d3[static_cast<std::size_t>(k)];
        net.b3[static_cast<std::size_t>(k)] -= lr * dk;
        double* row = net.w3.data() + static_cast<std::size_t>(k) * kHidden2;
        for (int j = 0; j < kHidden2; ++j) {
          row[j] -= lr * dk * act.a2[static_cast<std::size_t>(j)];
        }
      }
      for (int j = 0; j < kHidden2; ++j) {
        const double dj = d.d2[static_cast<std::size_t>(j)];
        net.b2[static_cast<std::size_t>(j)] -= lr * dj;
        double* row = net.w2.data() + static_cast<std::size_t>(j) * kHidden1;
        for (int i = 0; i < kHidden1; ++i) {
          row[i] -= lr * dj * act.a1[static_cast<std::size_t>(i)];
        }
      }
      for (int i = 0; i < kHidden1; ++i) {
        const double di = d.d1[static_cast<std::size_t>(i)];
        net.b1[static_cast<std::size_t>(i)] -= lr * di;
        double* row = net.w1.data() + static_cast<std::size_t>(i) * kInputDim;
        for (int slot = 0; slot < 8; ++slot) {
          row[slot * kChannelCount + x.channels[static_cast<std::size_t>(slot)]] -= lr * di;
        }
        row[kInputDim - 1] -= lr * di * x.height_value;
      }
    }
    const double mean = loss_sum / static_cast<double>(n);
    if (!std::isfinite(mean)) {
      throw std::runtime_error("train: non-finite loss at epoch " + std::to_string(epoch + 1));
    }
    report.mean_loss.push_back(mean);
    report.accuracy.push_back(static_cast<double>(correct) / static_cast<double>(n));
  }

  std::size_t correct = 0;
  for (std::size_t i = 0; i < n; ++i) {
    run_forward(net, inputs[i], act);
    const auto pred =
        std::distance(act.probs.begin(), std::max_element(act.probs.begin(), act.probs.end()));
    correct += (pred == labels[i]);
  }
  report.final_accuracy = static_cast<double>(correct) / static_cast<double>(n);
  return report;
}

std::string training_report_csv(const TrainingReport& report) {
  std::string out = "epoch,mean_loss,train_accuracy\n";
  char buf[96];
  for (std::size_t i = 0; i < report.mean_loss.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g\n", i + 1, report.mean_loss[i],
                  report.accuracy[i]);
    out += buf;
  }
  return out;
}

namespace {

constexpr std::uint32_t kMagic = 0x54454E43;  // "CNET" little-endian
constexpr std::uint32_t kVersion = 1;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) {
    out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
}

void put_f64(std::vector<std::uint8_t>& out, double v) {
  put_u64(out, std::bit_cast<std::uint64_t>(v));
}

struct Reader {
  std::span<const std::uint8_t> bytes;
  std::size_t pos = 0;

  void need(std::size_t n) const {
    if (pos + n > bytes.size()) {
      throw ModelIoError(ModelIoError::Kind::CorruptModel, "model file truncated");
    }
  }

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<std::uint32_t>(bytes[pos++]) << (8 * i);
    }
    return v;
  }

  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
      v |= static_cast<std::uint64_t>(bytes[pos++]) << (8 * i);
    }
    return v;
  }

  double f64() { return std::bit_cast<double>(u64()); }
};

}  // namespace

std::vector<std::uint8_t> save_model(const CNet& net) {
  std::vector<std::uint8_t> out;
  out.reserve(64 + 8 * (kW1Size + kW2Size + kW3Size + kHidden1 + kHidden2 + kOutputDim));
  put_u32(out, kMagic);
  put_u32(out, kVersion);
  out.push_back(net.normalize_height ? 1 : 0);
  put_u32(out, net.trained_level_height);
  put_u64(out, net.rng_seed);
  put_u32(out, 3);  // layer count
  const auto layer = [&](int in, int n_out, const std::vector<double>& w,
                         const std::vector<double>& b) {
    put_u32(out, static_cast<std::uint32_t>(in));
    put_u32(out, static_cast<std::uint32_t>(n_out));
    for (double v : w) {
      put_f64(out, v);
    }
    for (double v : b) {
      put_f64(out, v);
    }
  };
  layer(kInputDim, kHidden1, net.w1, net.b1);
  layer(kHidden1, kHidden2, net.w2, net.b2);
  layer(kHidden2, kOutputDim, net.w3, net.b3);
  return out;
}

CNet load_model(std::span<const std::uint8_t> bytes) {
  Reader r{bytes};
  if (r.u32() != kMagic) {
    throw ModelIoError(ModelIoError::Kind::CorruptModel, "bad model magic");
  }
  const std::uint32_t version = r.u32();
  if (version != kVersion) {
    throw ModelIoError(ModelIoError::Kind::FormatVersionMismatch,
                       "unsupported model version " + std::to_string(version));
  }
  CNet net;
  r.need(1);
  net.normalize_height = r.bytes[r.pos++] != 0;
  net.trained_level_height = r.u32();
  net.rng_seed = r.u64();
  if (r.u32() != 3) {
    throw ModelIoError(ModelIoError::Kind::CorruptModel, "unexpected layer count");
  }
  const auto layer = [&](int in, int n_out, std::vector<double>& w, std::vector<double>& b) {
    if (r.u32() != static_cast<std::uint32_t>(in) ||
        r.u32() != static_cast<std::uint32_t>(n_out)) {
      throw ModelIoError(ModelIoError::Kind::CorruptModel, "unexpected layer dimensions");
    }
    w.resize(static_cast<std::size_t>(in) * n_out);
    for (double& v : w) {
      v = r.f64();
    }
    b.resize(static_cast<std::size_t>(n_out));
    for (double& v : b) {
      v = r.f64();
    }
  };
  layer(kInputDim, kHidden1, net.w1, net.b1);
  layer(kHidden1, kHidden2, net.w2, net.b2);
  layer(kHidden2, kOutputDim, net.w3, net.b3);
  if (r.pos != bytes.size()) {
    throw ModelIoError(ModelIoError::Kind::CorruptModel, "trailing bytes in model file");
  }
  return net;
}

void save_model_file(const CNet& net, const std::filesystem::path& path) {
  const auto bytes = save_model(net);
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write model file: " + path.string());
  }
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

CNet load_model_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open model file: " + path.string());
  }
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return load_model(bytes);
}

}  // namespace tilefix
