#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "tilefix/corpus.hpp"
#include "tilefix/level.hpp"

namespace tilefix {

inline constexpr int kInputDim = 97;   // 8 slots x 12 channels + height
inline constexpr int kHidden1 = 100;
inline constexpr int kHidden2 = 50;
inline constexpr int kOutputDim = kTileCount;

// Network input in its natural sparse form: one active channel per neighbor
// slot plus the height scalar. Exactly the 8-slot one-hot cube the dense view
// expands to, so the one-hot invariant holds by construction.
struct EncodedInput {
  std::array<tile_t, 8> channels{};  // each in [0, 12)
  double height_value = 0.0;

  std::array<double, kInputDim> to_dense() const {
    std::array<double, kInputDim> dense{};
    for (int slot = 0; slot < 8; ++slot) {
      dense[static_cast<std::size_t>(slot * kChannelCount +
                                     channels[static_cast<std::size_t>(slot)])] = 1.0;
    }
    dense[kInputDim - 1] = height_value;
    return dense;
  }
};

// `normalize` divides the height by max(level_height - 1, 1) so it lands in
// [0, 1]; the raw variant feeds the row index unscaled.
EncodedInput encode_input(const SurroundingInfo& s, int level_height, bool normalize = true);

// 97 -> 100 -> 50 -> 11 perceptron with tanh hidden layers and a softmax
// head. Weight matrices are row-major [out][in].
struct CNet {
  std::vector<double> w1, b1, w2, b2, w3, b3;
  bool normalize_height = true;
  std::uint32_t trained_level_height = 0;  // 0 until trained
  std::uint64_t rng_seed = 0;

  // Xavier-uniform weights, zero biases, reproducible from the seed.
  static CNet random_init(std::uint64_t seed);
  static CNet zero_init();
};

// Height divisor consistency: a trained net keeps using the height scale it
// was trained with even when the inspected level is a different size.
int effective_level_height(const CNet& net, const Level& level);

EncodedInput encode_for_net(const CNet& net, const SurroundingInfo& s, int level_height);

// Softmax probabilities over the 11 concrete types; sums to 1.
std::array<double, kOutputDim> forward(const CNet& net, const EncodedInput& x);

// Cross-entropy of the softmax output against the center label, computed in
// log-sum-exp form so it stays finite for any logits.
double loss_of(const CNet& net, const EncodedInput& x, tile_t label);

struct Gradients {
  std::vector<double> w1, b1, w2, b2, w3, b3;
  static Gradients zeros();
};

Gradients backprop(const CNet& net, const EncodedInput& x, tile_t label);

// Max relative error between `analytic` and central finite differences
// (step 1e-5) over a fixed deterministic parameter sample that always
// includes every bias and the leading weights of each matrix.
double gradient_error_vs_fd(const CNet& net, const EncodedInput& x, tile_t label,
                            const Gradients& analytic);

double gradient_check(const CNet& net, const EncodedInput& x, tile_t label);

struct TrainingConfig {
  int epochs = 4000;
  double learning_rate = 0.01;
  std::uint64_t seed = 0;
};

struct TrainingReport {
  // One entry per epoch. Accuracy is measured online, on each sample's
  // prediction just before its update.
  std::vector<double> mean_loss;
  std::vector<double> accuracy;
  double final_accuracy = 0.0;  // full pass over the training set afterwards
};

// Plain SGD, batch size 1, sample order reshuffled each epoch from the seed.
// Throws if the loss goes non-finite.
TrainingReport train(CNet& net, const TrainingSet& ts, const TrainingConfig& config);

std::string training_report_csv(const TrainingReport& report);

struct ModelIoError : std::runtime_error {
  enum class Kind { CorruptModel, FormatVersionMismatch };

  ModelIoError(Kind k, const std::string& message) : std::runtime_error(message), kind(k) {}

  Kind kind;
};

// Versioned little-endian binary blob; load(save(net)) is bit-exact.
std::vector<std::uint8_t> save_model(const CNet& net);
CNet load_model(std::span<const std::uint8_t> bytes);
void save_model_file(const CNet& net, const std::filesystem::path& path);
CNet load_model_file(const std::filesystem::path& path);

}  // namespace tilefix
