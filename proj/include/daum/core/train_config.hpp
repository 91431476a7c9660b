#pragma once

#include <cstddef>
#include <cstdint>

namespace daum {

struct TrainConfig {
  double learning_rate = 0.05;
  std::size_t epochs = 20;
  std::size_t batch_size = 256;
  std::uint64_t seed = 1;

  /// Throws ConfigError on a non-positive rate, epoch count or batch size.
  void validate() const;
};

}  // namespace daum
