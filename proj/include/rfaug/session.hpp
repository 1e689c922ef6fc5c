// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <shared_mutex>
#include <string>
#include <vector>

#include "rfaug/run_config.hpp"

namespace rfaug {

/// Result handed across a language boundary: contiguous row-major RGB.
struct AugmentedBuffer {
  std::vector<std::uint8_t> rgb;  ///< height * width * 3 bytes
  int height = 0;
  int width = 0;
  std::string label;
  bool augmented = false;
};

/// Handle behind the training-loop binding: open(root, config) ->
/// augment(index, epoch) / size() -> close(). Concurrent augment() calls
/// are allowed; close() waits for them and invalidates the handle.
class AugmentSession {
public:
  /// `config_path` may be empty for built-in defaults.
  static std::unique_ptr<AugmentSession> open(const std::filesystem::path& root,
                                              const std::filesystem::path& config_path);
  explicit AugmentSession(const RunConfig& cfg);
  ~AugmentSession();

  std::size_t size() const;
  /// Throws ClosedHandle or IndexOutOfRange.
  AugmentedBuffer augment(std::size_t index, std::uint64_t epoch) const;
  void close();
  bool is_open() const;

private:
  struct State;
  mutable std::shared_mutex mutex_;
  std::unique_ptr<State> state_;
};

AugmentedBuffer to_buffer(const AugmentResult& r);

}  // namespace rfaug
