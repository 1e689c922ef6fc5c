// SPDX-License-Identifier: Apache-2.0

#include "rfaug/session.hpp"

#include <cstring>
#include <mutex>

namespace rfaug {

struct AugmentSession::State {
  DatasetIndex index;
  std::unique_ptr<Augmenter> augmenter;
};

AugmentedBuffer to_buffer(const AugmentResult& r) {
  AugmentedBuffer b;
  b.width = r.image.width();
  b.height = r.image.height();
  b.rgb.resize(static_cast<std::size_t>(b.width) * b.height * 3);
  static_assert(sizeof(Rgb) == 3);
  std::memcpy(b.rgb.data(), r.image.pixels().data(), b.rgb.size());
  b.label = r.label;
  b.augmented = r.augmented;
  return b;
}

std::unique_ptr<AugmentSession> AugmentSession::open(const std::filesystem::path& root,
                                                     const std::filesystem::path& config_path) {
  std::optional<RunConfigPatch> file;
  if (!config_path.empty()) file = read_config_file(config_path);
  RunConfigPatch flags;
  flags.root = root.string();
  return std::make_unique<AugmentSession>(resolve_run_config(file, flags));
}

AugmentSession::AugmentSession(const RunConfig& cfg) : state_(std::make_unique<State>()) {
  cfg.validate();
  state_->index = load_dataset(cfg.root, {}, cfg.load);
  state_->augmenter = std::make_unique<Augmenter>(state_->index, cfg.pairing, cfg.policy,
                                                  cfg.compose, cfg.workers);
}

AugmentSession::~AugmentSession() = default;

std::size_t AugmentSession::size() const {
  std::shared_lock lock(mutex_);
  if (!state_) throw Error(ErrorCode::ClosedHandle, "session is closed");
  return state_->index.size();
}

AugmentedBuffer AugmentSession::augment(std::size_t index, std::uint64_t epoch) const {
  std::shared_lock lock(mutex_);
  if (!state_) throw Error(ErrorCode::ClosedHandle, "session is closed");
  return to_buffer(state_->augmenter->augment(index, epoch));
}

void AugmentSession::close() {
  std::unique_lock lock(mutex_);
  state_.reset();
}

bool AugmentSession::is_open() const {
  std::shared_lock lock(mutex_);
  return state_ != nullptr;
}

}  // namespace rfaug
