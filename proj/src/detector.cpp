#include "watch/detector.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "watch/error.hpp"

namespace watch {

std::string_view eviction_name(Eviction e) noexcept {
  return e == Eviction::fifo ? "fifo" : "stop_adding";
}

std::optional<Eviction> parse_eviction(std::string_view name) noexcept {
  if (name == "stop_adding") return Eviction::stop_adding;
  if (name == "fifo") return Eviction::fifo;
  return std::nullopt;
}

void WatchConfig::validate() const {
  if (omega == 0) throw ConfigInvalid("omega must be at least 1");
  if (kappa < 2 * omega) {
    throw ConfigInvalid("kappa (" + std::to_string(kappa) +
                        ") must be at least 2 * omega (" +
                        std::to_string(2 * omega) + ")");
  }
  if (mu < kappa) {
    throw ConfigInvalid("mu (" + std::to_string(mu) +
                        ") must be at least kappa (" + std::to_string(kappa) + ")");
  }
  const std::size_t activation = omega * ((kappa + omega - 1) / omega);
  if (mu < activation) {
    throw ConfigInvalid("mu (" + std::to_string(mu) +
                        ") cannot hold the activation buffer of " +
                        std::to_string(activation) + " points");
  }
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw ConfigInvalid("epsilon must be a finite positive value");
  }
  distance.validate();
}

void DistributionBuffer::push_back(PointSet batch) {
  if (!batches_.empty() && batch.dim() != batches_.front().dim()) {
    throw InvalidInput("batch dimension differs from the buffer");
  }
  total_ += batch.size();
  batches_.push_back(std::move(batch));
}

void DistributionBuffer::pop_front() {
  if (batches_.empty()) return;
  total_ -= batches_.front().size();
  batches_.pop_front();
}

void DistributionBuffer::clear() noexcept {
  batches_.clear();
  total_ = 0;
}

PointSet DistributionBuffer::all_points() const {
  if (batches_.empty()) throw InvalidInput("buffer is empty");
  const std::vector<PointSet> parts(batches_.begin(), batches_.end());
  return concatenate(parts);
}

double compute_threshold(const DistributionBuffer& buffer, double epsilon,
                         const DistanceConfig& dcfg) {
  if (buffer.batch_count() < 2) {
    throw DegenerateBuffer("threshold needs at least two buffered batches");
  }
  const PointSet all = buffer.all_points();
  double worst = 0.0;
  for (const auto& batch : buffer.batches()) {
    worst = std::max(worst, sliced_wasserstein(batch, all, dcfg));
  }
  return epsilon * worst;
}

Detector::Detector(const WatchConfig& cfg) : cfg_(cfg) { cfg_.validate(); }

std::optional<ChangePoint> Detector::step(const PointSet& batch) {
  if (batch.size() != cfg_.omega) {
    throw InvalidInput("batch has " + std::to_string(batch.size()) +
                       " points, expected omega = " + std::to_string(cfg_.omega));
  }
  if (!projector_) {
    projector_.emplace(batch.dim(), cfg_.distance);
  } else if (batch.dim() != projector_->dim()) {
    throw InvalidInput("batch dimension " + std::to_string(batch.dim()) +
                       " differs from the stream dimension " +
                       std::to_string(projector_->dim()));
  }
  ++batches_seen_;
  samples_seen_ += batch.size();
  SortedSlices slices = projector_->project(batch);

  if (buffer_.total_points() < cfg_.kappa) {
    absorb(batch, std::move(slices));
    if (buffer_.total_points() >= cfg_.kappa) refresh_threshold();
    return std::nullopt;
  }

  const double distance = projector_->distance(slices, buffer_slices_);
  if (distance > *eta_) {
    ChangePoint cp{batches_seen_ * cfg_.omega, batches_seen_, distance, *eta_};
    emitted_.push_back(cp);
    buffer_.clear();
    batch_slices_.clear();
    eta_.reset();
    absorb(batch, std::move(slices));
    // kappa >= 2 * omega, so a single batch never re-activates detection.
    return cp;
  }

  switch (cfg_.eviction) {
    case Eviction::stop_adding:
      if (buffer_.total_points() + batch.size() <= cfg_.mu) {
        absorb(batch, std::move(slices));
        refresh_threshold();
      }
      break;
    case Eviction::fifo:
      absorb(batch, std::move(slices));
      while (buffer_.total_points() > cfg_.mu) {
        buffer_.pop_front();
        batch_slices_.pop_front();
      }
      buffer_slices_ = [&] {
        std::vector<const SortedSlices*> parts;
        for (const auto& s : batch_slices_) parts.push_back(&s);
        return SortedSlices::merge(parts);
      }();
      refresh_threshold();
      break;
  }
  return std::nullopt;
}

void Detector::absorb(PointSet batch, SortedSlices slices) {
  buffer_.push_back(std::move(batch));
  batch_slices_.push_back(std::move(slices));
  if (batch_slices_.size() == 1) {
    buffer_slices_ = batch_slices_.back();
  } else {
    const SortedSlices* parts[] = {&buffer_slices_, &batch_slices_.back()};
    buffer_slices_ = SortedSlices::merge(parts);
  }
}

void Detector::refresh_threshold() {
  double worst = 0.0;
  for (const auto& s : batch_slices_) {
    worst = std::max(worst, projector_->distance(s, buffer_slices_));
  }
  eta_ = cfg_.epsilon * worst;
}

std::vector<ChangePoint> process_series(const PointSet& series,
                                        const WatchConfig& cfg,
                                        std::optional<Deadline> deadline) {
  Detector detector(cfg);
  const std::size_t batches = series.size() / cfg.omega;
  for (std::size_t b = 0; b < batches; ++b) {
    if (deadline && std::chrono::steady_clock::now() > *deadline) {
      throw Timeout("deadline passed after " + std::to_string(b) + " of " +
                    std::to_string(batches) + " batches");
    }
    detector.step(series.slice(b * cfg.omega, cfg.omega));
  }
  return detector.change_points();
}

}  // namespace watch
