#include "gcaccel/dram.hpp"

#include <algorithm>
#include <stdexcept>

namespace gcaccel {

DramModel::DramModel(const DramConfig& cfg, std::size_t num_streams)
    : cfg_(cfg), num_streams_(num_streams) {
  if (cfg_.burst_bytes == 0) throw std::invalid_argument("burst size must be positive");
}

std::vector<DramModel::Completion> DramModel::tick(std::uint64_t cycle, Client& client) {
  const bool unlimited = cfg_.unlimited();
  if (!unlimited) {
    const double cap = std::max(cfg_.bandwidth_bytes_per_cycle, double(cfg_.burst_bytes));
    tokens_ = std::min(cap, tokens_ + cfg_.bandwidth_bytes_per_cycle);
  }

  if (num_streams_ > 0) {
    std::size_t idle_visits = 0;
    std::size_t s = rr_;
    while (idle_visits < num_streams_) {
      const std::uint32_t bytes = client.pending_bytes(s);
      if (bytes == 0) {
        ++idle_visits;
        s = (s + 1) % num_streams_;
        continue;
      }
      if (bytes > cfg_.burst_bytes) throw std::logic_error("DRAM request larger than a burst");
      if (!unlimited && tokens_ + 1e-9 < double(bytes)) break;
      if (!unlimited) tokens_ -= bytes;
      const std::uint64_t tag = client.issued(s, bytes);
      bytes_issued_ += bytes;
      inflight_.push_back({cycle + cfg_.base_latency_cycles, {s, tag, bytes}});
      idle_visits = 0;
      s = (s + 1) % num_streams_;
      rr_ = s;
    }
  }

  std::vector<Completion> done;
  while (!inflight_.empty() && inflight_.front().done <= cycle) {
    done.push_back(inflight_.front().c);
    inflight_.pop_front();
  }
  return done;
}

}  // namespace gcaccel
