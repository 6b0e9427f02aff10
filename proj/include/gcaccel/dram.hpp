#pragma once

#include <cstdint>
#include <deque>
#include <string>
#include <vector>

namespace gcaccel {

struct DramConfig {
  /// Bytes per GE cycle; <= 0 means unlimited.
  double bandwidth_bytes_per_cycle = 35.2;
  std::uint32_t base_latency_cycles = 100;
  std::uint32_t burst_bytes = 64;

  bool unlimited() const { return bandwidth_bytes_per_cycle <= 0.0; }

  /// DDR4-4400, 35.2 GB/s at a 1 GHz GE clock.
  static DramConfig ddr4() { return {35.2, 100, 64}; }
  /// HBM2 PHY, 512 GB/s at a 1 GHz GE clock.
  static DramConfig hbm2() { return {512.0, 100, 64}; }
  static DramConfig unlimited_bandwidth(std::uint32_t latency = 100) { return {0.0, latency, 64}; }
};

/*! \brief Token-bucket DRAM channel with round-robin stream arbitration.
 *
 * Each cycle the bucket gains bandwidth_bytes_per_cycle (capped at
 * max(bandwidth, burst)). Streams are visited round-robin from the one after
 * the last issuer; a stream's head request issues if the bucket covers its
 * size, otherwise arbitration stops for the cycle. A request completes
 * base_latency_cycles after issue.
 */
class DramModel {
public:
  struct Completion {
    std::size_t stream;
    std::uint64_t tag;
    std::uint32_t bytes;
  };

  /// Supplies the head request of each stream.
  class Client {
  public:
    virtual ~Client() = default;
    /// Size of the stream's next request, 0 when it has nothing to send.
    virtual std::uint32_t pending_bytes(std::size_t stream) = 0;
    /// Called when the head request issues; returns a tag echoed at completion.
    virtual std::uint64_t issued(std::size_t stream, std::uint32_t bytes) = 0;
  };

  explicit DramModel(const DramConfig& cfg, std::size_t num_streams = 0);

  std::size_t add_stream() { return num_streams_++; }
  std::size_t num_streams() const { return num_streams_; }

  /// Advances one GE cycle; returns transfers that complete at or before `cycle`.
  std::vector<Completion> tick(std::uint64_t cycle, Client& client);

  bool idle() const { return inflight_.empty(); }
  std::uint64_t bytes_issued() const { return bytes_issued_; }
  std::size_t inflight() const { return inflight_.size(); }

private:
  struct Inflight {
    std::uint64_t done;
    Completion c;
  };

  DramConfig cfg_;
  std::size_t num_streams_ = 0;
  std::size_t rr_ = 0;
  double tokens_ = 0.0;
  std::uint64_t bytes_issued_ = 0;
  std::deque<Inflight> inflight_;  // done cycles are non-decreasing (fixed latency)
};

}  // namespace gcaccel
