#pragma once

#include <cstdint>
#include <cmath>

#include <Eigen/Dense>

namespace bps {

// Counter-based generator (Philox 4x32-10). Each stream is identified by
// (seed, chain, role): chain typically indexes a replica, role separates the
// logical clocks inside one replica (refresh gaps, bounce thinning, velocity
// draws, ...) so that coupled constructions can share exactly the streams
// they are supposed to share. Streams never overlap: the 128-bit counter is
// split into a 64-bit block index and the 64-bit (chain, role) pair, and the
// key is the user seed.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint32_t chain, std::uint32_t role)
      : key0_(static_cast<std::uint32_t>(seed)),
        key1_(static_cast<std::uint32_t>(seed >> 32)),
        ctr2_(role), ctr3_(chain) {}

  std::uint64_t next_u64() {
    if (have_ & 1) { have_ &= ~1u; return buf_[1]; }
    gen_block();
    have_ |= 1;
    return buf_[0];
  }

  // uniform on [0, 1), 53-bit resolution
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // uniform on (0, 1]
  double uniform_pos() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  // Exp(1)
  double exponential() { return -std::log(uniform_pos()); }

  // N(0,1). Box-Muller, one value per draw (the sine branch is discarded so
  // every call consumes exactly two counter words; costs a little, keeps the
  // stream layout independent of call history).
  double normal() {
    double u1 = uniform_pos();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

  Eigen::VectorXd normal_vec(int d) {
    Eigen::VectorXd v(d);
    for (int i = 0; i < d; ++i) v[i] = normal();
    return v;
  }

 private:
  static void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
  }

  void gen_block() {
    std::uint32_t c0 = static_cast<std::uint32_t>(block_);
    std::uint32_t c1 = static_cast<std::uint32_t>(block_ >> 32);
    std::uint32_t c2 = ctr2_, c3 = ctr3_;
    std::uint32_t k0 = key0_, k1 = key1_;
    for (int round = 0; round < 10; ++round) {
      std::uint32_t hi0, lo0, hi1, lo1;
      mulhilo(0xD2511F53u, c0, hi0, lo0);
      mulhilo(0xCD9E8D57u, c2, hi1, lo1);
      std::uint32_t n0 = hi1 ^ c1 ^ k0;
      std::uint32_t n1 = lo1;
      std::uint32_t n2 = hi0 ^ c3 ^ k1;
      std::uint32_t n3 = lo0;
      c0 = n0; c1 = n1; c2 = n2; c3 = n3;
      k0 += 0x9E3779B9u;
      k1 += 0xBB67AE85u;
    }
    buf_[0] = (static_cast<std::uint64_t>(c1) << 32) | c0;
    buf_[1] = (static_cast<std::uint64_t>(c3) << 32) | c2;
    ++block_;
  }

  std::uint32_t key0_, key1_;
  std::uint32_t ctr2_, ctr3_;   // role, chain
  std::uint64_t block_ = 0;
  std::uint64_t buf_[2] = {0, 0};
  unsigned have_ = 0;
};

// Role ids used across the toolkit. Keeping them centralized avoids two
// different clocks accidentally drawing from the same stream.
namespace role {
constexpr std::uint32_t refresh_clock = 1;
constexpr std::uint32_t bounce = 2;
constexpr std::uint32_t velocity = 3;
constexpr std::uint32_t global_clock = 4;
constexpr std::uint32_t shared_budget = 5;    // coupled pairs: common exponential budgets
constexpr std::uint32_t shared_gauss = 6;     // coupled pairs: common Gaussian draws
constexpr std::uint32_t mc = 7;               // generic Monte Carlo helpers
constexpr std::uint32_t init = 8;             // initial state draws
constexpr std::uint32_t law_cache = 9;        // cached projection draws inside velocity laws
constexpr std::uint32_t bridge = 10;          // Brownian bridge crossing indicators
}  // namespace role

}  // namespace bps
