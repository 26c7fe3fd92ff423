#ifndef LBA_RNG_HPP
#define LBA_RNG_HPP

#include <cstdint>
#include <initializer_list>
#include <random>

namespace lba {

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}
}  // namespace detail

// Deterministic keyed RNG substream. Every independent unit of work
// (iteration, subject, particle, ...) owns a stream derived from the master
// seed and its keys, so results do not depend on how work is scheduled
// across threads.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(detail::splitmix64(seed)) {}

  RngStream(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) {
    std::uint64_t h = detail::splitmix64(seed);
    for (std::uint64_t k : keys) h = detail::splitmix64(h ^ (k + 0x9e3779b97f4a7c15ULL));
    engine_.seed(h);
  }

  std::mt19937_64& engine() { return engine_; }

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }
  double gamma(double shape, double scale = 1.0) {
    return std::gamma_distribution<double>(shape, scale)(engine_);
  }
  double chi_squared(double dof) { return std::chi_squared_distribution<double>(dof)(engine_); }
  // Inverse gamma with shape a and scale b: x = b / Gamma(a, 1).
  double inverse_gamma(double shape, double scale) { return scale / gamma(shape, 1.0); }

 private:
  std::mt19937_64 engine_;
};

// Stream factory bound to a master seed; hands out keyed substreams.
class RngFactory {
 public:
  explicit RngFactory(std::uint64_t seed) : seed_(seed) {}
  RngStream stream(std::initializer_list<std::uint64_t> keys) const {
    return RngStream(seed_, keys);
  }
  // A factory for a nested scope (one SMC move, one replicate, ...); its
  // streams are disjoint from the parent's for distinct key paths.
  RngFactory derived(std::initializer_list<std::uint64_t> keys) const {
    std::uint64_t h = detail::splitmix64(seed_ ^ 0xa5a5a5a5a5a5a5a5ULL);
    for (std::uint64_t k : keys) h = detail::splitmix64(h ^ (k + 0x9e3779b97f4a7c15ULL));
    return RngFactory(h);
  }
  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
};

}  // namespace lba

#endif
