#include "rlvi/rng.hpp"

namespace rlvi {

namespace {
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
constexpr std::uint64_t kStreamSalt = 0xd1b54a32d192ed03ULL;
}  // namespace

std::uint64_t mix64(std::uint64_t x) noexcept {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_(mix64(seed ^ mix64(stream * kStreamSalt + kGolden))) {}

CounterRng::result_type CounterRng::operator()() {
  ++counter_;
  return mix64(key_ + counter_ * kGolden);
}

CounterRng CounterRng::split(std::uint64_t stream) const {
  return CounterRng(mix64(key_ ^ mix64((stream + 1) * kStreamSalt)), 0, true);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept {
  return CounterRng(base).split(index).key();
}

}  // namespace rlvi
