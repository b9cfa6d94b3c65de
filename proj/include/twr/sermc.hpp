#pragma once

#include <cstdint>

#include "twr/twria.hpp"

namespace twr {

enum class Detector { RegularizedZf, Mmse };

struct SerOptions {
  Detector detector = Detector::RegularizedZf;
  int batch_size = 1000;   // channel uses per RNG substream
  bool parallel = false;   // OpenMP across batches
};

/// Uncoded QPSK symbol error rate through the full MAC -> split -> BC
/// chain: per channel use every user sends d QPSK streams, the relay
/// splits, amplifies and forwards, and each receiver subtracts its own
/// self-interference, combines, equalizes the d x d effective channel
/// and slices. Deterministic for fixed (seed, state, channels), whether
/// run serial or parallel.
double simulate_ser(const SystemConfig& cfg, const ChannelSet& ch,
                    const TransceiverState& state, std::int64_t n_symbols,
                    std::uint64_t seed, const SerOptions& opt = {});

}  // namespace twr
