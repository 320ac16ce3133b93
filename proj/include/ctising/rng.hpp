#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "ctising/errors.hpp"

namespace ctising {

// Counter-based 64-bit generator built on the splitmix64 finalizer.
//
// The generator is a pure function of (key, counter): output_i = mix(key + i*PHI).
// Streams are derived by hashing a parent key with one or more stream ids, so a
// single experiment seed splits reproducibly into per-line / per-chain / per-trial
// streams without any shared state.  All arithmetic is exact 64-bit, so the
// integer stream is identical on every platform.
class Rng {
  public:
    Rng() : Rng(0) {}
    explicit Rng(uint64_t key) : key_(key), counter_(0) {}

    static constexpr uint64_t kPhi = 0x9e3779b97f4a7c15ull;

    static uint64_t mix(uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ull;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebull;
        z ^= z >> 31;
        return z;
    }

    // Derive an independent stream from (key, id).  Chain for multi-part ids.
    static uint64_t derive(uint64_t key, uint64_t id) {
        return mix(key ^ (kPhi + id * 0xd1342543de82ef95ull));
    }
    static uint64_t derive(uint64_t key, uint64_t id1, uint64_t id2) {
        return derive(derive(key, id1), id2);
    }
    static uint64_t derive(uint64_t key, uint64_t id1, uint64_t id2, uint64_t id3) {
        return derive(derive(key, id1, id2), id3);
    }

    Rng substream(uint64_t id) const { return Rng(derive(key_, id)); }

    uint64_t next_u64() { return mix(key_ + (++counter_) * kPhi); }

    // Uniform on [0,1) with 53 random bits.
    double next_unit() { return double(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform on (0,1]; safe as a log argument.
    double next_unit_pos() { return double((next_u64() >> 11) + 1) * 0x1.0p-53; }

    double exponential(double rate) {
        if (rate <= 0.0) throw ContractError("exponential: rate must be > 0");
        return -std::log(next_unit_pos()) / rate;
    }

    // Standard normal via Box-Muller (one value per call; no cache, stays stateless).
    double normal() {
        double u = next_unit_pos();
        double v = next_unit();
        return std::sqrt(-2.0 * std::log(u)) * std::cos(6.283185307179586477 * v);
    }

    int sign() { return (next_u64() & 1u) ? +1 : -1; }

    // Index in [0, n).
    uint64_t below(uint64_t n) { return next_u64() % n; }

    // Poisson(mean) by counting exponential gaps; exact for the moderate means
    // used throughout (process heights times rates).
    uint64_t poisson(double mean) {
        if (mean < 0.0) throw ContractError("poisson: mean must be >= 0");
        if (mean == 0.0) return 0;
        uint64_t n = 0;
        double t = exponential(1.0);
        while (t <= mean) {
            ++n;
            t += exponential(1.0);
        }
        return n;
    }

    // Event times of a Poisson process with `rate` on (t0, t1), strictly increasing.
    // Coincident times at 64-bit resolution are rejected and redrawn.
    std::vector<double> poisson_times(double rate, double t0, double t1) {
        std::vector<double> out;
        if (rate < 0.0) throw ContractError("poisson_times: rate must be >= 0");
        if (rate == 0.0 || t1 <= t0) return out;
        double t = t0;
        for (;;) {
            double gap = exponential(rate);
            double next = t + gap;
            if (next >= t1) break;
            if (next <= t) continue;  // zero gap at float resolution: redraw
            out.push_back(next);
            t = next;
        }
        return out;
    }

    uint64_t key() const { return key_; }
    uint64_t counter() const { return counter_; }
    void set_counter(uint64_t c) { counter_ = c; }

  private:
    uint64_t key_;
    uint64_t counter_;
};

}  // namespace ctising
