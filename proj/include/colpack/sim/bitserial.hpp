// bitserial.hpp - one lane of the bit-serial multiplier-accumulator.
//
// Input words are 8-bit two's complement, LSB first. The multiplier works on
// |w| serial-parallel style; after the 8 input bits the latched sign bit is
// fed for the remaining cycles of the k-bit word, so the low k product bits
// are exact. The product is negated bit-serially when w < 0 (copy up to and
// including the first 1, invert afterwards) and added to the incoming k-bit
// accumulation stream with a one-bit full adder.
#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace colpack::sim {

class BitSerialMac {
 public:
  BitSerialMac() = default;
  BitSerialMac(std::int8_t weight, int acc_bits, int input_bits = 8);

  // Clears per-word state; call before bit 0 of every word.
  void reset();

  // Consumes one input bit and one accumulation bit, returns the output bit.
  // Past bit input_bits-1 the x_bit argument is ignored.
  int step(int x_bit, int y_bit);

  // Set at the word's final bit when the k-bit result differs from the exact
  // integer y + x*w.
  bool overflow() const noexcept { return overflow_; }
  int bits_done() const noexcept { return bit_; }
  std::int8_t weight() const noexcept { return weight_; }

 private:
  std::int8_t weight_ = 0;
  int magnitude_ = 0;
  bool negative_ = false;
  int acc_bits_ = 32;
  int input_bits_ = 8;

  int bit_ = 0;
  std::int64_t partial_ = 0;  // serial multiplier carry-save remainder
  int x_sign_ = 0;
  bool seen_one_ = false;     // negation state
  int carry_ = 0;             // adder carry
  bool overflow_ = false;
};

struct MacStreamResult {
  std::vector<std::int64_t> y_out;
  std::uint64_t cycles = 0;  // one bit per cycle: words * acc_bits
  bool overflow = false;
};

// Runs a whole stream of words through one lane: y_out[i] = y_in[i] + x[i]*w
// (mod 2^k, with `overflow` set if any word wrapped). y_in values must fit in
// acc_bits signed bits.
MacStreamResult bitserial_mac(std::span<const std::int8_t> x, std::int8_t w,
                              std::span<const std::int64_t> y_in, int acc_bits);

// Sign-extends the low `bits` bits of `raw`.
constexpr std::int64_t sign_extend(std::uint64_t raw, int bits) {
  const std::uint64_t mask = bits >= 64 ? ~0ull : ((1ull << bits) - 1);
  raw &= mask;
  if (bits < 64 && (raw >> (bits - 1)) & 1u) return static_cast<std::int64_t>(raw | ~mask);
  return static_cast<std::int64_t>(raw);
}

}  // namespace colpack::sim
