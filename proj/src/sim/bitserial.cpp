#include "colpack/sim/bitserial.hpp"

#include <sstream>

#include "colpack/core/error.hpp"

namespace colpack::sim {

BitSerialMac::BitSerialMac(std::int8_t weight, int acc_bits, int input_bits)
    : weight_(weight),
      magnitude_(weight < 0 ? -static_cast<int>(weight) : weight),
      negative_(weight < 0),
      acc_bits_(acc_bits),
      input_bits_(input_bits) {
  if (acc_bits < input_bits || acc_bits > 62) {
    throw ConfigError("bit-serial MAC: acc_bits must lie in [input_bits, 62]");
  }
}

void BitSerialMac::reset() {
  bit_ = 0;
  partial_ = 0;
  x_sign_ = 0;
  seen_one_ = false;
  carry_ = 0;
  overflow_ = false;
}

int BitSerialMac::step(int x_bit, int y_bit) {
  const int b = bit_;
  int xb = x_bit & 1;
  if (b < input_bits_) {
    if (b == input_bits_ - 1) x_sign_ = xb;
  } else {
    xb = x_sign_;
  }

  // Serial-parallel multiply by |w|.
  const std::int64_t t = partial_ + static_cast<std::int64_t>(xb) * magnitude_;
  const int p = static_cast<int>(t & 1);
  partial_ = t >> 1;

  // Conditional negation.
  const int n = negative_ ? (p ^ static_cast<int>(seen_one_)) : p;
  const bool negation_wrapped = negative_ && p == 1 && n == 1 && !seen_one_;
  if (p) seen_one_ = true;

  // Serial add.
  const int yb = y_bit & 1;
  const int sum = yb ^ n ^ carry_;
  const int carry_out = (yb & n) | (yb & carry_) | (n & carry_);

  if (b == acc_bits_ - 1) {
    // Product fits in k bits iff the bits above k are a sign extension of p.
    const std::int64_t high = partial_ - (x_sign_ ? magnitude_ : 0);
    const bool product_fits = (high == 0 && p == 0) || (high == -1 && p == 1);
    const bool add_wrapped = carry_ != carry_out;
    overflow_ = !product_fits || negation_wrapped || add_wrapped;
  }
  carry_ = carry_out;
  ++bit_;
  return sum;
}

MacStreamResult bitserial_mac(std::span<const std::int8_t> x, std::int8_t w,
                              std::span<const std::int64_t> y_in, int acc_bits) {
  if (x.size() != y_in.size()) {
    throw ConfigError("bitserial_mac: x and y streams differ in length");
  }
  const std::int64_t lo = -(std::int64_t{1} << (acc_bits - 1));
  const std::int64_t hi = (std::int64_t{1} << (acc_bits - 1)) - 1;

  BitSerialMac mac(w, acc_bits);
  MacStreamResult result;
  result.y_out.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (y_in[i] < lo || y_in[i] > hi) {
      std::ostringstream msg;
      msg << "bitserial_mac: y_in " << y_in[i] << " does not fit in " << acc_bits
          << " bits";
      throw ConfigError(msg.str());
    }
    const auto xu = static_cast<std::uint8_t>(x[i]);
    const auto yu = static_cast<std::uint64_t>(y_in[i]);
    mac.reset();
    std::uint64_t raw = 0;
    for (int b = 0; b < acc_bits; ++b) {
      const int xb = b < 8 ? (xu >> b) & 1 : 0;
      const int yb = static_cast<int>((yu >> b) & 1u);
      raw |= static_cast<std::uint64_t>(mac.step(xb, yb)) << b;
      ++result.cycles;
    }
    result.overflow = result.overflow || mac.overflow();
    result.y_out.push_back(sign_extend(raw, acc_bits));
  }
  return result;
}

}  // namespace colpack::sim
