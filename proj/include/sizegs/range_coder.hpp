#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "sizegs/error.hpp"

namespace sizegs {

// Carryless byte-oriented range coder (Subbotin style). Cumulative frequency
// totals passed to encode/decode must stay below 2^16.
class RangeEncoder {
 public:
  explicit RangeEncoder(std::vector<std::uint8_t>& out) : out_(&out) {}

  void encode(std::uint32_t cum, std::uint32_t freq, std::uint32_t total) {
    range_ /= total;
    low_ += cum * range_;
    range_ *= freq;
    normalize();
  }

  void flush() {
    for (int i = 0; i < 4; ++i) {
      out_->push_back(static_cast<std::uint8_t>(low_ >> 24));
      low_ <<= 8;
    }
  }

 private:
  void normalize() {
    while ((low_ ^ (low_ + range_)) < kTop ||
           (range_ < kBottom && ((range_ = (0u - low_) & (kBottom - 1)), true))) {
      out_->push_back(static_cast<std::uint8_t>(low_ >> 24));
      low_ <<= 8;
      range_ <<= 8;
    }
  }

  static constexpr std::uint32_t kTop = 1u << 24;
  static constexpr std::uint32_t kBottom = 1u << 16;
  std::vector<std::uint8_t>* out_;
  std::uint32_t low_ = 0;
  std::uint32_t range_ = 0xFFFFFFFFu;
};

class RangeDecoder {
 public:
  explicit RangeDecoder(std::span<const std::uint8_t> data) : data_(data) {
    for (int i = 0; i < 4; ++i) code_ = (code_ << 8) | next_byte();
  }

  std::uint32_t decode_freq(std::uint32_t total) {
    range_ /= total;
    const std::uint32_t v = (code_ - low_) / range_;
    if (v >= total)
      fail(ErrorKind::corrupt_container, "range decoder frequency out of bounds");
    return v;
  }

  void decode_update(std::uint32_t cum, std::uint32_t freq) {
    low_ += cum * range_;
    range_ *= freq;
    while ((low_ ^ (low_ + range_)) < kTop ||
           (range_ < kBottom && ((range_ = (0u - low_) & (kBottom - 1)), true))) {
      code_ = (code_ << 8) | next_byte();
      low_ <<= 8;
      range_ <<= 8;
    }
  }

  std::size_t consumed() const { return pos_; }

 private:
  std::uint8_t next_byte() {
    if (pos_ >= data_.size())
      fail(ErrorKind::corrupt_container, "range-coded stream truncated");
    return data_[pos_++];
  }

  static constexpr std::uint32_t kTop = 1u << 24;
  static constexpr std::uint32_t kBottom = 1u << 16;
  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
  std::uint32_t low_ = 0;
  std::uint32_t range_ = 0xFFFFFFFFu;
  std::uint32_t code_ = 0;
};

// Adaptive order-0 model over bytes. A Fenwick tree keeps cumulative
// frequencies so per-symbol cost is O(log 256) on both sides.
class AdaptiveByteModel {
 public:
  AdaptiveByteModel() { reset(); }

  void reset() {
    freq_.fill(1);
    total_ = 256;
    rebuild();
  }

  void encode(RangeEncoder& enc, std::uint8_t symbol) {
    enc.encode(prefix(symbol), freq_[symbol], total_);
    bump(symbol);
  }

  std::uint8_t decode(RangeDecoder& dec) {
    const std::uint32_t v = dec.decode_freq(total_);
    std::uint32_t pos = 0;
    std::uint32_t rem = v;
    for (std::uint32_t bit = 256; bit != 0; bit >>= 1) {
      const std::uint32_t next = pos + bit;
      if (next <= 256 && tree_[next] <= rem) {
        pos = next;
        rem -= tree_[next];
      }
    }
    if (pos > 255) fail(ErrorKind::corrupt_container, "adaptive model symbol overflow");
    const auto symbol = static_cast<std::uint8_t>(pos);
    dec.decode_update(v - rem, freq_[symbol]);
    bump(symbol);
    return symbol;
  }

 private:
  std::uint32_t prefix(std::uint32_t i) const {  // sum of freq_[0 .. i-1]
    std::uint32_t s = 0;
    for (std::uint32_t j = i; j > 0; j -= j & (0u - j)) s += tree_[j];
    return s;
  }

  void add(std::uint32_t i, std::uint32_t d) {
    for (std::uint32_t j = i + 1; j <= 256; j += j & (0u - j)) tree_[j] += d;
  }

  void bump(std::uint8_t symbol) {
    freq_[symbol] += kIncrement;
    total_ += kIncrement;
    add(symbol, kIncrement);
    if (total_ >= kMaxTotal) {
      total_ = 0;
      for (auto& f : freq_) {
        f = (f + 1) >> 1;
        total_ += f;
      }
      rebuild();
    }
  }

  void rebuild() {
    tree_.fill(0);
    for (std::uint32_t s = 0; s < 256; ++s) add(s, freq_[s]);
  }

  static constexpr std::uint32_t kIncrement = 24;
  static constexpr std::uint32_t kMaxTotal = 1u << 15;
  std::array<std::uint32_t, 256> freq_{};
  std::array<std::uint32_t, 257> tree_{};
  std::uint32_t total_ = 0;
};

// One-shot helpers: compress a byte string with a fresh adaptive model.
inline std::vector<std::uint8_t> rc_encode_bytes(std::span<const std::uint8_t> data) {
  std::vector<std::uint8_t> out;
  out.reserve(data.size() / 2 + 16);
  RangeEncoder enc(out);
  AdaptiveByteModel model;
  for (std::uint8_t b : data) model.encode(enc, b);
  enc.flush();
  return out;
}

inline std::vector<std::uint8_t> rc_decode_bytes(std::span<const std::uint8_t> stream,
                                                 std::size_t count) {
  std::vector<std::uint8_t> out(count);
  RangeDecoder dec(stream);
  AdaptiveByteModel model;
  for (std::size_t i = 0; i < count; ++i) out[i] = model.decode(dec);
  return out;
}

}  // namespace sizegs
