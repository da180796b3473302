#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace aitlab {

// Growable bit string. Bit i is the i-th streamed bit; storage is 64-bit
// words, LSB-first within each word, which matches the on-disk packing
// (LSB-first within byte).
class BitString {
public:
    void clear() {
        words_.clear();
        size_ = 0;
    }
    std::size_t size() const { return size_; }
    bool empty() const { return size_ == 0; }

    void push_back(int bit) {
        if ((size_ & 63) == 0) words_.push_back(0);
        if (bit) words_.back() |= std::uint64_t{1} << (size_ & 63);
        ++size_;
    }

    // Appends bits 0..nbits-1 of `bits` (bit t lands at position size()+t).
    void append_word(std::uint64_t bits, int nbits);

    int bit(std::size_t i) const { return static_cast<int>((words_[i >> 6] >> (i & 63)) & 1); }

    std::uint64_t popcount() const;

    // First min(size, 64) bits packed LSB-first.
    std::uint64_t prefix64() const { return words_.empty() ? 0 : masked_word(0); }

    bool operator==(const BitString& o) const;
    bool starts_with(const BitString& prefix) const;

    std::string to_string() const;
    static BitString parse(std::string_view zeros_and_ones);

    // LSB-first within byte; final partial byte zero-padded.
    std::vector<std::uint8_t> to_bytes() const;

private:
    std::uint64_t masked_word(std::size_t w) const;

    std::vector<std::uint64_t> words_;
    std::size_t size_ = 0;
};

}  // namespace aitlab
