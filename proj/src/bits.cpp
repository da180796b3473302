#include "aitlab/bits.hpp"

#include <bit>
#include <stdexcept>

namespace aitlab {

void BitString::append_word(std::uint64_t bits, int nbits) {
    if (nbits < 0 || nbits > 64) throw std::invalid_argument("append_word: nbits out of range");
    if (nbits == 0) return;
    if (nbits < 64) bits &= (std::uint64_t{1} << nbits) - 1;
    int offset = static_cast<int>(size_ & 63);
    if (offset == 0) {
        words_.push_back(bits);
    } else {
        words_.back() |= bits << offset;
        if (offset + nbits > 64) words_.push_back(bits >> (64 - offset));
    }
    size_ += static_cast<std::size_t>(nbits);
}

std::uint64_t BitString::popcount() const {
    std::uint64_t total = 0;
    if (words_.empty()) return 0;
    for (std::size_t w = 0; w + 1 < words_.size(); ++w)
        total += static_cast<std::uint64_t>(std::popcount(words_[w]));
    total += static_cast<std::uint64_t>(std::popcount(masked_word(words_.size() - 1)));
    return total;
}

std::uint64_t BitString::masked_word(std::size_t w) const {
    std::uint64_t word = words_[w];
    std::size_t used = size_ - (w << 6);
    if (used < 64) word &= (std::uint64_t{1} << used) - 1;
    return word;
}

bool BitString::operator==(const BitString& o) const {
    if (size_ != o.size_) return false;
    for (std::size_t w = 0; w < words_.size(); ++w)
        if (masked_word(w) != o.masked_word(w)) return false;
    return true;
}

bool BitString::starts_with(const BitString& prefix) const {
    if (prefix.size_ > size_) return false;
    std::size_t full = prefix.size_ >> 6;
    for (std::size_t w = 0; w < full; ++w)
        if (words_[w] != prefix.words_[w]) return false;
    std::size_t rem = prefix.size_ & 63;
    if (rem) {
        std::uint64_t mask = (std::uint64_t{1} << rem) - 1;
        if ((words_[full] & mask) != (prefix.words_[full] & mask)) return false;
    }
    return true;
}

std::string BitString::to_string() const {
    std::string s;
    s.reserve(size_);
    for (std::size_t i = 0; i < size_; ++i) s.push_back(bit(i) ? '1' : '0');
    return s;
}

BitString BitString::parse(std::string_view text) {
    BitString b;
    for (char c : text) {
        if (c == '0')
            b.push_back(0);
        else if (c == '1')
            b.push_back(1);
        else
            throw std::invalid_argument("BitString: expected only '0'/'1'");
    }
    return b;
}

std::vector<std::uint8_t> BitString::to_bytes() const {
    std::vector<std::uint8_t> out((size_ + 7) / 8, 0);
    for (std::size_t w = 0; w < words_.size(); ++w) {
        std::uint64_t word = masked_word(w);
        for (std::size_t b = 0; b < 8 && (w << 3) + b < out.size(); ++b)
            out[(w << 3) + b] = static_cast<std::uint8_t>(word >> (8 * b));
    }
    return out;
}

}  // namespace aitlab
