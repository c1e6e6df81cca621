#pragma once

// Event streams to bit streams, von Neumann debiasing and stream statistics.

#include <algorithm>
#include <bit>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <sstream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qrng/errors.hpp"
#include "qrng/mc_sim.hpp"

namespace qrng::postproc {

/// Where a bit stream came from. Serialised as `key=value` pairs joined by ';'.
struct Provenance {
    std::string source;
    double mu = 0.0;
    std::uint64_t seed = 0;
    bool debiased = false;
    std::uint64_t raw_length = 0;  // input length consumed by the debiaser

    std::string to_text() const {
        std::ostringstream os;
        os.precision(17);
        os << "source=" << source << ";mu=" << mu << ";seed=" << seed << ";debiased=" << (debiased ? 1 : 0)
           << ";raw_length=" << raw_length;
        return os.str();
    }

    /// Unknown keys are ignored; malformed values keep their defaults.
    static Provenance from_text(std::string_view text) {
        Provenance p;
        std::size_t start = 0;
        while (start <= text.size()) {
            const std::size_t end = std::min(text.find(';', start), text.size());
            const std::string_view item = text.substr(start, end - start);
            const std::size_t eq = item.find('=');
            if (eq != std::string_view::npos) {
                const std::string key(item.substr(0, eq));
                const std::string value(item.substr(eq + 1));
                try {
                    if (key == "source") p.source = value;
                    else if (key == "mu") p.mu = std::stod(value);
                    else if (key == "seed") p.seed = std::stoull(value);
                    else if (key == "debiased") p.debiased = value == "1";
                    else if (key == "raw_length") p.raw_length = std::stoull(value);
                } catch (const std::exception&) {
                }
            }
            start = end + 1;
        }
        return p;
    }

    friend bool operator==(const Provenance&, const Provenance&) = default;
};

/// Packed bit sequence, most significant bit first within each byte; the
/// final byte is zero-padded.
class BitStream {
  public:
    BitStream() = default;
    explicit BitStream(Provenance provenance) : provenance_(std::move(provenance)) {}

    static BitStream from_bits(std::span<const std::uint8_t> bits, Provenance provenance = {}) {
        BitStream s(std::move(provenance));
        s.reserve(bits.size());
        for (std::uint8_t b : bits) {
            s.push_back(b != 0);
        }
        return s;
    }

    /// Builds from a string of '0' / '1' characters; anything else is rejected.
    static BitStream from_string(std::string_view text, Provenance provenance = {}) {
        BitStream s(std::move(provenance));
        s.reserve(text.size());
        for (char c : text) {
            if (c != '0' && c != '1') {
                throw DomainError("bit string may contain only '0' and '1'");
            }
            s.push_back(c == '1');
        }
        return s;
    }

    /// Adopts already packed bytes; bits beyond `length` are cleared.
    static BitStream from_packed(std::vector<std::uint8_t> packed, std::size_t length, Provenance provenance = {}) {
        if (packed.size() != (length + 7) / 8) {
            throw FormatError("packed byte count does not match the bit length");
        }
        BitStream s(std::move(provenance));
        s.packed_ = std::move(packed);
        s.length_ = length;
        if (length % 8 != 0) {
            s.packed_.back() &= static_cast<std::uint8_t>(0xFF << (8 - length % 8));
        }
        return s;
    }

    void reserve(std::size_t bits) { packed_.reserve((bits + 7) / 8); }

    void push_back(bool bit) {
        if (length_ % 8 == 0) {
            packed_.push_back(0);
        }
        if (bit) {
            packed_.back() |= static_cast<std::uint8_t>(0x80u >> (length_ % 8));
        }
        ++length_;
    }

    bool operator[](std::size_t i) const { return (packed_[i / 8] >> (7 - i % 8)) & 1u; }

    std::size_t size() const noexcept { return length_; }
    bool empty() const noexcept { return length_ == 0; }
    const std::vector<std::uint8_t>& packed() const noexcept { return packed_; }

    const Provenance& provenance() const noexcept { return provenance_; }
    Provenance& provenance() noexcept { return provenance_; }

    std::size_t count_ones() const {
        std::size_t ones = 0;
        for (std::uint8_t byte : packed_) {
            ones += static_cast<std::size_t>(std::popcount(byte));
        }
        return ones;
    }

    /// One byte (0 or 1) per bit for bits [first, first + count).
    std::vector<std::uint8_t> unpack(std::size_t first, std::size_t count) const {
        if (first > length_ || count > length_ - first) {
            throw DomainError("bit range lies outside the stream");
        }
        std::vector<std::uint8_t> out(count);
        for (std::size_t i = 0; i < count; ++i) {
            out[i] = (*this)[first + i] ? 1 : 0;
        }
        return out;
    }
    std::vector<std::uint8_t> unpack() const { return unpack(0, length_); }

    std::string to_string() const {
        std::string s(length_, '0');
        for (std::size_t i = 0; i < length_; ++i) {
            if ((*this)[i]) s[i] = '1';
        }
        return s;
    }

    friend bool operator==(const BitStream& a, const BitStream& b) {
        return a.length_ == b.length_ && a.packed_ == b.packed_ && a.provenance_ == b.provenance_;
    }

  private:
    std::vector<std::uint8_t> packed_;
    std::size_t length_ = 0;
    Provenance provenance_;
};

/// Bit0 -> 0, Bit1 -> 1; collisions and empty gates are dropped.
inline BitStream events_to_bits(std::span<const mc::Outcome> events, Provenance provenance = {}) {
    BitStream bits(std::move(provenance));
    for (mc::Outcome o : events) {
        if (o == mc::Outcome::Bit0) bits.push_back(false);
        else if (o == mc::Outcome::Bit1) bits.push_back(true);
    }
    return bits;
}

inline BitStream events_to_bits(std::span<const mc::EventRecord> events, Provenance provenance = {}) {
    BitStream bits(std::move(provenance));
    for (const auto& r : events) {
        if (r.outcome == mc::Outcome::Bit0) bits.push_back(false);
        else if (r.outcome == mc::Outcome::Bit1) bits.push_back(true);
    }
    return bits;
}

/// Any bit-stream to bit-stream transform can serve as a debiaser.
template <class D>
concept Debiaser = requires(const D& d, const BitStream& in) {
    { d(in) } -> std::convertible_to<BitStream>;
};

/// Incremental von Neumann extractor over non-overlapping pairs:
/// 01 -> 0, 10 -> 1, 00 and 11 -> nothing. Feeding a stream bit by bit gives
/// the same output as one call on the whole stream.
class VonNeumannExtractor {
  public:
    /// Returns the emitted bit, if the pair just completed produced one.
    std::optional<bool> feed(bool bit) {
        if (!has_pending_) {
            has_pending_ = true;
            pending_ = bit;
            return std::nullopt;
        }
        has_pending_ = false;
        if (pending_ == bit) {
            return std::nullopt;
        }
        return pending_;
    }

  private:
    bool has_pending_ = false;
    bool pending_ = false;
};

struct VonNeumann {
    BitStream operator()(const BitStream& in) const {
        Provenance prov = in.provenance();
        prov.debiased = true;
        prov.raw_length = in.size();
        BitStream out(std::move(prov));
        out.reserve(in.size() / 4);
        VonNeumannExtractor extractor;
        for (std::size_t i = 0; i < in.size(); ++i) {
            if (const auto bit = extractor.feed(in[i])) {
                out.push_back(*bit);
            }
        }
        return out;
    }
};

static_assert(Debiaser<VonNeumann>);

inline BitStream von_neumann(const BitStream& bits) { return VonNeumann{}(bits); }

struct StreamStats {
    std::size_t length = 0;
    std::size_t ones = 0;
    std::optional<double> ones_fraction;          // absent for an empty stream
    std::optional<double> extraction_efficiency;  // output / input length, debiased streams only
};

inline StreamStats stream_stats(const BitStream& bits) {
    StreamStats s;
    s.length = bits.size();
    s.ones = bits.count_ones();
    if (s.length > 0) {
        s.ones_fraction = static_cast<double>(s.ones) / static_cast<double>(s.length);
    }
    if (bits.provenance().debiased && bits.provenance().raw_length > 0) {
        s.extraction_efficiency =
            static_cast<double>(s.length) / static_cast<double>(bits.provenance().raw_length);
    }
    return s;
}

}  // namespace qrng::postproc
