#pragma once

// Gate-synchronous Monte Carlo of the two-detector generator. Each gate:
// draw input photon numbers, route them through the splitter, thin each
// output mode photon by photon at its detector's efficiency, classify.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "qrng/detection.hpp"
#include "qrng/errors.hpp"
#include "qrng/fock_optics.hpp"
#include "qrng/random_stream.hpp"

namespace qrng::mc {

using fock::OccupationPair;
using fock::SourceKind;
using fock::SourceModel;
using random::KeyedStream;

/// One byte per gate on the event stream.
enum class Outcome : std::uint8_t { None = 0x00, Bit0 = 0x01, Bit1 = 0x02, Collision = 0x03 };

inline const char* to_string(Outcome o) {
    switch (o) {
        case Outcome::None: return "none";
        case Outcome::Bit0: return "bit0";
        case Outcome::Bit1: return "bit1";
        case Outcome::Collision: return "collision";
    }
    return "invalid";
}

struct EventRecord {
    std::uint64_t gate_index = 0;
    Outcome outcome = Outcome::None;

    friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

struct SimConfig {
    std::uint64_t seed = 0;
    std::uint64_t n_gates = 1;
    double mu = 1.0;  // mean total photons per gate at the splitter input
    SourceModel source = SourceModel::indistinguishable();
    detection::DetectorPair detectors{};
    double gate_rate = 100e3;  // Hz, reporting only
    std::uint64_t max_records_in_memory = std::uint64_t{1} << 26;

    void validate() const {
        if (n_gates < 1) {
            throw DomainError("simulation needs at least one gate");
        }
        if (!(mu > 0.0) || !std::isfinite(mu)) {
            std::ostringstream os;
            os << "mean photon number must be positive and finite, got " << mu;
            throw DomainError(os.str());
        }
        if (!(gate_rate > 0.0)) {
            throw DomainError("gate rate must be positive");
        }
        source.validate();
        detectors.validate();
    }
};

/// Per-class counts with empirical probabilities. Merging is associative
/// and commutative.
struct EventTally {
    std::array<std::uint64_t, 4> counts{};

    void add(Outcome o) noexcept { ++counts[static_cast<std::size_t>(o)]; }
    std::uint64_t count(Outcome o) const noexcept { return counts[static_cast<std::size_t>(o)]; }
    std::uint64_t n_gates() const noexcept { return counts[0] + counts[1] + counts[2] + counts[3]; }
    std::uint64_t valid() const noexcept { return count(Outcome::Bit0) + count(Outcome::Bit1); }

    double p_gen() const noexcept { return fraction(valid()); }
    double p_disc() const noexcept { return fraction(count(Outcome::Collision)); }
    double p_gen_stderr() const noexcept { return binomial_stderr(p_gen()); }
    double p_disc_stderr() const noexcept { return binomial_stderr(p_disc()); }

    EventTally& operator+=(const EventTally& other) noexcept {
        for (std::size_t i = 0; i < counts.size(); ++i) {
            counts[i] += other.counts[i];
        }
        return *this;
    }
    friend EventTally operator+(EventTally a, const EventTally& b) noexcept { return a += b; }
    friend bool operator==(const EventTally&, const EventTally&) = default;

    /// key=value summary, one per line.
    std::string to_text() const {
        std::ostringstream os;
        os.precision(9);
        os << "n_gates=" << n_gates() << '\n'
           << "none=" << count(Outcome::None) << '\n'
           << "bit0=" << count(Outcome::Bit0) << '\n'
           << "bit1=" << count(Outcome::Bit1) << '\n'
           << "collision=" << count(Outcome::Collision) << '\n'
           << "p_gen=" << p_gen() << '\n'
           << "p_gen_stderr=" << p_gen_stderr() << '\n'
           << "p_disc=" << p_disc() << '\n'
           << "p_disc_stderr=" << p_disc_stderr() << '\n';
        return os.str();
    }

  private:
    double fraction(std::uint64_t k) const noexcept {
        const auto n = n_gates();
        return n == 0 ? 0.0 : static_cast<double>(k) / static_cast<double>(n);
    }
    double binomial_stderr(double p) const noexcept {
        const auto n = n_gates();
        return n == 0 ? 0.0 : std::sqrt(p * (1.0 - p) / static_cast<double>(n));
    }
};

namespace detail {

/// Cumulative output distribution over the first output mode.
inline std::vector<double> cumulative(std::vector<double> p) {
    double acc = 0.0;
    for (auto& v : p) {
        acc += v;
        v = acc;
    }
    for (auto& v : p) {
        v /= acc;
    }
    return p;
}

inline std::vector<double> interference_cdf(OccupationPair input) {
    return cumulative(fock::bs_output_amplitudes(input).probabilities());
}

inline unsigned sample_from_cdf(const std::vector<double>& cdf, double u) {
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    return static_cast<unsigned>(std::min<std::ptrdiff_t>(it - cdf.begin(), static_cast<std::ptrdiff_t>(cdf.size()) - 1));
}

/// Number of `photons` fair coins that land heads.
inline unsigned fair_coin_heads(unsigned photons, KeyedStream& stream) {
    unsigned heads = 0;
    while (photons > 0) {
        const unsigned take = std::min(photons, 64u);
        std::uint64_t bits = stream();
        if (take < 64) {
            bits &= (std::uint64_t{1} << take) - 1;
        }
        heads += static_cast<unsigned>(std::popcount(bits));
        photons -= take;
    }
    return heads;
}

inline bool interferes(SourceKind kind) {
    switch (kind) {
        case SourceKind::IndistinguishablePair: return true;
        case SourceKind::SingleWCS:
        case SourceKind::DistinguishablePair: return false;
        case SourceKind::PartialMixture: break;
    }
    throw DomainError("splitter sampling needs a pure source kind; resolve mixtures per gate first");
}

}  // namespace detail

/// Inverse-CDF sampler for splitter outputs with the interference tables
/// precomputed for inputs up to `cached_max_total` photons. Larger inputs
/// are computed on demand.
class BeamSplitterSampler {
  public:
    explicit BeamSplitterSampler(unsigned cached_max_total = 0)
        : cached_max_total_(std::min(cached_max_total, fock::kMaxTotalPhotons)),
          cdfs_(fock::JointPhotonDistribution::table_size(cached_max_total_)) {
        for (unsigned t = 0; t <= cached_max_total_; ++t) {
            const auto row = fock::bs_output_row(t);
            for (unsigned m = 0; m <= t; ++m) {
                cdfs_[fock::JointPhotonDistribution::index({m, t - m})] = detail::cumulative(row[m].probabilities());
            }
        }
    }

    unsigned cached_max_total() const noexcept { return cached_max_total_; }

    OccupationPair sample(OccupationPair input, SourceKind kind, KeyedStream& stream) const {
        const unsigned total = input.total();
        if (detail::interferes(kind)) {
            const double u = stream.uniform();
            unsigned out_c = 0;
            if (total <= cached_max_total_) {
                out_c = detail::sample_from_cdf(cdfs_[fock::JointPhotonDistribution::index(input)], u);
            } else {
                out_c = detail::sample_from_cdf(detail::interference_cdf(input), u);
            }
            return {out_c, total - out_c};
        }
        // Independent 50/50 routing: a photon from a stays in c on heads,
        // a photon from b crosses to c on heads.
        const unsigned a_to_c = detail::fair_coin_heads(input.first, stream);
        const unsigned b_to_c = detail::fair_coin_heads(input.second, stream);
        const unsigned out_c = a_to_c + b_to_c;
        return {out_c, total - out_c};
    }

  private:
    unsigned cached_max_total_;
    std::vector<std::vector<double>> cdfs_;
};

/// Single draw from the splitter output for a pure (non-mixture) source kind.
inline OccupationPair sample_bs_outcome(OccupationPair input, SourceKind kind, KeyedStream& stream) {
    static const BeamSplitterSampler sampler(24);
    return sampler.sample(input, kind, stream);
}

/// Threshold click by independent per-photon Bernoulli(eta) thinning.
inline bool detector_clicks(unsigned photons, double eta, KeyedStream& stream) {
    for (unsigned i = 0; i < photons; ++i) {
        if (stream.bernoulli(eta)) {
            return true;
        }
    }
    return false;
}

inline Outcome classify(bool click_c, bool click_d) noexcept {
    if (click_c && click_d) return Outcome::Collision;
    if (click_c) return Outcome::Bit0;
    if (click_d) return Outcome::Bit1;
    return Outcome::None;
}

/// Photon numbers entering the splitter for one gate.
inline OccupationPair sample_input(const SimConfig& cfg, KeyedStream& stream) {
    if (cfg.source.kind == SourceKind::SingleWCS) {
        return {random::sample_poisson(cfg.mu, stream), 0};
    }
    const unsigned m = random::sample_poisson(0.5 * cfg.mu, stream);
    const unsigned n = random::sample_poisson(0.5 * cfg.mu, stream);
    return {m, n};
}

inline Outcome sample_gate(KeyedStream& stream, const SimConfig& cfg, const BeamSplitterSampler& sampler) {
    const OccupationPair input = sample_input(cfg, stream);
    SourceKind kind = cfg.source.kind;
    if (kind == SourceKind::PartialMixture) {
        kind = stream.bernoulli(cfg.source.overlap) ? SourceKind::IndistinguishablePair
                                                    : SourceKind::DistinguishablePair;
    }
    const OccupationPair out = sampler.sample(input, kind, stream);
    const bool click_c = detector_clicks(out.first, cfg.detectors.eta0, stream);
    const bool click_d = detector_clicks(out.second, cfg.detectors.eta1, stream);
    return classify(click_c, click_d);
}

struct RunResult {
    EventTally tally;
    std::vector<EventRecord> records;
};

class Simulator {
  public:
    explicit Simulator(SimConfig cfg) : cfg_(validated(cfg)), sampler_(cache_bound(cfg_)) {}

    const SimConfig& config() const noexcept { return cfg_; }

    /// Outcome of gate `gate_index`; a pure function of (seed, gate_index, config).
    Outcome sample_gate(std::uint64_t gate_index) const {
        KeyedStream stream(cfg_.seed, gate_index);
        return mc::sample_gate(stream, cfg_, sampler_);
    }

    /// Simulates gates [begin, end) and hands each record to `sink`.
    template <class Sink>
    EventTally run_range(std::uint64_t begin, std::uint64_t end, Sink&& sink) const {
        EventTally tally;
        for (std::uint64_t g = begin; g < end; ++g) {
            const Outcome o = sample_gate(g);
            tally.add(o);
            sink(EventRecord{g, o});
        }
        return tally;
    }

    template <class Sink>
    EventTally run_streaming(Sink&& sink) const {
        return run_range(0, cfg_.n_gates, std::forward<Sink>(sink));
    }

    EventTally tally_only() const {
        return run_range(0, cfg_.n_gates, [](const EventRecord&) {});
    }

    RunResult run() const { return run_parallel(1); }

    /// Splits [0, n_gates) into `workers` contiguous ranges, one thread each.
    /// Output is identical to the serial run.
    RunResult run_parallel(unsigned workers) const {
        if (cfg_.n_gates > cfg_.max_records_in_memory) {
            std::ostringstream os;
            os << "run of " << cfg_.n_gates << " gates exceeds the in-memory record budget of "
               << cfg_.max_records_in_memory << "; use streaming output";
            throw ResourceError(os.str());
        }
        workers = std::max(1u, workers);
        RunResult result;
        result.records.resize(cfg_.n_gates);
        std::vector<EventTally> tallies(workers);
        const std::uint64_t chunk = (cfg_.n_gates + workers - 1) / workers;
        auto work = [&](unsigned w) {
            const std::uint64_t begin = std::min<std::uint64_t>(w * chunk, cfg_.n_gates);
            const std::uint64_t end = std::min<std::uint64_t>(begin + chunk, cfg_.n_gates);
            tallies[w] = run_range(begin, end, [&](const EventRecord& r) { result.records[r.gate_index] = r; });
        };
        if (workers == 1) {
            work(0);
        } else {
            std::vector<std::jthread> threads;
            threads.reserve(workers);
            for (unsigned w = 0; w < workers; ++w) {
                threads.emplace_back(work, w);
            }
        }
        for (const auto& t : tallies) {
            result.tally += t;
        }
        return result;
    }

  private:
    static SimConfig validated(const SimConfig& cfg) {
        cfg.validate();
        return cfg;
    }

    static unsigned cache_bound(const SimConfig& cfg) {
        if (cfg.source.kind != SourceKind::IndistinguishablePair && cfg.source.kind != SourceKind::PartialMixture) {
            return 0;
        }
        return std::min(fock::truncation_bound(cfg.mu, {1e-12}), fock::kMaxTotalPhotons);
    }

    SimConfig cfg_;
    BeamSplitterSampler sampler_;
};

/// Writes one byte per gate (see Outcome) to `out`.
inline void write_event_bytes(std::ostream& out, std::span<const EventRecord> records) {
    std::vector<char> buffer;
    buffer.reserve(records.size());
    for (const auto& r : records) {
        buffer.push_back(static_cast<char>(r.outcome));
    }
    out.write(buffer.data(), static_cast<std::streamsize>(buffer.size()));
}

/// Sink for Simulator::run_streaming that writes the event byte stream.
class EventByteWriter {
  public:
    explicit EventByteWriter(std::ostream& out) : out_(out) {}
    ~EventByteWriter() { flush(); }
    EventByteWriter(const EventByteWriter&) = delete;
    EventByteWriter& operator=(const EventByteWriter&) = delete;

    void operator()(const EventRecord& r) {
        buffer_.push_back(static_cast<char>(r.outcome));
        if (buffer_.size() >= (1u << 16)) {
            flush();
        }
    }

    void flush() {
        out_.write(buffer_.data(), static_cast<std::streamsize>(buffer_.size()));
        buffer_.clear();
    }

  private:
    std::ostream& out_;
    std::vector<char> buffer_;
};

inline std::vector<Outcome> read_event_bytes(std::span<const std::uint8_t> bytes) {
    std::vector<Outcome> out;
    out.reserve(bytes.size());
    for (std::uint8_t b : bytes) {
        if (b > 0x03) {
            throw FormatError("event stream contains an invalid byte");
        }
        out.push_back(static_cast<Outcome>(b));
    }
    return out;
}

}  // namespace qrng::mc
