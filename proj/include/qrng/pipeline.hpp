#pragma once

// End-to-end generation: simulate gates, keep valid detections as bits,
// optionally debias, write the bit file(s) and summarise the run.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include "qrng/battery.hpp"
#include "qrng/bitfile.hpp"
#include "qrng/detection.hpp"
#include "qrng/errors.hpp"
#include "qrng/mc_sim.hpp"
#include "qrng/postproc.hpp"

namespace qrng::pipeline {

struct GenerateOptions {
    mc::SimConfig sim;                         // sim.n_gates is used unless target_bits is set
    std::optional<std::uint64_t> target_bits;  // run until this many output bits exist
    bool debias = false;
    std::filesystem::path out;                 // binary bit file; empty to skip
    std::filesystem::path ascii_out;           // ASCII '0'/'1' export; empty to skip
    std::filesystem::path events_out;          // one byte per gate; empty to skip
    std::uint64_t max_gates = 10'000'000'000ULL;
};

struct GenerateSummary {
    fock::SourceModel source;
    double mu = 0.0;
    detection::DetectorPair detectors;
    std::uint64_t seed = 0;
    double gate_rate = 0.0;
    bool debiased = false;
    mc::EventTally tally;
    std::uint64_t raw_bits = 0;
    postproc::StreamStats output;
    std::optional<detection::OutcomeProbabilities> analytic;

    double raw_throughput() const { return detection::throughput(tally.p_gen(), gate_rate); }
    double output_throughput() const {
        const auto n = tally.n_gates();
        return n == 0 ? 0.0 : gate_rate * static_cast<double>(output.length) / static_cast<double>(n);
    }

    /// key=value lines.
    std::string to_text() const {
        std::ostringstream os;
        os << std::setprecision(9);
        os << "source=" << source.name() << '\n'
           << "mu=" << mu << '\n'
           << "eta0=" << detectors.eta0 << '\n'
           << "eta1=" << detectors.eta1 << '\n'
           << "seed=" << seed << '\n'
           << "debiased=" << (debiased ? 1 : 0) << '\n'
           << tally.to_text();
        if (analytic) {
            os << "analytic_p_gen=" << analytic->p_gen << '\n' << "analytic_p_disc=" << analytic->p_disc << '\n';
        }
        os << "raw_bits=" << raw_bits << '\n' << "output_bits=" << output.length << '\n';
        if (output.ones_fraction) os << "ones_fraction=" << *output.ones_fraction << '\n';
        if (output.extraction_efficiency) os << "extraction_efficiency=" << *output.extraction_efficiency << '\n';
        os << "gate_rate_hz=" << gate_rate << '\n'
           << "raw_throughput_bps=" << raw_throughput() << '\n'
           << "output_throughput_bps=" << output_throughput() << '\n';
        return os.str();
    }

    /// The same pairs as a two-column "key,value" table.
    std::string to_csv() const {
        std::istringstream in(to_text());
        std::ostringstream os;
        os << "key,value\n";
        std::string line;
        while (std::getline(in, line)) {
            const auto eq = line.find('=');
            os << line.substr(0, eq) << ',' << line.substr(eq + 1) << '\n';
        }
        return os.str();
    }
};

struct GenerateResult {
    postproc::BitStream bits;
    GenerateSummary summary;
};

inline GenerateResult generate(const GenerateOptions& opt) {
    mc::SimConfig cfg = opt.sim;
    if (opt.target_bits) {
        if (*opt.target_bits == 0) throw DomainError("requested bit count must be positive");
        cfg.n_gates = opt.max_gates;
    }
    const mc::Simulator sim(cfg);

    std::unique_ptr<std::ofstream> events_file;
    std::optional<mc::EventByteWriter> events;
    if (!opt.events_out.empty()) {
        events_file = std::make_unique<std::ofstream>(opt.events_out, std::ios::binary | std::ios::trunc);
        if (!*events_file) throw IoError("cannot open '" + opt.events_out.string() + "' for writing");
        events.emplace(*events_file);
    }

    postproc::Provenance prov{cfg.source.name(), cfg.mu, cfg.seed, opt.debias, 0};
    postproc::BitStream bits(prov);
    postproc::VonNeumannExtractor extractor;
    GenerateSummary summary;
    std::uint64_t raw = 0;

    for (std::uint64_t g = 0; g < cfg.n_gates; ++g) {
        if (opt.target_bits && bits.size() >= *opt.target_bits) break;
        const mc::Outcome o = sim.sample_gate(g);
        summary.tally.add(o);
        if (events) (*events)(mc::EventRecord{g, o});
        if (o != mc::Outcome::Bit0 && o != mc::Outcome::Bit1) continue;
        const bool bit = o == mc::Outcome::Bit1;
        ++raw;
        if (!opt.debias) {
            bits.push_back(bit);
        } else if (const auto out = extractor.feed(bit)) {
            bits.push_back(*out);
        }
    }
    if (opt.target_bits && bits.size() < *opt.target_bits) {
        throw ResourceError("gate limit reached before the requested number of bits was produced");
    }
    if (events) {
        events->flush();
        if (!*events_file) throw IoError("error while writing '" + opt.events_out.string() + "'");
    }
    if (opt.debias) bits.provenance().raw_length = raw;

    summary.source = cfg.source;
    summary.mu = cfg.mu;
    summary.detectors = cfg.detectors;
    summary.seed = cfg.seed;
    summary.gate_rate = cfg.gate_rate;
    summary.debiased = opt.debias;
    summary.raw_bits = raw;
    summary.output = postproc::stream_stats(bits);
    try {
        summary.analytic =
            detection::outcome_probabilities(fock::output_joint_distribution(cfg.source, cfg.mu), cfg.detectors);
    } catch (const Error&) {
        summary.analytic.reset();
    }

    if (!opt.out.empty()) bitfile::write_binary(opt.out, bits);
    if (!opt.ascii_out.empty()) bitfile::write_ascii(opt.ascii_out, bits);
    return {std::move(bits), std::move(summary)};
}

/// Runs the battery on a bit file in either supported format.
inline randtests::TestReport test_file(const std::filesystem::path& path, const randtests::BatteryConfig& cfg) {
    return randtests::run_battery(bitfile::read(path), cfg);
}

}  // namespace qrng::pipeline
