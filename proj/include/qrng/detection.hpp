#pragma once

// Threshold-detector model and per-gate outcome probabilities. Channel 0
// watches output mode c (bit 0), channel 1 watches mode d (bit 1). Dark
// counts are not modelled.

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qrng/errors.hpp"
#include "qrng/fock_optics.hpp"

namespace qrng::detection {

struct DetectorPair {
    double eta0 = 1.0;
    double eta1 = 1.0;

    static DetectorPair symmetric(double eta) { return {eta, eta}; }

    void validate() const {
        auto check = [](double eta, const char* name) {
            if (!(eta >= 0.0 && eta <= 1.0)) {
                std::ostringstream os;
                os << "detector efficiency " << name << " must lie in [0,1], got " << eta;
                throw DomainError(os.str());
            }
        };
        check(eta0, "eta0");
        check(eta1, "eta1");
    }
};

/// Probability that a threshold detector of efficiency eta clicks on an
/// i-photon state: 1 - (1 - eta)^i.
inline double click_probability(double eta, unsigned photons) {
    if (photons == 0) {
        return 0.0;
    }
    return -std::expm1(photons * std::log1p(-eta));
}

/// The four single-click contributions to the generation probability, kept
/// apart so each can be checked on its own.
struct GenerationTerms {
    double only_c_occupied = 0.0;    // sum_M P(M,0) eta_M
    double c_clicks_d_silent = 0.0;  // sum_{M,N>=1} P(M,N) eta_M (1 - eta_N)
    double only_d_occupied = 0.0;    // sum_N P(0,N) eta_N
    double d_clicks_c_silent = 0.0;  // sum_{M,N>=1} P(M,N) (1 - eta_M) eta_N

    double bit0() const { return only_c_occupied + c_clicks_d_silent; }
    double bit1() const { return only_d_occupied + d_clicks_c_silent; }
    double total() const { return bit0() + bit1(); }
};

struct OutcomeProbabilities {
    double p_gen = 0.0;
    double p_disc = 0.0;
    double p_none = 0.0;
    double p_bit0 = 0.0;  // unconditional probability of emitting bit 0

    /// Conditional probability that a valid bit is 0.
    double p_bit0_given_valid() const {
        if (!(p_gen > 0.0)) {
            throw DomainError("bit bias undefined: generation probability is zero");
        }
        return p_bit0 / p_gen;
    }
};

inline GenerationTerms generation_terms(const fock::JointPhotonDistribution& dist, const DetectorPair& det) {
    det.validate();
    GenerationTerms terms;
    dist.for_each([&](fock::OccupationPair occ, double p) {
        const double click_c = click_probability(det.eta0, occ.first);
        const double click_d = click_probability(det.eta1, occ.second);
        if (occ.first >= 1 && occ.second == 0) {
            terms.only_c_occupied += p * click_c;
        } else if (occ.first == 0 && occ.second >= 1) {
            terms.only_d_occupied += p * click_d;
        } else if (occ.first >= 1 && occ.second >= 1) {
            terms.c_clicks_d_silent += p * click_c * (1.0 - click_d);
            terms.d_clicks_c_silent += p * (1.0 - click_c) * click_d;
        }
    });
    return terms;
}

/// sum_{M,N>=1} P(M,N) eta_M eta_N
inline double coincidence_probability(const fock::JointPhotonDistribution& dist, const DetectorPair& det) {
    det.validate();
    double sum = 0.0;
    dist.for_each([&](fock::OccupationPair occ, double p) {
        if (occ.first >= 1 && occ.second >= 1) {
            sum += p * click_probability(det.eta0, occ.first) * click_probability(det.eta1, occ.second);
        }
    });
    return sum;
}

/// Generation, discard and no-click probabilities. Probability mass lost to
/// truncation is counted as no-click.
inline OutcomeProbabilities outcome_probabilities(const fock::JointPhotonDistribution& dist,
                                                  const DetectorPair& det) {
    if (dist.truncation_mass() < 0.999) {
        throw DomainError("outcome_probabilities: distribution holds less than 99.9% of the mass");
    }
    const GenerationTerms terms = generation_terms(dist, det);
    OutcomeProbabilities out;
    out.p_gen = terms.total();
    out.p_bit0 = terms.bit0();
    out.p_disc = coincidence_probability(dist, det);
    out.p_none = std::clamp(1.0 - out.p_gen - out.p_disc, 0.0, 1.0);
    return out;
}

/// Compares the unfolded computation (distribution at mu, detectors eta)
/// with the folded one (distribution at mu*eta, perfect detectors) and
/// returns the largest component-wise difference.
inline double folding_equivalence_check(double mu, double eta, fock::SourceModel source,
                                        fock::TruncationPolicy policy = {fock::kFineTailMass}) {
    if (!(eta > 0.0 && eta <= 1.0)) {
        std::ostringstream os;
        os << "folding_equivalence_check: eta must lie in (0,1], got " << eta;
        throw DomainError(os.str());
    }
    const auto unfolded =
        outcome_probabilities(fock::output_joint_distribution(source, mu, policy), DetectorPair::symmetric(eta));
    const auto folded =
        outcome_probabilities(fock::output_joint_distribution(source, mu * eta, policy), DetectorPair::symmetric(1.0));
    return std::max({std::abs(unfolded.p_gen - folded.p_gen), std::abs(unfolded.p_disc - folded.p_disc),
                     std::abs(unfolded.p_none - folded.p_none), std::abs(unfolded.p_bit0 - folded.p_bit0)});
}

/// Raw bit rate for a gate frequency in Hz.
inline double throughput(double p_gen, double gate_rate) {
    if (!(gate_rate > 0.0)) {
        throw DomainError("throughput: gate rate must be positive");
    }
    return p_gen * gate_rate;
}

}  // namespace qrng::detection

namespace qrng::fock {

/// 1 - P_cc(source) / P_cc(distinguishable): the fractional suppression of
/// coincidences relative to the no-interference case. Uses a fine truncation
/// by default so the ratio is meaningful at small mu.
inline double coincidence_contrast(double mu_eff, SourceModel source = SourceModel::indistinguishable(),
                                   const detection::DetectorPair& det = {},
                                   TruncationPolicy policy = {kFineTailMass}) {
    detail::require_positive_mu(mu_eff, "coincidence_contrast");
    const double reference =
        detection::coincidence_probability(output_joint_distribution(SourceModel::distinguishable(), mu_eff, policy), det);
    if (!(reference > 1e-300) || !std::isnormal(reference)) {
        std::ostringstream os;
        os << "coincidence_contrast: distinguishable coincidence probability underflows at mu=" << mu_eff;
        throw RangeError(os.str());
    }
    const double observed = detection::coincidence_probability(output_joint_distribution(source, mu_eff, policy), det);
    return std::clamp(1.0 - observed / reference, 0.0, 1.0);
}

}  // namespace qrng::fock
