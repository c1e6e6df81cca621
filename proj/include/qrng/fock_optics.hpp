#pragma once

// Photon-number statistics at the two output ports of a symmetric (50/50)
// beam splitter fed by phase-randomised weak coherent states.
//
// Port convention: inputs a, b; outputs c, d. A photon entering a leaves
// through c with amplitude 1/sqrt(2) and through d with amplitude j/sqrt(2);
// a photon entering b leaves through c with j/sqrt(2) and d with 1/sqrt(2).
// OccupationPair.first always refers to a / c, .second to b / d.

#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <compare>
#include <complex>
#include <cstddef>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "qrng/errors.hpp"

namespace qrng::fock {

/// Largest total photon number the amplitude tables accept.
inline constexpr unsigned kMaxTotalPhotons = 160;

/// Default truncation: keep at least 99.9% of the Poisson mass.
inline constexpr double kDefaultTailMass = 1e-3;

/// Tail mass used where results must be insensitive to truncation at the 1e-12 level.
inline constexpr double kFineTailMass = 1e-15;

struct OccupationPair {
    unsigned first = 0;
    unsigned second = 0;

    constexpr unsigned total() const noexcept { return first + second; }
    friend constexpr auto operator<=>(const OccupationPair&, const OccupationPair&) = default;
};

namespace detail {

inline const std::vector<long double>& log_factorial_table() {
    static const std::vector<long double> table = [] {
        std::vector<long double> t(2 * kMaxTotalPhotons + 2, 0.0L);
        for (std::size_t i = 1; i < t.size(); ++i) {
            t[i] = t[i - 1] + std::log(static_cast<long double>(i));
        }
        return t;
    }();
    return table;
}

inline long double log_factorial(unsigned n) {
    const auto& table = log_factorial_table();
    if (n < table.size()) {
        return table[n];
    }
    return std::lgamma(static_cast<long double>(n) + 1.0L);
}

inline void require_positive_mu(double mu, const char* what) {
    if (!(mu > 0.0) || !std::isfinite(mu)) {
        std::ostringstream os;
        os << what << ": mean photon number must be positive and finite, got " << mu;
        throw DomainError(os.str());
    }
}

}  // namespace detail

/// Output state of the splitter for one Fock input, as amplitudes over the
/// kets |M, total-M>. Dense in M because photon number is conserved.
class AmplitudeMap {
  public:
    explicit AmplitudeMap(unsigned total) : amplitudes_(total + 1) {}

    unsigned total() const noexcept { return static_cast<unsigned>(amplitudes_.size() - 1); }
    std::size_t size() const noexcept { return amplitudes_.size(); }

    /// Amplitude of |out>; zero for kets with a different total photon number.
    std::complex<double> at(OccupationPair out) const {
        if (out.total() != total()) {
            return {};
        }
        return amplitudes_[out.first];
    }

    std::complex<double>& by_first(unsigned first) { return amplitudes_.at(first); }
    const std::complex<double>& by_first(unsigned first) const { return amplitudes_.at(first); }

    double norm() const {
        double sum = 0.0;
        for (const auto& a : amplitudes_) {
            sum += std::norm(a);
        }
        return sum;
    }

    /// |amplitude|^2 indexed by photons in the first output mode.
    std::vector<double> probabilities() const {
        std::vector<double> p(amplitudes_.size());
        for (std::size_t i = 0; i < p.size(); ++i) {
            p[i] = std::norm(amplitudes_[i]);
        }
        return p;
    }

  private:
    std::vector<std::complex<double>> amplitudes_;
};

/// Joint pmf of the two input modes: two independent Poisson(mu/2) counts,
/// e^{-mu} mu^{m+n} / (m! n! 2^{m+n}).
inline double poisson_pair_pmf(double mu, OccupationPair occ) {
    detail::require_positive_mu(mu, "poisson_pair_pmf");
    const long double t = occ.total();
    const long double log_p = -static_cast<long double>(mu) + t * std::log(static_cast<long double>(mu)) -
                              detail::log_factorial(occ.first) - detail::log_factorial(occ.second) -
                              t * std::log(2.0L);
    return static_cast<double>(std::exp(log_p));
}

namespace detail {

using BigInt = boost::multiprecision::int256_t;

/// Coefficients of (x - 1)^m (x + 1)^n by power of x. Exact; |values| stay
/// below 2^160 for the supported photon numbers.
inline std::vector<BigInt> split_polynomial(unsigned m, unsigned n) {
    std::vector<BigInt> p{1};
    auto multiply = [&](int constant) {
        p.push_back(0);
        for (std::size_t k = p.size() - 1; k > 0; --k) p[k] = p[k - 1] + constant * p[k];
        p[0] *= constant;
    };
    for (unsigned i = 0; i < m; ++i) multiply(-1);
    for (unsigned i = 0; i < n; ++i) multiply(1);
    return p;
}

/// (x - 1)^m (x + 1)^n  ->  (x - 1)^(m-1) (x + 1)^(n+1), in place.
inline void move_factor_to_second(std::vector<BigInt>& p) {
    p.push_back(0);
    for (std::size_t k = p.size() - 1; k > 0; --k) p[k] += p[k - 1];
    // Exact division by (x - 1), highest power first.
    const std::size_t deg = p.size() - 1;
    std::vector<BigInt> q(deg);
    q[deg - 1] = p[deg];
    for (std::size_t k = deg - 1; k > 0; --k) q[k - 1] = p[k] + q[k];
    p = std::move(q);
}

/// Amplitudes from the polynomial coefficients K[M]: the ket |M, N> gets
/// j^(M-m) 2^(-t/2) sqrt(M! N! / (m! n!)) K[M].
inline AmplitudeMap amplitudes_from_polynomial(const std::vector<BigInt>& poly, OccupationPair input) {
    const unsigned m = input.first;
    const unsigned n = input.second;
    const unsigned t = input.total();
    const long double log_base = -0.5L * (log_factorial(m) + log_factorial(n)) - 0.5L * t * std::log(2.0L);
    AmplitudeMap out(t);
    for (unsigned k = 0; k <= t; ++k) {
        if (poly[k] == 0) continue;
        const long double mag = std::exp(log_base + 0.5L * (log_factorial(k) + log_factorial(t - k)));
        const double v = static_cast<double>(mag * poly[k].convert_to<long double>());
        switch ((k + 4 * kMaxTotalPhotons - m) % 4) {
            case 0: out.by_first(k) = {v, 0.0}; break;
            case 1: out.by_first(k) = {0.0, v}; break;
            case 2: out.by_first(k) = {-v, 0.0}; break;
            default: out.by_first(k) = {0.0, -v}; break;
        }
    }
    return out;
}

inline void require_supported_total(unsigned total, const char* what) {
    if (total > kMaxTotalPhotons) {
        std::ostringstream os;
        os << what << ": total photon number " << total << " exceeds supported bound " << kMaxTotalPhotons;
        throw TruncationError(os.str(), kMaxTotalPhotons);
    }
}

}  // namespace detail

/// Fock-basis transform of the splitter: a -> (c + j d)/sqrt2, b -> (j c + d)/sqrt2.
/// Expanding (c + j d)^m (j c + d)^n, the term picking u photons of a into d
/// and v photons of b into c lands on |m-u+v, n-v+u> with coefficient
/// j^{u+v} sqrt(m! n! M! N!) / (2^{(m+n)/2} (m-u)! u! (n-v)! v!).
/// Since j^{u+v} = j^{M-m} (-1)^u, all terms on one ket share a phase and
/// the signed sum over u is the x^M coefficient of (x - 1)^m (x + 1)^n. That
/// sum is formed in exact integer arithmetic: the terms alternate and cancel
/// to many digits for large inputs.
inline AmplitudeMap bs_output_amplitudes(OccupationPair input) {
    detail::require_supported_total(input.total(), "bs_output_amplitudes");
    return detail::amplitudes_from_polynomial(detail::split_polynomial(input.first, input.second), input);
}

/// bs_output_amplitudes for every input with `total` photons, indexed by the
/// photon number in the first input mode.
inline std::vector<AmplitudeMap> bs_output_row(unsigned total) {
    detail::require_supported_total(total, "bs_output_row");
    std::vector<AmplitudeMap> row(total + 1, AmplitudeMap(total));
    auto poly = detail::split_polynomial(total, 0);
    for (unsigned m = total + 1; m-- > 0;) {
        row[m] = detail::amplitudes_from_polynomial(poly, {m, total - m});
        if (m > 0) detail::move_factor_to_second(poly);
    }
    return row;
}

enum class SourceKind { SingleWCS, IndistinguishablePair, DistinguishablePair, PartialMixture };

/// What illuminates the splitter. `overlap` only matters for PartialMixture:
/// the weight of the indistinguishable component in a convex mixture with
/// the distinguishable one.
struct SourceModel {
    SourceKind kind = SourceKind::IndistinguishablePair;
    double overlap = 1.0;

    static SourceModel single() { return {SourceKind::SingleWCS, 1.0}; }
    static SourceModel indistinguishable() { return {SourceKind::IndistinguishablePair, 1.0}; }
    static SourceModel distinguishable() { return {SourceKind::DistinguishablePair, 1.0}; }
    static SourceModel mixture(double overlap) {
        SourceModel s{SourceKind::PartialMixture, overlap};
        s.validate();
        return s;
    }

    void validate() const {
        if (kind == SourceKind::PartialMixture && !(overlap >= 0.0 && overlap <= 1.0)) {
            std::ostringstream os;
            os << "source overlap must lie in [0,1], got " << overlap;
            throw DomainError(os.str());
        }
    }

    /// Short name as used on the command line: single, indist, dist, mix:<overlap>.
    std::string name() const {
        switch (kind) {
            case SourceKind::SingleWCS: return "single";
            case SourceKind::IndistinguishablePair: return "indist";
            case SourceKind::DistinguishablePair: return "dist";
            case SourceKind::PartialMixture: {
                std::ostringstream os;
                os << "mix:" << overlap;
                return os.str();
            }
        }
        return "unknown";
    }

    static SourceModel parse(std::string_view text) {
        if (text == "single") return single();
        if (text == "indist") return indistinguishable();
        if (text == "dist") return distinguishable();
        if (text.starts_with("mix:")) {
            const std::string value(text.substr(4));
            std::size_t used = 0;
            double overlap = 0.0;
            try {
                overlap = std::stod(value, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used == 0 || used != value.size()) {
                throw DomainError("cannot parse mixture overlap in source '" + std::string(text) + "'");
            }
            return mixture(overlap);
        }
        throw DomainError("unknown source model '" + std::string(text) + "' (expected single|indist|dist|mix:<overlap>)");
    }

    friend bool operator==(const SourceModel&, const SourceModel&) = default;
};

struct TruncationPolicy {
    double tail_mass = kDefaultTailMass;

    void validate() const {
        if (!(tail_mass > 0.0 && tail_mass <= 0.01)) {
            std::ostringstream os;
            os << "truncation tail mass must lie in (0, 0.01], got " << tail_mass;
            throw DomainError(os.str());
        }
    }
};

/// Smallest k with P(Poisson(mu) <= k) >= 1 - tail_mass. The upper tail is
/// evaluated directly as the regularised lower incomplete gamma P(k+1, mu),
/// which stays accurate for tail masses far below double epsilon.
inline unsigned truncation_bound(double mu, TruncationPolicy policy = {}) {
    detail::require_positive_mu(mu, "truncation_bound");
    policy.validate();
    // The tail above floor(mu) - 1 is at least ~1/2, so no smaller k qualifies.
    unsigned k = mu > 2.0 ? static_cast<unsigned>(std::floor(mu)) - 1 : 0;
    while (boost::math::gamma_p(static_cast<double>(k) + 1.0, mu) > policy.tail_mass) {
        ++k;
    }
    return k;
}

/// P_{c,d}(M, N) over all output pairs with M + N <= max_total.
class JointPhotonDistribution {
  public:
    JointPhotonDistribution(SourceModel source, double mu_eff, unsigned max_total, std::vector<double> probs)
        : source_(source), mu_eff_(mu_eff), max_total_(max_total), probs_(std::move(probs)) {
        if (probs_.size() != table_size(max_total)) {
            throw DomainError("JointPhotonDistribution: table size does not match max_total");
        }
        long double mass = 0.0L;
        for (double p : probs_) {
            mass += p;
        }
        truncation_mass_ = static_cast<double>(mass);
    }

    /// Position of (M, N) in the triangular table: rows by total, M within a row.
    static constexpr std::size_t index(OccupationPair occ) noexcept {
        const std::size_t t = occ.total();
        return t * (t + 1) / 2 + occ.first;
    }
    static constexpr std::size_t table_size(unsigned max_total) noexcept { return index({max_total, 0}) + 1; }

    double at(OccupationPair occ) const {
        if (occ.total() > max_total_) {
            return 0.0;
        }
        return probs_[index(occ)];
    }

    template <class F>
    void for_each(F&& f) const {
        for (unsigned t = 0; t <= max_total_; ++t) {
            for (unsigned first = 0; first <= t; ++first) {
                const OccupationPair occ{first, t - first};
                f(occ, probs_[index(occ)]);
            }
        }
    }

    const SourceModel& source() const noexcept { return source_; }
    double mu_eff() const noexcept { return mu_eff_; }
    unsigned max_total() const noexcept { return max_total_; }
    double truncation_mass() const noexcept { return truncation_mass_; }

  private:
    SourceModel source_;
    double mu_eff_;
    unsigned max_total_;
    std::vector<double> probs_;
    double truncation_mass_ = 0.0;
};

namespace detail {

inline std::vector<double> indistinguishable_table(double mu, unsigned max_total) {
    std::vector<double> probs(JointPhotonDistribution::table_size(max_total), 0.0);
    for (unsigned t = 0; t <= max_total; ++t) {
        // Conservation: only inputs with m + n = t feed outputs with M + N = t.
        const auto row = bs_output_row(t);
        for (unsigned m = 0; m <= t; ++m) {
            const OccupationPair input{m, t - m};
            const double weight = poisson_pair_pmf(mu, input);
            const auto p = row[m].probabilities();
            for (unsigned out = 0; out <= t; ++out) {
                probs[JointPhotonDistribution::index({out, t - out})] += weight * p[out];
            }
        }
    }
    return probs;
}

inline double binomial_half_pmf(unsigned trials, unsigned successes) {
    return static_cast<double>(std::exp(log_factorial(trials) - log_factorial(successes) -
                                        log_factorial(trials - successes) - trials * std::log(2.0L)));
}

inline std::vector<double> distinguishable_table(double mu, unsigned max_total) {
    std::vector<double> probs(JointPhotonDistribution::table_size(max_total), 0.0);
    for (unsigned t = 0; t <= max_total; ++t) {
        for (unsigned m = 0; m <= t; ++m) {
            const unsigned n = t - m;
            const double weight = poisson_pair_pmf(mu, {m, n});
            // Each arm's photons split independently and fairly; no interference.
            for (unsigned from_a = 0; from_a <= m; ++from_a) {
                const double pa = binomial_half_pmf(m, from_a);
                for (unsigned from_b = 0; from_b <= n; ++from_b) {
                    const unsigned out = from_a + from_b;
                    probs[JointPhotonDistribution::index({out, t - out})] +=
                        weight * pa * binomial_half_pmf(n, from_b);
                }
            }
        }
    }
    return probs;
}

inline std::vector<double> single_wcs_table(double mu, unsigned max_total) {
    std::vector<double> probs(JointPhotonDistribution::table_size(max_total), 0.0);
    for (unsigned t = 0; t <= max_total; ++t) {
        for (unsigned out = 0; out <= t; ++out) {
            // A split coherent state is a product of two Poisson(mu/2) modes.
            probs[JointPhotonDistribution::index({out, t - out})] = poisson_pair_pmf(mu, {out, t - out});
        }
    }
    return probs;
}

}  // namespace detail

/// Output photon statistics for `source` at mean total input photon number
/// `mu_eff` (loss already folded in, if any).
inline JointPhotonDistribution output_joint_distribution(SourceModel source, double mu_eff,
                                                         TruncationPolicy policy = {}) {
    detail::require_positive_mu(mu_eff, "output_joint_distribution");
    source.validate();
    const unsigned bound = truncation_bound(mu_eff, policy);
    if (bound > kMaxTotalPhotons) {
        std::ostringstream os;
        os << "truncation bound " << bound << " at mu=" << mu_eff << " exceeds supported " << kMaxTotalPhotons;
        throw TruncationError(os.str(), bound);
    }

    std::vector<double> probs;
    switch (source.kind) {
        case SourceKind::SingleWCS: probs = detail::single_wcs_table(mu_eff, bound); break;
        case SourceKind::IndistinguishablePair: probs = detail::indistinguishable_table(mu_eff, bound); break;
        case SourceKind::DistinguishablePair: probs = detail::distinguishable_table(mu_eff, bound); break;
        case SourceKind::PartialMixture: {
            probs = detail::indistinguishable_table(mu_eff, bound);
            const auto dist = detail::distinguishable_table(mu_eff, bound);
            for (std::size_t i = 0; i < probs.size(); ++i) {
                probs[i] = source.overlap * probs[i] + (1.0 - source.overlap) * dist[i];
            }
            break;
        }
    }

    JointPhotonDistribution result(source, mu_eff, bound, std::move(probs));
    if (result.truncation_mass() < 0.999) {
        std::ostringstream os;
        os << "truncation at total photon number " << bound << " captures only " << result.truncation_mass()
           << " of the probability mass (need >= 0.999)";
        throw TruncationError(os.str(), bound);
    }
    return result;
}

}  // namespace qrng::fock
