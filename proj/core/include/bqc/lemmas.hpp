#pragma once

#include "bqc/multipliers.hpp"
#include "bqc/params.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace bqc {

/// Outcome of the interval trichotomy at admissible (k, l, eta, xi, t, C):
///   a: k == l
///   b: |t - eta/k| >= (10C)^{-1} |eta|/k^2 and |t - xi/l| >= (10C)^{-1} |xi|/l^2
///   c: |eta - xi| >= (10C)^{-1} max(|eta|/|l|, |xi|/|k|)
/// At least one case holds for every admissible input.
struct TrichotomyCases {
    bool a = false;
    bool b = false;
    bool c = false;
    bool empty() const { return !(a || b || c); }
};

/// Preconditions: C >= 1, C^{-1}|xi| <= |eta| <= C|xi|, and t inside both
/// I_{k,eta} and I_{l,xi}; violations throw std::invalid_argument.
TrichotomyCases classify_trichotomy(long long k, long long l, double eta, double xi, double t,
                                    double C);

/// Empirical normalized-ratio statistics for one inequality suite.
struct RatioReport {
    std::string lemma_id;
    std::size_t n = 0;
    double sup_ratio = 0.0;
    double p99 = 0.0;
    double p50 = 0.0;
    double inf_ratio = 0.0;
};

/// Identifiers accepted by sample_lemma_ratios.
const std::vector<std::string>& lemma_ids();

/// Draw admissible (k, l, eta, xi, t) tuples for the named inequality from
/// the documented ranges (k,l in [-32,32]\{0}, eta,xi in [-1e4,1e4],
/// t in [0,2e4], filtered by each lemma's hypotheses), evaluate
/// left-hand-side / right-hand-side with implied constant 1, and report the
/// empirical ratio statistics. Deterministic given the seed.
RatioReport sample_lemma_ratios(const std::string& lemma_id, std::size_t n_samples,
                                std::uint64_t seed, const MultiplierParams& mp);

/// Randomized nonemptiness check of the trichotomy over admissible draws.
struct TrichotomySuite {
    std::size_t n = 0;
    std::size_t n_empty = 0;
    std::size_t n_a = 0, n_b = 0, n_c = 0;
};
TrichotomySuite run_trichotomy_suite(std::size_t n_samples, std::uint64_t seed);

} // namespace bqc
