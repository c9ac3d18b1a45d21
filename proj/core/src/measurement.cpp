// Copyright 2026 The qldp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qldp/measurement.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>
#include <string>
#include <unordered_map>
#include <utility>

namespace qldp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct DigestAccumulator {
  std::uint64_t h0 = 0x6a09e667f3bcc908ull;
  std::uint64_t h1 = 0xbb67ae8584caa73bull;

  void absorb(std::uint64_t v) {
    h0 = detail::mix64(h0 ^ v);
    h1 = detail::mix64(h1 + (v ^ 0x9216d5d98979fb1bull));
  }
  void absorb(double v) { absorb(std::bit_cast<std::uint64_t>(v)); }
};

Digest compute_digest(const std::vector<Operator>& effects,
                      const std::vector<double>& labels) {
  DigestAccumulator acc;
  acc.absorb(static_cast<std::uint64_t>(effects.front().dim()));
  acc.absorb(static_cast<std::uint64_t>(effects.size()));
  for (const auto& effect : effects) {
    const CMatrix& m = effect.mat();
    const Complex* data = m.data();
    const Index n = m.size();
    for (Index i = 0; i < n; ++i) {
      acc.absorb(data[i].real());
      acc.absorb(data[i].imag());
    }
  }
  for (double label : labels) {
    acc.absorb(label);
  }
  return {acc.h0, acc.h1};
}

// Extremal eigenvalues (and vectors) of every effect; the raw material for
// the triviality certificate.
struct EffectSpectrum {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  CVector vec_min;
  CVector vec_max;
};

struct CachedTriviality {
  double alpha_star = 0.0;
  std::size_t outcome = 0;
  bool finite_witness = false;
  CVector vec_max;
  CVector vec_min;
};

struct DigestHash {
  std::size_t operator()(const Digest& d) const {
    return static_cast<std::size_t>(d[0] ^ detail::mix64(d[1]));
  }
};

// Triviality is a pure function of the measurement; memoizing it lets oracle
// verification of a repeated measurement cost one eigendecomposition per
// process instead of one per query.
std::mutex g_triviality_mutex;
std::unordered_map<Digest, CachedTriviality, DigestHash> g_triviality_cache;

CachedTriviality compute_triviality(const Povm& m) {
  CachedTriviality result;
  result.alpha_star = 0.0;
  result.outcome = 0;
  bool found = false;

  for (std::size_t i = 0; i < m.num_outcomes(); ++i) {
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(m.effect(i).mat());
    const auto& vals = solver.eigenvalues();
    const Index last = vals.size() - 1;
    const double lo = vals(0);
    const double hi = vals(last);

    double alpha;
    if (hi <= kZeroProbTol) {
      continue;  // identically zero effect: outcome never occurs
    } else if (lo <= kZeroProbTol) {
      alpha = kInf;
    } else {
      alpha = std::log(hi / lo);
    }

    if (!found || alpha > result.alpha_star) {
      found = true;
      result.alpha_star = alpha;
      result.outcome = i;
      result.finite_witness = true;
      result.vec_max = solver.eigenvectors().col(last);
      result.vec_min = solver.eigenvectors().col(0);
    }
  }
  return result;
}

const CachedTriviality& lookup_triviality(const Povm& m) {
  std::scoped_lock lock(g_triviality_mutex);
  auto it = g_triviality_cache.find(m.digest());
  if (it == g_triviality_cache.end()) {
    it = g_triviality_cache.emplace(m.digest(), compute_triviality(m)).first;
  }
  return it->second;
}

double clamp01(double x) {
  return std::min(1.0, std::max(0.0, x));
}

}  // namespace

Povm::Povm(std::vector<Operator> effects, std::vector<double> labels)
    : effects_(std::move(effects)), labels_(std::move(labels)) {
  if (effects_.empty()) {
    throw ValidationError("Povm: at least one effect required");
  }
  dim_ = effects_.front().dim();
  for (auto& effect : effects_) {
    if (effect.dim() != dim_) {
      throw ValidationError("Povm: effects must share one dimension");
    }
    effect = Operator(hermitized(effect.mat(), kHermitianTol));
  }

  const double floor = -1e-9 * static_cast<double>(dim_);
  for (const auto& effect : effects_) {
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(effect.mat(),
                                                  Eigen::EigenvaluesOnly);
    if (solver.eigenvalues().minCoeff() < floor) {
      throw ValidationError("Povm: effect is not positive semidefinite");
    }
  }
  finish_construction();
}

Povm::Povm(std::vector<Operator> effects, std::vector<double> labels, Trusted)
    : effects_(std::move(effects)), labels_(std::move(labels)) {
  dim_ = effects_.front().dim();
  finish_construction();
}

void Povm::finish_construction() {
  const std::size_t k = effects_.size();
  if (labels_.empty()) {
    labels_.resize(k);
    std::iota(labels_.begin(), labels_.end(), 1.0);
  }
  if (labels_.size() != k) {
    throw ValidationError("Povm: labels length " + std::to_string(labels_.size()) +
                          " != number of effects " + std::to_string(k));
  }

  CMatrix sum = CMatrix::Zero(dim_, dim_);
  for (const auto& effect : effects_) {
    sum += effect.mat();
  }
  const double completeness = max_abs(sum - CMatrix::Identity(dim_, dim_));
  if (completeness > kHermitianTol) {
    throw ValidationError("Povm: effects sum deviates from identity by " +
                          std::to_string(completeness));
  }

  digest_ = compute_digest(effects_, labels_);
}

double Povm::label_mean() const {
  return std::accumulate(labels_.begin(), labels_.end(), 0.0) /
         static_cast<double>(labels_.size());
}

std::vector<double> outcome_probabilities(const Povm& m, const DensityMatrix& rho) {
  if (m.dim() != rho.dim()) {
    throw ValidationError("outcome_probabilities: dimension mismatch");
  }
  std::vector<double> probs(m.num_outcomes());
  double total = 0.0;
  for (std::size_t i = 0; i < m.num_outcomes(); ++i) {
    probs[i] = clamp01(trace_product_real(m.effect(i).mat(), rho.mat()));
    total += probs[i];
  }
  if (std::abs(total - 1.0) <= 1e-9 && total > 0.0) {
    for (double& p : probs) {
      p /= total;
    }
  }
  return probs;
}

std::size_t sample_index(std::span<const double> probabilities, RngStream& rng) {
  const double u = rng.next_double();
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  bool any = false;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    if (probabilities[i] > 0.0) {
      last_positive = i;
      any = true;
    }
    cumulative += probabilities[i];
    if (u < cumulative) {
      return i;
    }
  }
  // Cumulative drift below 1; fall back to the last outcome with mass.
  return any ? last_positive : probabilities.size() - 1;
}

Outcome sample_outcome(const Povm& m, const DensityMatrix& rho, RngStream& rng) {
  const auto probs = outcome_probabilities(m, rho);
  const std::size_t index = sample_index(probs, rng);
  return {index, m.label(index)};
}

double expectation(const Povm& m, const DensityMatrix& rho) {
  if (m.dim() != rho.dim()) {
    throw ValidationError("expectation: dimension mismatch");
  }
  double value = 0.0;
  for (std::size_t i = 0; i < m.num_outcomes(); ++i) {
    value += m.label(i) * trace_product_real(m.effect(i).mat(), rho.mat());
  }
  return value;
}

double minimal_triviality_alpha(const Povm& m) {
  return lookup_triviality(m).alpha_star;
}

TrivialityCertificate minimal_triviality(const Povm& m) {
  const CachedTriviality& cached = lookup_triviality(m);
  TrivialityCertificate cert;
  cert.alpha_star = cached.alpha_star;
  cert.outcome = cached.outcome;
  if (cached.finite_witness) {
    cert.maximizer = pure_state_density(cached.vec_max);
    cert.minimizer = pure_state_density(cached.vec_min);
  }
  return cert;
}

TrivialityCertificate minimal_triviality_on_set(
    const Povm& m, std::span<const DensityMatrix> states) {
  if (states.empty()) {
    throw ValidationError("minimal_triviality_on_set: empty state set");
  }
  for (const auto& state : states) {
    if (state.dim() != m.dim()) {
      throw ValidationError("minimal_triviality_on_set: dimension mismatch");
    }
  }

  // Traces once per (outcome, state), then a max over ordered pairs.
  std::vector<std::vector<double>> traces(m.num_outcomes());
  for (std::size_t i = 0; i < m.num_outcomes(); ++i) {
    traces[i].resize(states.size());
    for (std::size_t s = 0; s < states.size(); ++s) {
      traces[i][s] = trace_product_real(m.effect(i).mat(), states[s].mat());
    }
  }

  TrivialityCertificate cert;
  cert.alpha_star = 0.0;
  cert.outcome = 0;
  cert.state_pair = {0, 0};
  for (std::size_t i = 0; i < m.num_outcomes(); ++i) {
    for (std::size_t a = 0; a < states.size(); ++a) {
      for (std::size_t b = 0; b < states.size(); ++b) {
        if (a == b) {
          continue;
        }
        const double num = traces[i][a];
        const double den = traces[i][b];
        double ratio;
        if (num <= kZeroProbTol) {
          continue;  // numerator vanishes: pair satisfied at any level
        } else if (den <= kZeroProbTol) {
          ratio = kInf;
        } else {
          ratio = std::log(num / den);
        }
        if (ratio > cert.alpha_star) {
          cert.alpha_star = ratio;
          cert.outcome = i;
          cert.state_pair = {a, b};
        }
      }
    }
  }
  return cert;
}

DpCheckResult check_dp(const Povm& m, std::span<const ProductState> states,
                       double alpha, Index dim_cap) {
  if (alpha < 0.0) {
    throw ValidationError("check_dp: alpha must be nonnegative");
  }
  if (states.empty()) {
    throw ValidationError("check_dp: empty state list");
  }
  const auto dims = states.front().register_dims();
  for (const auto& state : states) {
    if (state.register_dims() != dims) {
      throw ValidationError("check_dp: states disagree on register dimensions");
    }
  }
  const Index total = states.front().total_dim(dim_cap);
  if (total != m.dim()) {
    throw ValidationError("check_dp: measurement dimension " +
                          std::to_string(m.dim()) +
                          " != joint state dimension " + std::to_string(total));
  }

  std::vector<std::vector<double>> probs;
  probs.reserve(states.size());
  for (const auto& state : states) {
    probs.push_back(outcome_probabilities(m, state.materialize(dim_cap)));
  }

  const double bound_scale = std::exp(alpha);
  DpCheckResult result;
  for (std::size_t a = 0; a < states.size(); ++a) {
    for (std::size_t b = 0; b < states.size(); ++b) {
      if (a == b) {
        continue;
      }
      std::size_t differing = 0;
      for (std::size_t r = 0; r < dims.size(); ++r) {
        if (max_abs(states[a].reg(r).mat() - states[b].reg(r).mat()) > 1e-9) {
          ++differing;
        }
      }
      if (differing != 1) {
        continue;
      }
      ++result.neighbor_pairs;
      for (std::size_t y = 0; y < m.num_outcomes(); ++y) {
        const double p = probs[a][y];
        const double q = probs[b][y];
        const bool violated = (q <= kZeroProbTol)
                                  ? (p > kZeroProbTol)
                                  : (p > bound_scale * q + 1e-12);
        if (violated) {
          result.pass = false;
          result.violation = DpViolation{
              a, b, y, q <= kZeroProbTol ? kInf : p / q};
          return result;
        }
      }
    }
  }
  return result;
}

Povm random_povm(Index dim, std::size_t num_outcomes, RngStream& rng) {
  if (dim < 1 || num_outcomes < 1) {
    throw ValidationError("random_povm: dim and outcome count must be positive");
  }

  for (;;) {
    std::vector<CMatrix> parts;
    parts.reserve(num_outcomes);
    CMatrix sum = CMatrix::Zero(dim, dim);
    for (std::size_t i = 0; i < num_outcomes; ++i) {
      CMatrix g(dim, dim);
      for (Index r = 0; r < dim; ++r) {
        for (Index c = 0; c < dim; ++c) {
          g(r, c) = Complex(rng.next_gaussian(), rng.next_gaussian());
        }
      }
      CMatrix part = g * g.adjoint();
      sum += part;
      parts.push_back(std::move(part));
    }

    Eigen::SelfAdjointEigenSolver<CMatrix> solver(sum);
    const auto& vals = solver.eigenvalues();
    const double lo = vals.minCoeff();
    const double hi = vals.maxCoeff();
    if (lo <= 0.0 || hi / lo > 1e12) {
      continue;  // ill-conditioned normalizer; redraw
    }

    CMatrix inv_sqrt = solver.eigenvectors() *
                       vals.cwiseInverse().cwiseSqrt().asDiagonal() *
                       solver.eigenvectors().adjoint();

    std::vector<Operator> effects;
    effects.reserve(num_outcomes);
    for (const auto& part : parts) {
      CMatrix effect = inv_sqrt * part * inv_sqrt;
      effect = (effect + effect.adjoint()) / 2.0;
      effects.emplace_back(std::move(effect));
    }
    return Povm(std::move(effects), {}, Povm::Trusted{});
  }
}

}  // namespace qldp
