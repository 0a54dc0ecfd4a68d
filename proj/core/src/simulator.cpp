// Copyright 2026 The nestvqa Authors
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

#include "nest/simulator.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include "nest/error.hpp"

namespace nest {

namespace {

using Mat2 = std::array<Amplitude, 4>;  // row-major
using Super1 = std::array<Amplitude, 16>;
using Super2 = std::vector<Amplitude>;  // 256 entries

constexpr Amplitude kI{0.0, 1.0};

// ---------------------------------------------------------------------------
// Counter-based RNG: every (seed, term, shot) triple gets its own stream so
// results do not depend on evaluation order.
// ---------------------------------------------------------------------------

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t stream_key(std::uint64_t seed, std::uint64_t term, std::uint64_t shot) {
  return splitmix64(splitmix64(splitmix64(seed) ^ (term + 1)) ^ (shot + 1));
}

class ShotRng {
 public:
  explicit ShotRng(std::uint64_t key) : state_(key) {}
  double uniform() {
    state_ += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    z ^= z >> 31;
    return static_cast<double>(z >> 11) * 0x1.0p-53;
  }
  int below(int k) { return std::min(k - 1, static_cast<int>(uniform() * k)); }

 private:
  std::uint64_t state_;
};

// ---------------------------------------------------------------------------
// Matrices
// ---------------------------------------------------------------------------

Mat2 gate_matrix(GateOp op, double theta) {
  const double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
  const double r = std::numbers::sqrt2 / 2.0;
  switch (op) {
    case GateOp::H: return {r, r, r, -r};
    case GateOp::RX: return {c, -kI * s, -kI * s, c};
    case GateOp::RY: return {c, -s, s, c};
    case GateOp::RZ: return {std::polar(1.0, -theta / 2.0), 0.0, 0.0, std::polar(1.0, theta / 2.0)};
    default: break;
  }
  throw InvalidArity("not a single-qubit unitary: " + std::string(gate_name(op)));
}

const Mat2& pauli(int k) {
  static const Mat2 table[4] = {
      {1.0, 0.0, 0.0, 1.0}, {0.0, 1.0, 1.0, 0.0}, {0.0, -kI, kI, 0.0}, {1.0, 0.0, 0.0, -1.0}};
  return table[k];
}

Mat2 mul(const Mat2& a, const Mat2& b) {
  return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
          a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]};
}

Mat2 conj(const Mat2& m) {
  return {std::conj(m[0]), std::conj(m[1]), std::conj(m[2]), std::conj(m[3])};
}

// S[(a,b),(c,d)] = sum_k K_ac conj(K_bd); pair index = 2*row + col.
Super1 superop1(std::span<const Mat2> kraus) {
  Super1 s{};
  for (const auto& k : kraus) {
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int c = 0; c < 2; ++c)
          for (int d = 0; d < 2; ++d)
            s[(2 * a + b) * 4 + 2 * c + d] += k[2 * a + c] * std::conj(k[2 * b + d]);
  }
  return s;
}

Super1 compose(const Super1& after, const Super1& before) {
  Super1 out{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k) out[i * 4 + j] += after[i * 4 + k] * before[k * 4 + j];
  return out;
}

Super1 depolarizing1(double p) {
  std::vector<Mat2> kraus;
  const double a = std::sqrt(1.0 - p), b = std::sqrt(p / 3.0);
  for (int k = 0; k < 4; ++k) {
    Mat2 m = pauli(k);
    for (auto& x : m) x *= (k == 0 ? a : b);
    kraus.push_back(m);
  }
  return superop1(kraus);
}

Super1 damping(double p_amp, double p_phase) {
  const Mat2 a0{1.0, 0.0, 0.0, std::sqrt(1.0 - p_amp)};
  const Mat2 a1{0.0, std::sqrt(p_amp), 0.0, 0.0};
  const Mat2 f0{1.0, 0.0, 0.0, std::sqrt(1.0 - p_phase)};
  const Mat2 f1{0.0, 0.0, 0.0, std::sqrt(p_phase)};
  const Mat2 amp[] = {a0, a1};
  const Mat2 phase[] = {f0, f1};
  return compose(superop1(phase), superop1(amp));
}

// Two-qubit Pauli mixture; local index r = bit(a) + 2 * bit(b).
Super2 depolarizing2(double p) {
  Super2 s(256, 0.0);
  for (int pa = 0; pa < 4; ++pa) {
    for (int pb = 0; pb < 4; ++pb) {
      const bool id = pa == 0 && pb == 0;
      const double w = id ? 1.0 - p : p / 15.0;
      if (w == 0.0) continue;
      std::array<Amplitude, 16> k{};
      for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c)
          k[r * 4 + c] = pauli(pa)[2 * (r & 1) + (c & 1)] * pauli(pb)[2 * (r >> 1) + (c >> 1)];
      for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c)
          for (int r2 = 0; r2 < 4; ++r2)
            for (int c2 = 0; c2 < 4; ++c2)
              s[(r * 4 + c) * 16 + r2 * 4 + c2] += w * k[r * 4 + r2] * std::conj(k[c * 4 + c2]);
    }
  }
  return s;
}

// ---------------------------------------------------------------------------
// Kernels over a vector of 2^nbits amplitudes.
// ---------------------------------------------------------------------------

void apply_1q(Amplitude* v, std::size_t dim, int bit, const Mat2& m) {
  const std::size_t step = std::size_t{1} << bit;
  for (std::size_t base = 0; base < dim; base += 2 * step) {
    for (std::size_t i = base; i < base + step; ++i) {
      const Amplitude x0 = v[i], x1 = v[i + step];
      v[i] = m[0] * x0 + m[1] * x1;
      v[i + step] = m[2] * x0 + m[3] * x1;
    }
  }
}

void apply_cx(Amplitude* v, std::size_t dim, int control, int target) {
  const std::size_t cm = std::size_t{1} << control, tm = std::size_t{1} << target;
  for (std::size_t i = 0; i < dim; ++i) {
    if ((i & cm) && !(i & tm)) std::swap(v[i], v[i | tm]);
  }
}

void apply_super1(Amplitude* v, std::size_t dim, int row_bit, int col_bit, const Super1& s) {
  const std::size_t rm = std::size_t{1} << row_bit, cm = std::size_t{1} << col_bit;
  for (std::size_t i = 0; i < dim; ++i) {
    if (i & (rm | cm)) continue;
    const std::size_t idx[4] = {i, i | cm, i | rm, i | rm | cm};  // (row,col) = 00,01,10,11
    Amplitude in[4], out[4];
    for (int k = 0; k < 4; ++k) in[k] = v[idx[k]];
    for (int a = 0; a < 4; ++a) {
      out[a] = s[a * 4] * in[0] + s[a * 4 + 1] * in[1] + s[a * 4 + 2] * in[2] + s[a * 4 + 3] * in[3];
    }
    for (int k = 0; k < 4; ++k) v[idx[k]] = out[k];
  }
}

void apply_super2(Amplitude* v, std::size_t dim, int qa, int qb, int n, const Super2& s) {
  const std::size_t ra = std::size_t{1} << qa, rb = std::size_t{1} << qb;
  const std::size_t ca = std::size_t{1} << (qa + n), cb = std::size_t{1} << (qb + n);
  const std::size_t all = ra | rb | ca | cb;
  std::size_t off[16];
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c)
      off[r * 4 + c] = ((r & 1) ? ra : 0) | ((r & 2) ? rb : 0) | ((c & 1) ? ca : 0) | ((c & 2) ? cb : 0);
  Amplitude in[16];
  for (std::size_t i = 0; i < dim; ++i) {
    if (i & all) continue;
    for (int k = 0; k < 16; ++k) in[k] = v[i | off[k]];
    for (int a = 0; a < 16; ++a) {
      Amplitude acc = 0.0;
      const Amplitude* row = &s[a * 16];
      for (int k = 0; k < 16; ++k) acc += row[k] * in[k];
      v[i | off[a]] = acc;
    }
  }
}

double prob_one(const StateVector& v, int bit) {
  const std::size_t m = std::size_t{1} << bit;
  double p = 0.0;
  for (std::size_t base = m; base < v.size(); base += 2 * m) {
    for (std::size_t i = base; i < base + m; ++i) p += std::norm(v[i]);
  }
  return p;
}

void scale_branch(StateVector& v, int bit, double s0, double s1) {
  const std::size_t m = std::size_t{1} << bit;
  for (std::size_t base = 0; base < v.size(); base += 2 * m) {
    for (std::size_t i = base; i < base + m; ++i) v[i] *= s0;
    for (std::size_t i = base + m; i < base + 2 * m; ++i) v[i] *= s1;
  }
}

// ---------------------------------------------------------------------------
// Compiled program over local qubits 0..n-1 (local k = initial physical
// placement of logical k).
// ---------------------------------------------------------------------------

struct Op {
  bool two_qubit = false;
  int a = 0, b = 0;
  GateOp gate = GateOp::H;
  int param = -1;
  double coeff = 1.0, offset = 0.0;
  bool fixed = false;  // use `matrix` instead of (gate, angle)
  Mat2 matrix{};
  double depol = 0.0;
  Super1 depol1{};
  Super2 depol2;

  Mat2 unitary(std::span<const double> params) const {
    if (fixed) return matrix;
    double theta = param < 0 ? offset : coeff * params[param] + offset;
    return gate_matrix(gate, theta);
  }
};

struct Layer {
  std::vector<Op> ops;
  std::vector<double> p_amp, p_phase;  // per local qubit; empty = no damping
  std::vector<Super1> damp;
  // No-jump amplitude factor of basis index i is nj_lo[i & lo_mask] * nj_hi[i >> lo_bits].
  int lo_bits = 0;
  std::vector<double> nj_lo, nj_hi;

  double no_jump(std::size_t i) const {
    return nj_lo[i & ((std::size_t{1} << lo_bits) - 1)] * nj_hi[i >> lo_bits];
  }
};

struct Term {
  double coeff = 0.0;
  std::uint64_t mask = 0;  // local bits whose parity is measured
  bool rotated = false;
  Layer rotation;
  double readout_factor = 1.0;
  std::vector<std::pair<int, double>> flips;  // (local bit, flip prob)
  std::string basis;  // X/Y letters per local bit; equal strings share a rotation
};

}  // namespace

struct Executor::Impl {
  int n = 0;
  int num_params = 0;
  Backend backend = Backend::Auto;
  bool noisy = false;
  std::vector<Layer> layers;
  std::vector<Term> terms;
  double identity = 0.0;
  std::vector<int> local_of_logical;    // after the final layout
  std::vector<double> readout_logical;  // flip probability per logical bit
  std::vector<double> readout_local;
  /// Term indices sharing a measurement basis, in first-appearance order.
  std::vector<std::vector<std::size_t>> groups;

  void check_params(std::span<const double> params) const {
    if (static_cast<int>(params.size()) != num_params) {
      throw ParamLengthMismatch("expected " + std::to_string(num_params) + " parameters, got " +
                                std::to_string(params.size()));
    }
  }

  // -- density matrix -------------------------------------------------------

  void dm_layer(StateVector& rho, const Layer& layer, std::span<const double> params) const {
    const std::size_t dim = rho.size();
    for (const auto& op : layer.ops) {
      if (op.two_qubit) {
        apply_cx(rho.data(), dim, op.a, op.b);
        apply_cx(rho.data(), dim, op.a + n, op.b + n);
        if (op.depol > 0.0) apply_super2(rho.data(), dim, op.a, op.b, n, op.depol2);
      } else {
        const Mat2 u = op.unitary(params);
        apply_1q(rho.data(), dim, op.a, u);
        apply_1q(rho.data(), dim, op.a + n, conj(u));
        if (op.depol > 0.0) apply_super1(rho.data(), dim, op.a, op.a + n, op.depol1);
      }
    }
    for (std::size_t q = 0; q < layer.damp.size(); ++q) {
      apply_super1(rho.data(), dim, static_cast<int>(q), static_cast<int>(q) + n, layer.damp[q]);
    }
  }

  StateVector dm_state(std::span<const double> params) const {
    StateVector rho(std::size_t{1} << (2 * n), 0.0);
    rho[0] = 1.0;
    for (const auto& layer : layers) dm_layer(rho, layer, params);
    return rho;
  }

  double dm_parity(const StateVector& rho, std::uint64_t mask) const {
    const std::size_t dim = std::size_t{1} << n;
    double e = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      const double p = rho[i | (i << n)].real();
      e += (std::popcount(i & mask) & 1) ? -p : p;
    }
    return e;
  }

  std::vector<double> dm_term_values(std::span<const double> params) const {
    const StateVector rho = dm_state(params);
    std::vector<double> out;
    out.reserve(terms.size());
    StateVector work;
    for (const auto& t : terms) {
      double e;
      if (t.rotated) {
        work = rho;
        dm_layer(work, t.rotation, params);
        e = dm_parity(work, t.mask);
      } else {
        e = dm_parity(rho, t.mask);
      }
      out.push_back(std::clamp(e * t.readout_factor, -1.0, 1.0));
    }
    return out;
  }

  // -- trajectories ---------------------------------------------------------

  void pauli_kick(StateVector& psi, int q, ShotRng& rng) const {
    apply_1q(psi.data(), psi.size(), q, pauli(1 + rng.below(3)));
  }

  void traj_layer(StateVector& psi, const Layer& layer, std::span<const double> params,
                  ShotRng* rng) const {
    const std::size_t dim = psi.size();
    for (const auto& op : layer.ops) {
      if (op.two_qubit) {
        apply_cx(psi.data(), dim, op.a, op.b);
        if (rng && op.depol > 0.0 && rng->uniform() < op.depol) {
          const int k = 1 + rng->below(15);  // non-identity pair (pa, pb)
          if (k % 4) apply_1q(psi.data(), dim, op.a, pauli(k % 4));
          if (k / 4) apply_1q(psi.data(), dim, op.b, pauli(k / 4));
        }
      } else {
        apply_1q(psi.data(), dim, op.a, op.unitary(params));
        if (rng && op.depol > 0.0 && rng->uniform() < op.depol) pauli_kick(psi, op.a, *rng);
      }
    }
    if (!rng || layer.p_amp.empty()) return;
    traj_damping(psi, layer, *rng);
  }

  /**
   * Amplitude then phase damping on every qubit, qubit by qubit. Unraveled by
   * waiting time: all no-jump operators are diagonal and commute, so one pass
   * gives the probability P0 that no channel of the layer jumps. Only when u
   * falls below 1 - P0 are the channels walked to find the first jump by
   * inverse CDF; the remaining channels then run one by one.
   */
  void traj_damping(StateVector& psi, const Layer& layer, ShotRng& rng) const {
    const std::size_t dim = psi.size();
    double p0 = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      const double f = layer.no_jump(i);
      p0 += std::norm(psi[i]) * f * f;
    }
    const double u = rng.uniform();
    if (u < p0) {
      const double s = 1.0 / std::sqrt(p0);
      for (std::size_t i = 0; i < dim; ++i) psi[i] *= layer.no_jump(i) * s;
      return;
    }
    // Channel c = 2q (amplitude) or 2q + 1 (phase). n_c is the no-jump mass so far.
    const int nq = static_cast<int>(layer.p_amp.size());
    double n_c = 1.0;
    int c = 0;
    for (; c < 2 * nq; ++c) {
      const int bit = c / 2;
      const double g = c % 2 ? layer.p_phase[bit] : layer.p_amp[bit];
      if (g <= 0.0) continue;
      const double jump = g * prob_one(psi, bit);
      if (u >= n_c - jump || c == 2 * nq - 1) {
        apply_jump(psi, bit, c % 2 == 1);
        break;
      }
      scale_branch(psi, bit, 1.0, std::sqrt(1.0 - g));
      n_c -= jump;
    }
    for (++c; c < 2 * nq; ++c) {
      const int bit = c / 2;
      const double g = c % 2 ? layer.p_phase[bit] : layer.p_amp[bit];
      if (g <= 0.0) continue;
      const double p1 = prob_one(psi, bit);
      if (rng.uniform() < g * p1) {
        apply_jump(psi, bit, c % 2 == 1);
      } else {
        const double norm = 1.0 / std::sqrt(1.0 - g * p1);
        scale_branch(psi, bit, norm, std::sqrt(1.0 - g) * norm);
      }
    }
  }

  // Jump of one damping channel on a state of any norm; leaves it normalized.
  static void apply_jump(StateVector& psi, int bit, bool phase) {
    const std::size_t m = std::size_t{1} << bit;
    const double s = 1.0 / std::sqrt(prob_one(psi, bit));
    for (std::size_t base = 0; base < psi.size(); base += 2 * m) {
      for (std::size_t i = base; i < base + m; ++i) {
        psi[i] = phase ? 0.0 : psi[i + m] * s;
        if (!phase) psi[i + m] = 0.0;
        else psi[i + m] *= s;
      }
    }
  }

  StateVector traj_state(std::span<const double> params, ShotRng* rng,
                         const Term* term) const {
    StateVector psi(std::size_t{1} << n, 0.0);
    psi[0] = 1.0;
    for (const auto& layer : layers) traj_layer(psi, layer, params, rng);
    if (term && term->rotated) traj_layer(psi, term->rotation, params, rng);
    return psi;
  }

  static std::size_t draw(const StateVector& psi, double u) {
    double acc = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) {
      acc += std::norm(psi[i]);
      if (u < acc) return i;
    }
    // Rounding left u beyond the accumulated mass; take the last nonzero entry.
    for (std::size_t i = psi.size(); i-- > 0;) {
      if (std::norm(psi[i]) > 0.0) return i;
    }
    return 0;
  }

  // Noiseless parity estimate of one term: one statevector, `shots` draws.
  double traj_term(std::span<const double> params, const Term& t, std::size_t term_index,
                   int shots, std::uint64_t seed) const {
    long sum = 0;
    const StateVector psi = traj_state(params, nullptr, &t);
    std::vector<double> cdf(psi.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) cdf[i] = acc += std::norm(psi[i]);
    for (int s = 0; s < shots; ++s) {
      ShotRng rng(stream_key(seed, term_index, s));
      const double u = rng.uniform() * acc;
      auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
      std::size_t idx = std::min<std::size_t>(it - cdf.begin(), cdf.size() - 1);
      while (std::norm(psi[idx]) == 0.0 && idx > 0) --idx;
      sum += (std::popcount(idx & t.mask) & 1) ? -1 : 1;
    }
    return static_cast<double>(sum) / shots;
  }

  // Noisy trajectories shared by every term of one basis group: each shot
  // yields one readout-flipped bitstring, and each term takes its parity.
  // Returns the variance of the group's contribution to the estimate.
  double traj_group(std::span<const double> params, std::span<const std::size_t> group, int shots,
                    std::uint64_t seed, std::vector<double>& means) const {
    const Term& lead = terms[group.front()];
    std::vector<long> sums(group.size(), 0);
    double v_sum = 0.0, v_sq = 0.0;
    for (int s = 0; s < shots; ++s) {
      ShotRng rng(stream_key(seed, group.front(), s));
      const StateVector psi = traj_state(params, &rng, &lead);
      std::uint64_t idx = draw(psi, rng.uniform());
      for (int b = 0; b < n; ++b) {
        if (readout_local[b] > 0.0 && rng.uniform() < readout_local[b]) idx ^= std::uint64_t{1} << b;
      }
      double v = 0.0;
      for (std::size_t k = 0; k < group.size(); ++k) {
        const int sign = (std::popcount(idx & terms[group[k]].mask) & 1) ? -1 : 1;
        sums[k] += sign;
        v += terms[group[k]].coeff * sign;
      }
      v_sum += v;
      v_sq += v * v;
    }
    for (std::size_t k = 0; k < group.size(); ++k) {
      means[group[k]] = static_cast<double>(sums[k]) / shots;
    }
    const double mean = v_sum / shots;
    return std::max(0.0, v_sq / shots - mean * mean) / shots;
  }

  bool use_density() const {
    if (backend == Backend::DensityMatrix) return true;
    if (backend == Backend::Trajectory) return false;
    return n <= kMaxDensityQubits;
  }
};

namespace {

// Local index: position of the physical qubit in the initial assignment.
int local_of(const CircuitMap& map, PhysicalQubit p) {
  const int l = map.logical_of(p);
  if (l < 0) throw UnmappedQubit("physical qubit " + std::to_string(p) + " is not mapped");
  return l;
}

}  // namespace

Executor::Executor(const RoutedCircuit& routed, const PauliHamiltonian& h,
                   const NoiseBinding* noise, Backend backend)
    : impl_(new Impl) {
  Impl& m = *impl_;
  m.n = routed.num_logical;
  m.num_params = routed.num_params;
  m.backend = backend;
  if (h.num_qubits() != m.n) {
    delete impl_;
    throw DimensionMismatch("Hamiltonian acts on " + std::to_string(h.num_qubits()) +
                            " qubits, circuit has " + std::to_string(m.n));
  }
  try {
    if (m.n > kMaxStatevectorQubits) {
      throw TooManyQubits(std::to_string(m.n) + " qubits exceed the statevector bound");
    }
    if (backend == Backend::DensityMatrix && m.n > kMaxDensityQubits) {
      throw TooManyQubits(std::to_string(m.n) + " qubits exceed the density-matrix bound");
    }
    const DeviceSnapshot* snap = noise ? noise->snapshot : nullptr;
    const bool depol = snap && noise->depolarizing;
    const bool damp = snap && noise->damping;
    const bool readout = snap && noise->readout;
    m.noisy = depol || damp || readout;
    const CircuitMap& map = routed.map;

    auto damping_for = [&](Layer& layer, double t_layer) {
      if (!damp || t_layer <= 0.0) return;
      layer.p_amp.resize(m.n);
      layer.p_phase.resize(m.n);
      for (int k = 0; k < m.n; ++k) {
        const auto& qp = snap->qubit(map.physical(k));
        layer.p_amp[k] = 1.0 - std::exp(-t_layer / qp.t1_us);
        layer.p_phase[k] = 1.0 - std::exp(-t_layer / qp.t2_us);
        layer.damp.push_back(damping(layer.p_amp[k], layer.p_phase[k]));
      }
      layer.lo_bits = m.n / 2;
      auto table = [&](int first, int bits) {
        std::vector<double> f(std::size_t{1} << bits, 1.0);
        for (std::size_t i = 0; i < f.size(); ++i) {
          for (int b = 0; b < bits; ++b) {
            if (i >> b & 1) {
              f[i] *= std::sqrt((1.0 - layer.p_amp[first + b]) * (1.0 - layer.p_phase[first + b]));
            }
          }
        }
        return f;
      };
      layer.nj_lo = table(0, layer.lo_bits);
      layer.nj_hi = table(layer.lo_bits, m.n - layer.lo_bits);
    };

    const auto gates = lower_swaps(routed.gates);
    int depth = 0;
    const auto layer_of = asap_layers(gates, &depth);
    m.layers.resize(depth);
    std::vector<double> t_layer(depth, 0.0);
    for (std::size_t i = 0; i < gates.size(); ++i) {
      const Gate& g = gates[i];
      if (layer_of[i] < 0) continue;
      Op op;
      op.gate = g.op;
      op.param = g.param;
      op.coeff = g.coeff;
      op.offset = g.offset;
      op.a = local_of(map, g.qubits[0]);
      double duration = 0.0;
      if (g.arity() == 2) {
        op.two_qubit = true;
        op.b = local_of(map, g.qubits[1]);
        if (snap) {
          const EdgeProps* e = snap->find_edge(g.qubits[0], g.qubits[1]);
          if (!e) {
            throw MissingEdgeProps("no coupling edge (" + std::to_string(g.qubits[0]) + "," +
                                   std::to_string(g.qubits[1]) + ")");
          }
          duration = e->tq_duration_us;
          if (depol && e->tq_error > 0.0) {
            op.depol = e->tq_error;
            op.depol2 = depolarizing2(op.depol);
          }
        }
      } else if (snap) {
        const auto& qp = snap->qubit(g.qubits[0]);
        duration = qp.sq_duration_us;
        if (depol && qp.sq_error > 0.0) {
          op.depol = qp.sq_error;
          op.depol1 = depolarizing1(op.depol);
        }
      }
      t_layer[layer_of[i]] = std::max(t_layer[layer_of[i]], duration);
      m.layers[layer_of[i]].ops.push_back(std::move(op));
    }
    for (int d = 0; d < depth; ++d) damping_for(m.layers[d], t_layer[d]);

    m.local_of_logical.resize(m.n);
    m.readout_logical.assign(m.n, 0.0);
    for (int l = 0; l < m.n; ++l) {
      const PhysicalQubit p = routed.final_layout.empty() ? map.physical(l) : routed.final_layout[l];
      m.local_of_logical[l] = local_of(map, p);
      if (readout) m.readout_logical[l] = snap->qubit(p).readout_error;
    }

    const double r = std::numbers::sqrt2 / 2.0;
    const Mat2 to_x{r, r, r, -r};
    const Mat2 sdg{1.0, 0.0, 0.0, -kI};
    const Mat2 to_y = mul(to_x, sdg);
    for (const auto& term : h.terms()) {
      if (term.pauli.find_first_not_of('I') == std::string::npos) {
        m.identity += term.coeff;
        continue;
      }
      Term t;
      t.coeff = term.coeff;
      t.basis.assign(static_cast<std::size_t>(m.n), 'Z');
      double t_rot = 0.0;
      for (int l = 0; l < m.n; ++l) {
        const char c = term.pauli[l];
        if (c == 'I') continue;
        const int loc = m.local_of_logical[l];
        t.mask |= std::uint64_t{1} << loc;
        if (m.readout_logical[l] > 0.0) {
          t.readout_factor *= 1.0 - 2.0 * m.readout_logical[l];
          t.flips.emplace_back(loc, m.readout_logical[l]);
        }
        if (c == 'Z') continue;
        t.basis[static_cast<std::size_t>(loc)] = c;
        t.rotated = true;
        Op op;
        op.fixed = true;
        op.a = loc;
        op.matrix = c == 'X' ? to_x : to_y;
        if (snap) {
          const auto& qp = snap->qubit(map.physical(loc));
          t_rot = std::max(t_rot, qp.sq_duration_us);
          if (depol && qp.sq_error > 0.0) {
            op.depol = qp.sq_error;
            op.depol1 = depolarizing1(op.depol);
          }
        }
        t.rotation.ops.push_back(std::move(op));
      }
      if (t.rotated) damping_for(t.rotation, t_rot);
      m.terms.push_back(std::move(t));
    }
    m.readout_local.assign(m.n, 0.0);
    for (int l = 0; l < m.n; ++l) m.readout_local[m.local_of_logical[l]] = m.readout_logical[l];
    std::map<std::string, std::size_t> group_of;
    for (std::size_t j = 0; j < m.terms.size(); ++j) {
      auto [it, fresh] = group_of.try_emplace(m.terms[j].basis, m.groups.size());
      if (fresh) m.groups.emplace_back();
      m.groups[it->second].push_back(j);
    }
  } catch (...) {
    delete impl_;
    throw;
  }
}

Executor::~Executor() { delete impl_; }
Executor::Executor(Executor&& o) noexcept : impl_(o.impl_) { o.impl_ = nullptr; }
Executor& Executor::operator=(Executor&& o) noexcept {
  std::swap(impl_, o.impl_);
  return *this;
}

int Executor::num_qubits() const noexcept { return impl_->n; }
Backend Executor::backend() const noexcept { return impl_->backend; }

ExpectationEstimate Executor::expectation(std::span<const double> params, int shots,
                                          std::uint64_t seed) const {
  const Impl& m = *impl_;
  m.check_params(params);
  if (shots < 1) throw DomainError("shots must be at least 1");
  ExpectationEstimate est;
  est.shots = shots;
  est.seed = seed;
  est.value = m.identity;
  double var = 0.0;
  if (m.use_density()) {
    const auto exact = m.dm_term_values(params);
    for (std::size_t j = 0; j < m.terms.size(); ++j) {
      // Count of +1 outcomes over independent shots is binomial; this is the
      // same distribution a per-shot sampler produces.
      std::mt19937_64 rng(stream_key(seed, j, ~std::uint64_t{0}));
      std::binomial_distribution<int> binom(shots, (1.0 + exact[j]) / 2.0);
      const double mean = 2.0 * binom(rng) / shots - 1.0;
      est.value += m.terms[j].coeff * mean;
      var += m.terms[j].coeff * m.terms[j].coeff * (1.0 - mean * mean) / shots;
    }
  } else if (m.noisy) {
    std::vector<double> means(m.terms.size());
    for (const auto& g : m.groups) var += m.traj_group(params, g, shots, seed, means);
    for (std::size_t j = 0; j < m.terms.size(); ++j) est.value += m.terms[j].coeff * means[j];
  } else {
    for (std::size_t j = 0; j < m.terms.size(); ++j) {
      const double mean = m.traj_term(params, m.terms[j], j, shots, seed);
      est.value += m.terms[j].coeff * mean;
      var += m.terms[j].coeff * m.terms[j].coeff * (1.0 - mean * mean) / shots;
    }
  }
  est.std_error = std::sqrt(std::max(0.0, var));
  return est;
}

double Executor::exact(std::span<const double> params) const {
  const Impl& m = *impl_;
  m.check_params(params);
  if (m.n > kMaxDensityQubits) {
    throw TooManyQubits(std::to_string(m.n) + " qubits exceed the density-matrix bound");
  }
  const auto values = m.dm_term_values(params);
  double e = m.identity;
  for (std::size_t j = 0; j < values.size(); ++j) e += m.terms[j].coeff * values[j];
  return e;
}

std::vector<std::uint64_t> Executor::sample(std::span<const double> params, int shots,
                                            std::uint64_t seed) const {
  const Impl& m = *impl_;
  m.check_params(params);
  if (shots < 1) throw DomainError("shots must be at least 1");
  const std::uint64_t sample_stream = ~std::uint64_t{0} - 1;
  std::vector<std::uint64_t> out;
  out.reserve(shots);

  auto relabel = [&](std::size_t local, ShotRng& rng) {
    std::uint64_t bits = 0;
    for (int l = 0; l < m.n; ++l) {
      int b = (local >> m.local_of_logical[l]) & 1;
      if (m.readout_logical[l] > 0.0 && rng.uniform() < m.readout_logical[l]) b ^= 1;
      bits |= static_cast<std::uint64_t>(b) << l;
    }
    return bits;
  };

  if (m.use_density() || !m.noisy) {
    std::vector<double> probs;
    if (m.use_density()) {
      const StateVector rho = m.dm_state(params);
      const std::size_t dim = std::size_t{1} << m.n;
      probs.resize(dim);
      for (std::size_t i = 0; i < dim; ++i) probs[i] = std::max(0.0, rho[i | (i << m.n)].real());
    } else {
      const StateVector psi = m.traj_state(params, nullptr, nullptr);
      probs.resize(psi.size());
      for (std::size_t i = 0; i < psi.size(); ++i) probs[i] = std::norm(psi[i]);
    }
    std::vector<double> cdf(probs.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) cdf[i] = acc += probs[i];
    for (int s = 0; s < shots; ++s) {
      ShotRng rng(stream_key(seed, sample_stream, s));
      auto it = std::upper_bound(cdf.begin(), cdf.end(), rng.uniform() * acc);
      std::size_t idx = std::min<std::size_t>(it - cdf.begin(), cdf.size() - 1);
      while (probs[idx] == 0.0 && idx > 0) --idx;
      out.push_back(relabel(idx, rng));
    }
    return out;
  }
  for (int s = 0; s < shots; ++s) {
    ShotRng rng(stream_key(seed, sample_stream, s));
    const StateVector psi = m.traj_state(params, &rng, nullptr);
    out.push_back(relabel(Impl::draw(psi, rng.uniform()), rng));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Free functions
// ---------------------------------------------------------------------------

RoutedCircuit trivial_route(const ParamCircuit& circuit) {
  RoutedCircuit r;
  r.num_logical = circuit.num_qubits();
  r.num_params = circuit.num_params();
  r.gates.assign(circuit.gates().begin(), circuit.gates().end());
  std::vector<PhysicalQubit> id(circuit.num_qubits());
  for (int i = 0; i < circuit.num_qubits(); ++i) id[i] = i;
  r.map = CircuitMap(id);
  r.final_layout = id;
  return r;
}

StateVector simulate_ideal(const RoutedCircuit& routed, std::span<const double> params) {
  const int n = routed.num_logical;
  if (n > kMaxStatevectorQubits) {
    throw TooManyQubits(std::to_string(n) + " qubits exceed the statevector bound");
  }
  if (static_cast<int>(params.size()) != routed.num_params) {
    throw ParamLengthMismatch("expected " + std::to_string(routed.num_params) +
                              " parameters, got " + std::to_string(params.size()));
  }
  StateVector psi(std::size_t{1} << n, 0.0);
  psi[0] = 1.0;
  for (const auto& g : lower_swaps(routed.gates)) {
    if (g.op == GateOp::MEASURE) continue;
    const int a = local_of(routed.map, g.qubits[0]);
    if (g.arity() == 2) {
      apply_cx(psi.data(), psi.size(), a, local_of(routed.map, g.qubits[1]));
    } else {
      apply_1q(psi.data(), psi.size(), a, gate_matrix(g.op, g.angle(params)));
    }
  }
  // Reorder so bit l is logical qubit l at the end of the circuit.
  std::vector<int> local(n);
  for (int l = 0; l < n; ++l) {
    const PhysicalQubit p = routed.final_layout.empty() ? routed.map.physical(l)
                                                        : routed.final_layout[l];
    local[l] = local_of(routed.map, p);
  }
  StateVector out(psi.size());
  for (std::size_t i = 0; i < psi.size(); ++i) {
    std::size_t j = 0;
    for (int l = 0; l < n; ++l) j |= ((i >> local[l]) & 1u) << l;
    out[j] = psi[i];
  }
  return out;
}

StateVector simulate_ideal(const ParamCircuit& circuit, std::span<const double> params) {
  return simulate_ideal(trivial_route(circuit), params);
}

ExpectationEstimate expectation(const RoutedCircuit& routed, std::span<const double> params,
                                const PauliHamiltonian& h, int shots, std::uint64_t seed,
                                const NoiseBinding* noise, Backend backend) {
  return Executor(routed, h, noise, backend).expectation(params, shots, seed);
}

double exact_noisy_expectation(const RoutedCircuit& routed, std::span<const double> params,
                               const PauliHamiltonian& h, const NoiseBinding* noise) {
  if (routed.num_logical > kMaxDensityQubits) {
    throw TooManyQubits(std::to_string(routed.num_logical) +
                        " qubits exceed the density-matrix bound");
  }
  return Executor(routed, h, noise, Backend::DensityMatrix).exact(params);
}

double exact_ground_energy(const PauliHamiltonian& h) {
  const int n = h.num_qubits();
  if (n > kMaxExactQubits) {
    throw TooManyQubits(std::to_string(n) + " qubits exceed the exact eigensolver bound");
  }
  const std::size_t dim = std::size_t{1} << n;
  if (h.is_diagonal()) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < dim; ++i) {
      double e = 0.0;
      for (const auto& t : h.terms()) {
        int sign = 0;
        for (int q = 0; q < n; ++q) sign ^= (t.pauli[q] == 'Z') & ((i >> q) & 1);
        e += sign ? -t.coeff : t.coeff;
      }
      best = std::min(best, e);
    }
    return best;
  }

  // P|i> = phase * |i ^ flip>, with Y = i X Z contributing i and a sign.
  bool real = true;
  for (const auto& t : h.terms()) {
    if (std::count(t.pauli.begin(), t.pauli.end(), 'Y') % 2) real = false;
  }
  Eigen::MatrixXcd mat = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& t : h.terms()) {
    std::size_t flip = 0;
    int ny = 0;
    for (int q = 0; q < n; ++q) {
      if (t.pauli[q] == 'X' || t.pauli[q] == 'Y') flip |= std::size_t{1} << q;
      if (t.pauli[q] == 'Y') ++ny;
    }
    const Amplitude base = std::pow(kI, ny);
    for (std::size_t i = 0; i < dim; ++i) {
      int sign = 0;
      for (int q = 0; q < n; ++q) {
        const bool bit = (i >> q) & 1;
        if (bit && (t.pauli[q] == 'Z' || t.pauli[q] == 'Y')) sign ^= 1;
      }
      // Y|0> = i|1>, Y|1> = -i|0>: the -1 comes from bit 1 on Y, i from ny.
      mat(i ^ flip, i) += t.coeff * base * (sign ? -1.0 : 1.0);
    }
  }
  if (real) {
    Eigen::MatrixXd rmat = mat.real();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(rmat, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(mat, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

}  // namespace nest
