#pragma once

// Truncated two-mode density-matrix evolution under the full cavity master
// equation (cavity loss on both modes, atomic gain on a, atomic absorption on
// b, and the two-photon coherence terms in a^dag b^dag and a b).
//
// The generator is applied matrix-free: every term is a shift of the four
// photon-number indices (n_a, n_b | m_a, m_b) times a product of ladder
// factors. All operator products use the truncated ladder operators, so
// a a^dag vanishes on the top number state and the truncated generator stays
// exactly trace preserving and Hermiticity preserving.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "celsim/model.hpp"

namespace celsim {

using Complex = std::complex<double>;

/// Dense two-mode density matrix on the truncated number basis
/// |n_a, n_b>, n_a < cutoff_a, n_b < cutoff_b. Storage carries one zero layer
/// on each side of every index.
class FockState {
 public:
  FockState(int cutoff_a, int cutoff_b)
      : na_(cutoff_a), nb_(cutoff_b), pa_(cutoff_a + 2), pb_(cutoff_b + 2) {
    if (cutoff_a < 2 || cutoff_b < 2)
      throw std::invalid_argument("FockState: cutoffs must be >= 2");
    data_.assign(static_cast<std::size_t>(pa_) * pb_ * pa_ * pb_, Complex{});
  }

  int cutoff_a() const noexcept { return na_; }
  int cutoff_b() const noexcept { return nb_; }
  int dimension() const noexcept { return na_ * nb_; }

  Complex& operator()(int na, int nb, int ma, int mb) noexcept {
    return data_[index(na, nb, ma, mb)];
  }
  const Complex& operator()(int na, int nb, int ma, int mb) const noexcept {
    return data_[index(na, nb, ma, mb)];
  }

  std::size_t index(int na, int nb, int ma, int mb) const noexcept {
    return ((static_cast<std::size_t>(na + 1) * pb_ + (nb + 1)) * pa_ +
            (ma + 1)) * pb_ + (mb + 1);
  }

  // Index strides in the padded storage.
  std::ptrdiff_t stride_na() const noexcept {
    return static_cast<std::ptrdiff_t>(pb_) * pa_ * pb_;
  }
  std::ptrdiff_t stride_nb() const noexcept {
    return static_cast<std::ptrdiff_t>(pa_) * pb_;
  }
  std::ptrdiff_t stride_ma() const noexcept { return pb_; }

  /// Entry by composite row/column index i = n_a * cutoff_b + n_b.
  const Complex& entry(int i, int j) const noexcept {
    return (*this)(i / nb_, i % nb_, j / nb_, j % nb_);
  }

  std::vector<Complex>& storage() noexcept { return data_; }
  const std::vector<Complex>& storage() const noexcept { return data_; }

  Complex trace() const noexcept {
    Complex t{};
    for (int a = 0; a < na_; ++a)
      for (int b = 0; b < nb_; ++b) t += (*this)(a, b, a, b);
    return t;
  }

  double trace_defect() const noexcept { return std::abs(trace() - 1.0); }

  /// max |rho - rho^dagger| over all entries.
  double herm_defect() const noexcept {
    const int dim = dimension();
    double worst = 0.0;
    for (int i = 0; i < dim; ++i)
      for (int j = i; j < dim; ++j) {
        const double d = std::norm(entry(i, j) - std::conj(entry(j, i)));
        if (d > worst) worst = d;
      }
    return std::sqrt(worst);
  }

  /// Population in the top two number shells of either mode.
  double tail_mass() const noexcept {
    double tail = 0.0;
    for (int a = 0; a < na_; ++a)
      for (int b = 0; b < nb_; ++b)
        if (a >= na_ - 2 || b >= nb_ - 2) tail += (*this)(a, b, a, b).real();
    return tail;
  }

  bool all_finite() const noexcept {
    for (const auto& z : data_)
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
  }

 private:
  int na_, nb_;
  int pa_, pb_;
  std::vector<Complex> data_;
};

/// Normalized Bose-Einstein populations of one mode, truncated to `cutoff`.
inline std::vector<double> thermal_populations(double nbar, int cutoff) {
  if (!(nbar >= 0.0) || !std::isfinite(nbar))
    throw std::domain_error("thermal populations: nbar must be >= 0");
  std::vector<double> p(static_cast<std::size_t>(cutoff), 0.0);
  const double ratio = nbar / (1.0 + nbar);
  double term = 1.0 / (1.0 + nbar);
  double total = 0.0;
  for (auto& x : p) {
    x = term;
    total += term;
    term *= ratio;
  }
  for (auto& x : p) x /= total;
  return p;
}

inline FockState thermal_product_state(double nbar_a, double nbar_b,
                                       int cutoff_a, int cutoff_b) {
  FockState rho(cutoff_a, cutoff_b);
  const auto pa = thermal_populations(nbar_a, cutoff_a);
  const auto pb = thermal_populations(nbar_b, cutoff_b);
  for (int a = 0; a < cutoff_a; ++a)
    for (int b = 0; b < cutoff_b; ++b) rho(a, b, a, b) = pa[a] * pb[b];
  return rho;
}

struct FockMoments {
  double u = 0.0;       ///< <a^dag a>
  double v = 0.0;       ///< <b^dag b>
  Complex ab{};         ///< <a b>
  Complex a{};          ///< <a>
  Complex b{};          ///< <b>
  Complex a2{};         ///< <a^2>
  Complex b2{};         ///< <b^2>
  Complex adag_b{};     ///< <a^dag b>
};

inline FockMoments extract_moments(const FockState& rho) {
  const int na_max = rho.cutoff_a();
  const int nb_max = rho.cutoff_b();
  FockMoments m;
  for (int a = 0; a < na_max; ++a) {
    const double sa1 = std::sqrt(a + 1.0);
    const double sa12 = std::sqrt((a + 1.0) * (a + 2.0));
    for (int b = 0; b < nb_max; ++b) {
      const double sb1 = std::sqrt(b + 1.0);
      const double p = rho(a, b, a, b).real();
      m.u += a * p;
      m.v += b * p;
      // Out-of-range rows land in the zero padding or are skipped.
      if (a + 1 < na_max) m.a += sa1 * rho(a + 1, b, a, b);
      if (b + 1 < nb_max) m.b += sb1 * rho(a, b + 1, a, b);
      if (a + 1 < na_max && b + 1 < nb_max)
        m.ab += sa1 * sb1 * rho(a + 1, b + 1, a, b);
      if (a + 2 < na_max) m.a2 += sa12 * rho(a + 2, b, a, b);
      if (b + 2 < nb_max)
        m.b2 += std::sqrt((b + 1.0) * (b + 2.0)) * rho(a, b + 2, a, b);
      if (a + 1 < na_max && b >= 1)
        m.adag_b += sa1 * std::sqrt(static_cast<double>(b)) *
                    rho(a, b, a + 1, b - 1);
    }
  }
  return m;
}

/// Matrix-free action of the cavity master-equation generator.
class FockGenerator {
 public:
  FockGenerator(const ModelParams& p, int cutoff_a, int cutoff_b)
      : na_(cutoff_a), nb_(cutoff_b) {
    require_oracle_params(p);
    loss_a_ = p.kappa;
    gain_a_ = 0.25 * p.A * (1.0 - p.eta);
    loss_b_ = 0.25 * (p.A * (1.0 + p.eta) + 2.0 * p.kappa);
    pair_ = 0.25 * p.A * std::sqrt(std::max(0.0, 1.0 - p.eta * p.eta));
    const int n_max = std::max(cutoff_a, cutoff_b);
    sqrt_n_.resize(n_max + 1);
    for (int n = 0; n <= n_max; ++n) sqrt_n_[n] = std::sqrt(static_cast<double>(n));
  }

  /// out = L(in). Both states must share the cutoffs; padding of `out` stays 0.
  void apply(const FockState& in, FockState& out) const {
    const Complex* src = in.storage().data();
    Complex* dst = out.storage().data();
    const std::ptrdiff_t s_na = in.stride_na();
    const std::ptrdiff_t s_nb = in.stride_nb();
    const std::ptrdiff_t s_ma = in.stride_ma();
    const double* sq = sqrt_n_.data();
    const double kappa_half = 0.5 * loss_a_;

    // Diagonal of the truncated a a^dag: n + 1 below the top state, 0 on it.
    auto aad = [&](int n) { return n + 1 < na_ ? n + 1.0 : 0.0; };

    for (int na = 0; na < na_; ++na) {
      for (int nb = 0; nb < nb_; ++nb) {
        for (int ma = 0; ma < na_; ++ma) {
          const std::size_t base = in.index(na, nb, ma, 0);
          const Complex* r = src + base;
          Complex* o = dst + base;

          const double diag = -kappa_half * (na + ma) -
                              gain_a_ * (aad(na) + aad(ma)) - loss_b_ * nb;
          const double c_loss_a = loss_a_ * sq[na + 1] * sq[ma + 1];
          const double c_gain_a = 2.0 * gain_a_ * sq[na] * sq[ma];
          const double c_loss_b = 2.0 * loss_b_ * sq[nb + 1];
          const double c_rho_ab_dag = pair_ * sq[ma + 1];
          const double c_adag_rho_bdag = -2.0 * pair_ * sq[na];
          const double c_ab_dag_rho = pair_ * sq[na] * sq[nb];
          const double c_b_rho_a = -2.0 * pair_ * sq[nb + 1] * sq[ma];
          const double c_ab_rho = pair_ * sq[na + 1] * sq[nb + 1];
          const double c_rho_ab = pair_ * sq[ma];

          for (int mb = 0; mb < nb_; ++mb) {
            const double up = sq[mb + 1];
            Complex acc = (diag - loss_b_ * mb) * r[mb];
            acc += c_loss_a * r[mb + s_na + s_ma];          // a rho a^dag
            acc += c_gain_a * r[mb - s_na - s_ma];          // a^dag rho a
            acc += (c_loss_b * up) * r[mb + s_nb + 1];      // b rho b^dag
            acc += (c_rho_ab_dag * up) * r[mb + s_ma + 1];  // rho a^dag b^dag
            acc += (c_adag_rho_bdag * up) * r[mb - s_na + 1];  // a^dag rho b^dag
            acc += c_ab_dag_rho * r[mb - s_na - s_nb];      // a^dag b^dag rho
            acc += c_b_rho_a * r[mb + s_nb - s_ma];         // b rho a
            acc += c_ab_rho * r[mb + s_na + s_nb];          // a b rho
            acc += (c_rho_ab * sq[mb]) * r[mb - s_ma - 1];  // rho a b
            o[mb] = acc;
          }
        }
      }
    }
  }

 private:
  int na_, nb_;
  double loss_a_ = 0.0;   // kappa
  double gain_a_ = 0.0;   // A (1 - eta) / 4
  double loss_b_ = 0.0;   // (A (1 + eta) + 2 kappa) / 4
  double pair_ = 0.0;     // A sqrt(1 - eta^2) / 4
  std::vector<double> sqrt_n_;
};

struct FockSample {
  double t = 0.0;
  FockMoments moments;
  double trace_defect = 0.0;
  double herm_defect = 0.0;
  double tail_mass = 0.0;
};

struct FockOptions {
  double tail_threshold = 1e-6;
  std::size_t sample_every = 1;
  /// Full O(dim^2) Hermiticity and finiteness scan every this many steps;
  /// 0 disables it. The final state is always audited when enabled.
  std::size_t audit_every = 1;
};

struct FockRun {
  std::vector<FockSample> samples;
  bool truncation_suspect = false;
  double max_tail_mass = 0.0;
  double max_trace_defect = 0.0;
  double max_herm_defect = 0.0;
};

class FockEvolutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// RK4 evolution of `state` in place up to t_max with step <= h.
inline FockRun evolve(FockState& state, const ModelParams& p, double t_max,
                      double h, const FockOptions& options = {}) {
  if (!(t_max > 0.0) || !(h > 0.0) || h > t_max || options.sample_every == 0)
    throw std::invalid_argument("evolve: need t_max > 0 and 0 < h <= t_max");
  const FockGenerator generator(p, state.cutoff_a(), state.cutoff_b());
  const auto steps = static_cast<std::size_t>(std::ceil(t_max / h - 1e-9));
  const double step = t_max / static_cast<double>(steps);

  FockState k(state.cutoff_a(), state.cutoff_b());
  FockState stage(state.cutoff_a(), state.cutoff_b());
  std::vector<Complex> acc(state.storage().size());
  auto& y = state.storage();
  auto& kv = k.storage();
  auto& sv = stage.storage();
  const std::size_t size = y.size();

  FockRun run;
  auto record = [&](std::size_t index, bool audit) {
    FockSample s;
    s.t = static_cast<double>(index) * t_max / static_cast<double>(steps);
    s.moments = extract_moments(state);
    s.trace_defect = state.trace_defect();
    s.tail_mass = state.tail_mass();
    if (audit) s.herm_defect = state.herm_defect();
    if (!std::isfinite(s.trace_defect) || !std::isfinite(s.moments.u) ||
        !std::isfinite(s.moments.v) || (audit && !state.all_finite()))
      throw FockEvolutionError("Fock evolution produced non-finite entries at t=" +
                               std::to_string(s.t));
    run.max_tail_mass = std::max(run.max_tail_mass, s.tail_mass);
    run.max_trace_defect = std::max(run.max_trace_defect, s.trace_defect);
    run.max_herm_defect = std::max(run.max_herm_defect, s.herm_defect);
    run.samples.push_back(s);
  };

  auto audit_due = [&](std::size_t n) {
    return options.audit_every != 0 && (n % options.audit_every == 0 || n == steps);
  };
  record(0, audit_due(0));
  const double half = 0.5 * step;
  for (std::size_t n = 1; n <= steps; ++n) {
    generator.apply(state, k);
    for (std::size_t i = 0; i < size; ++i) {
      acc[i] = kv[i];
      sv[i] = y[i] + half * kv[i];
    }
    generator.apply(stage, k);
    for (std::size_t i = 0; i < size; ++i) {
      acc[i] += 2.0 * kv[i];
      sv[i] = y[i] + half * kv[i];
    }
    generator.apply(stage, k);
    for (std::size_t i = 0; i < size; ++i) {
      acc[i] += 2.0 * kv[i];
      sv[i] = y[i] + step * kv[i];
    }
    generator.apply(stage, k);
    const double sixth = step / 6.0;
    for (std::size_t i = 0; i < size; ++i) y[i] += sixth * (acc[i] + kv[i]);

    if (n % options.sample_every == 0 || n == steps) record(n, audit_due(n));
  }
  run.truncation_suspect = run.max_tail_mass > options.tail_threshold;
  return run;
}

}  // namespace celsim
