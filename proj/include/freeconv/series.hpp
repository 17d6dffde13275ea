#pragma once

#include <cstddef>
#include <vector>

#include "freeconv/measure.hpp"

namespace freeconv {

struct ConvolutionResult;

/// Truncated power series c₀ + c₁x + … + c_N x^N. All arithmetic is exact
/// up to the truncation order.
class FormalSeries {
 public:
  explicit FormalSeries(std::size_t order) : c_(order + 1) {}
  explicit FormalSeries(std::vector<Complex> coefficients);

  static FormalSeries identity(std::size_t order);  // x
  static FormalSeries constant(Complex c, std::size_t order);

  std::size_t order() const noexcept { return c_.size() - 1; }
  Complex operator[](std::size_t k) const { return k < c_.size() ? c_[k] : Complex{}; }
  Complex& operator[](std::size_t k) { return c_[k]; }
  const std::vector<Complex>& coefficients() const noexcept { return c_; }

  FormalSeries truncated(std::size_t order) const;
  FormalSeries derivative() const;

  friend FormalSeries operator+(const FormalSeries& a, const FormalSeries& b);
  friend FormalSeries operator-(const FormalSeries& a, const FormalSeries& b);
  friend FormalSeries operator*(const FormalSeries& a, const FormalSeries& b);
  friend FormalSeries operator*(Complex s, const FormalSeries& a);

  /// 1/f; needs c₀ ≠ 0.
  FormalSeries reciprocal() const;
  /// f(g(x)); needs g(0) = 0.
  FormalSeries compose(const FormalSeries& g) const;
  /// Compositional inverse g with f(g(x)) = x; needs c₀ = 0, c₁ ≠ 0.
  /// Newton iteration, doubling the number of correct terms per step.
  FormalSeries revert() const;
  /// Divides by x; needs c₀ = 0.
  FormalSeries shift_down() const;

 private:
  std::vector<Complex> c_;
};

/// m₁..m_N; moments()[k − 1] = m_k.
struct MomentSeries {
  std::vector<Complex> moments;

  Complex operator()(std::size_t k) const { return moments.at(k - 1); }
  std::size_t order() const noexcept { return moments.size(); }
};

/// Smallest |m₁| for which the oracle is applied.
inline constexpr double kOracleMinFirstMoment = 1e-8;

/// ψ_μ as a series: coefficients m₁..m_N with zero constant term.
FormalSeries psi_series(const CircleMeasure& m, std::size_t order);

/// η = ψ/(1 + ψ) as a series.
FormalSeries eta_series(const CircleMeasure& m, std::size_t order);

/// Moments of μ₁ ⊠ μ₂ from the S-transform identity
/// η⁻¹(x) = η₁⁻¹(x)·η₂⁻¹(x)/x. Throws ZeroFirstMoment.
MomentSeries boxtimes_moments(const CircleMeasure& m1, const CircleMeasure& m2, std::size_t order);

/// max_k |m_k(result) − oracle_k| over k = 1..N.
double compare_moments(const ConvolutionResult& result, const MomentSeries& oracle);

}  // namespace freeconv
