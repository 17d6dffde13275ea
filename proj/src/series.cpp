#include "freeconv/series.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "freeconv/convolution.hpp"
#include "freeconv/error.hpp"

namespace freeconv {

FormalSeries::FormalSeries(std::vector<Complex> coefficients) : c_(std::move(coefficients)) {
  if (c_.empty()) c_.resize(1);
}

FormalSeries FormalSeries::identity(std::size_t order) {
  FormalSeries s(order);
  if (order >= 1) s.c_[1] = 1.0;
  return s;
}

FormalSeries FormalSeries::constant(Complex c, std::size_t order) {
  FormalSeries s(order);
  s.c_[0] = c;
  return s;
}

FormalSeries FormalSeries::truncated(std::size_t order) const {
  FormalSeries s(order);
  for (std::size_t k = 0; k <= order && k < c_.size(); ++k) s.c_[k] = c_[k];
  return s;
}

FormalSeries FormalSeries::derivative() const {
  FormalSeries s(order());
  for (std::size_t k = 1; k < c_.size(); ++k) s.c_[k - 1] = static_cast<double>(k) * c_[k];
  return s;
}

FormalSeries operator+(const FormalSeries& a, const FormalSeries& b) {
  FormalSeries s(std::min(a.order(), b.order()));
  for (std::size_t k = 0; k <= s.order(); ++k) s.c_[k] = a.c_[k] + b.c_[k];
  return s;
}

FormalSeries operator-(const FormalSeries& a, const FormalSeries& b) {
  FormalSeries s(std::min(a.order(), b.order()));
  for (std::size_t k = 0; k <= s.order(); ++k) s.c_[k] = a.c_[k] - b.c_[k];
  return s;
}

FormalSeries operator*(const FormalSeries& a, const FormalSeries& b) {
  FormalSeries s(std::min(a.order(), b.order()));
  for (std::size_t i = 0; i <= s.order(); ++i) {
    if (a.c_[i] == Complex{}) continue;
    for (std::size_t j = 0; i + j <= s.order(); ++j) s.c_[i + j] += a.c_[i] * b.c_[j];
  }
  return s;
}

FormalSeries operator*(Complex scale, const FormalSeries& a) {
  FormalSeries s = a;
  for (auto& c : s.c_) c *= scale;
  return s;
}

FormalSeries FormalSeries::reciprocal() const {
  if (c_[0] == Complex{}) throw PreconditionFailed("reciprocal of a series with zero constant term");
  FormalSeries r(order());
  r.c_[0] = 1.0 / c_[0];
  for (std::size_t n = 1; n <= order(); ++n) {
    Complex acc = 0.0;
    for (std::size_t k = 1; k <= n; ++k) acc += c_[k] * r.c_[n - k];
    r.c_[n] = -acc / c_[0];
  }
  return r;
}

FormalSeries FormalSeries::compose(const FormalSeries& g) const {
  if (g[0] != Complex{}) throw PreconditionFailed("composition needs g(0) = 0");
  const std::size_t n = std::min(order(), g.order());
  const FormalSeries inner = g.truncated(n);
  // Horner: (((c_N)g + c_{N−1})g + …)g + c₀
  FormalSeries acc = FormalSeries::constant(c_[n], n);
  for (std::size_t k = n; k-- > 0;) {
    acc = acc * inner;
    acc.c_[0] += c_[k];
  }
  return acc;
}

FormalSeries FormalSeries::shift_down() const {
  if (c_[0] != Complex{}) throw PreconditionFailed("shift_down needs a zero constant term");
  FormalSeries s(order() > 0 ? order() - 1 : 0);
  for (std::size_t k = 1; k < c_.size(); ++k) s.c_[k - 1] = c_[k];
  return s;
}

FormalSeries FormalSeries::revert() const {
  if (order() < 1 || c_[0] != Complex{} || c_[1] == Complex{})
    throw PreconditionFailed("reversion needs f(0) = 0 and f'(0) != 0");
  const std::size_t n = order();
  FormalSeries g(n);
  g.c_[1] = 1.0 / c_[1];
  // g ← g − (f∘g − x)/(f'∘g); the number of correct terms doubles each pass.
  for (std::size_t prec = std::min<std::size_t>(2, n);; prec = std::min(2 * prec, n)) {
    const FormalSeries f = truncated(prec);
    const FormalSeries gp = g.truncated(prec);
    const FormalSeries fg = f.compose(gp) - FormalSeries::identity(prec);
    const FormalSeries dfg = f.derivative().truncated(prec).compose(gp);
    const FormalSeries step = fg * dfg.reciprocal();
    const FormalSeries next = gp - step;
    for (std::size_t k = 0; k <= prec; ++k) g.c_[k] = next.c_[k];
    if (prec == n) break;
  }
  return g;
}

FormalSeries psi_series(const CircleMeasure& m, std::size_t order) {
  const CircleMeasure v = validate(m);
  FormalSeries s(order);
  for (std::size_t k = 1; k <= order; ++k) s[k] = moment(v, static_cast<int>(k));
  return s;
}

FormalSeries eta_series(const CircleMeasure& m, std::size_t order) {
  const FormalSeries psi = psi_series(m, order);
  return psi * (FormalSeries::constant(1.0, order) + psi).reciprocal();
}

MomentSeries boxtimes_moments(const CircleMeasure& m1, const CircleMeasure& m2, std::size_t order) {
  if (order < 1) throw PreconditionFailed("oracle order must be at least 1");
  const FormalSeries e1 = eta_series(m1, order), e2 = eta_series(m2, order);
  for (const auto* e : {&e1, &e2})
    if (std::abs((*e)[1]) < kOracleMinFirstMoment) {
      std::ostringstream os;
      os << "first moment " << std::abs((*e)[1]) << " is too small for series reversion";
      throw ZeroFirstMoment(os.str());
    }

  // S(x) = η⁻¹(x)/x is multiplicative under ⊠.
  const FormalSeries s1 = e1.revert().shift_down();
  const FormalSeries s2 = e2.revert().shift_down();
  const FormalSeries product = s1 * s2;
  FormalSeries inverse(order);
  for (std::size_t k = 0; k < order; ++k) inverse[k + 1] = product[k];
  const FormalSeries eta = inverse.revert();
  const FormalSeries psi = eta * (FormalSeries::constant(1.0, order) - eta).reciprocal();

  MomentSeries out;
  for (std::size_t k = 1; k <= order; ++k) out.moments.push_back(psi[k]);
  return out;
}

double compare_moments(const ConvolutionResult& result, const MomentSeries& oracle) {
  double worst = 0.0;
  for (std::size_t k = 1; k <= oracle.order(); ++k)
    worst = std::max(worst, std::abs(result_moment(result, static_cast<int>(k)) - oracle(k)));
  return worst;
}

}  // namespace freeconv
