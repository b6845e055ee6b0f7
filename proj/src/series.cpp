#include "su11/series.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <string>

#include "su11/errors.hpp"

namespace su11 {

namespace {

const std::array<double, kMaxFactorial + 1>& factorial_table() {
  static const auto table = [] {
    std::array<double, kMaxFactorial + 1> t{};
    t[0] = 1.0;
    for (int i = 1; i <= kMaxFactorial; ++i) t[i] = t[i - 1] * i;
    return t;
  }();
  return table;
}

std::string describe(const Degrees& d) {
  std::string out = "(";
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(d[i]);
  }
  return out + ")";
}

}  // namespace

double factorial(int n) {
  if (n < 0 || n > kMaxFactorial) {
    throw ValidationError("factorial order " + std::to_string(n) + " outside [0, " +
                          std::to_string(kMaxFactorial) + "]");
  }
  return factorial_table()[n];
}

MultiSeries::MultiSeries(Degrees caps) : caps_(std::move(caps)) {
  strides_.resize(caps_.size());
  std::size_t total = 1;
  for (std::size_t i = caps_.size(); i-- > 0;) {
    if (caps_[i] < 0) throw ValidationError("negative series cap");
    strides_[i] = total;
    total *= static_cast<std::size_t>(caps_[i] + 1);
  }
  coeffs_.assign(total, CDual{});
}

MultiSeries MultiSeries::constant(Degrees caps, CDual value) {
  MultiSeries out(std::move(caps));
  out.coeffs_.front() = value;
  return out;
}

MultiSeries MultiSeries::variable(Degrees caps, Dummy var, CDual coeff) {
  return variable(std::move(caps), static_cast<int>(var), coeff);
}

MultiSeries MultiSeries::variable(Degrees caps, int var, CDual coeff) {
  MultiSeries out(std::move(caps));
  if (var < 0 || static_cast<std::size_t>(var) >= out.arity()) {
    throw ValidationError("dummy variable index " + std::to_string(var) +
                          " outside series arity " + std::to_string(out.arity()));
  }
  if (out.caps_[var] > 0) out.coeffs_[out.strides_[var]] = coeff;
  return out;
}

std::size_t MultiSeries::flat(const Degrees& index) const {
  if (index.size() != caps_.size()) {
    throw ValidationError("multi-index " + describe(index) + " has wrong arity");
  }
  std::size_t f = 0;
  for (std::size_t i = 0; i < caps_.size(); ++i) {
    if (index[i] < 0 || index[i] > caps_[i]) {
      throw ValidationError("multi-index " + describe(index) + " exceeds caps " +
                            describe(caps_));
    }
    f += strides_[i] * static_cast<std::size_t>(index[i]);
  }
  return f;
}

Degrees MultiSeries::index_of(std::size_t f) const {
  Degrees out(caps_.size());
  for (std::size_t i = 0; i < caps_.size(); ++i) {
    out[i] = static_cast<int>(f / strides_[i]);
    f %= strides_[i];
  }
  return out;
}

const CDual& MultiSeries::coeff(const Degrees& index) const { return coeffs_[flat(index)]; }

void MultiSeries::check_same_box(const MultiSeries& o) const {
  if (caps_ != o.caps_) {
    throw ValidationError("series caps differ: " + describe(caps_) + " vs " +
                          describe(o.caps_));
  }
}

MultiSeries& MultiSeries::operator+=(const MultiSeries& o) {
  check_same_box(o);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
  return *this;
}

MultiSeries& MultiSeries::operator-=(const MultiSeries& o) {
  check_same_box(o);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
  return *this;
}

MultiSeries& MultiSeries::operator*=(const CDual& k) {
  for (auto& c : coeffs_) c *= k;
  return *this;
}

MultiSeries& MultiSeries::operator+=(const CDual& k) {
  coeffs_.front() += k;
  return *this;
}

MultiSeries operator*(const MultiSeries& a, const MultiSeries& b) {
  a.check_same_box(b);
  MultiSeries out(a.caps_);
  const std::size_t n = a.coeffs_.size();
  const std::size_t arity = a.caps_.size();

  std::vector<Degrees> idx(n);
  for (std::size_t f = 0; f < n; ++f) idx[f] = a.index_of(f);

  std::vector<std::size_t> nz_b;
  for (std::size_t j = 0; j < n; ++j) {
    if (b.coeffs_[j] != CDual{}) nz_b.push_back(j);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const CDual& ai = a.coeffs_[i];
    if (ai == CDual{}) continue;
    for (std::size_t j : nz_b) {
      bool inside = true;
      for (std::size_t k = 0; k < arity; ++k) {
        if (idx[i][k] + idx[j][k] > a.caps_[k]) {
          inside = false;
          break;
        }
      }
      // Strides are linear, so the flat index of a sum is the sum of flats.
      if (inside) out.coeffs_[i + j] += ai * b.coeffs_[j];
    }
  }
  return out;
}

bool MultiSeries::approx_equal(const MultiSeries& o, double tol) const {
  if (caps_ != o.caps_) return false;
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    if (std::abs(coeffs_[i].value - o.coeffs_[i].value) > tol) return false;
    if (std::abs(coeffs_[i].dphi - o.coeffs_[i].dphi) > tol) return false;
  }
  return true;
}

MultiSeries series_from_poly(std::size_t arity, Degrees caps,
                             const std::vector<std::pair<Degrees, CDual>>& terms) {
  if (caps.size() != arity) throw ValidationError("caps length differs from arity");
  MultiSeries out(std::move(caps));
  for (const auto& [index, value] : terms) out.coeffs_[out.flat(index)] += value;
  return out;
}

MultiSeries series_exp(const MultiSeries& p) {
  const CDual& c0 = p.constant_term();
  if (c0 != CDual{}) throw ValidationError("series_exp requires a zero constant term");

  // With E = exp(p) and the Euler operator D = sum_i x_i d/dx_i we have
  // D E = (D p) E, i.e. |k| E_k = sum_{0 < j <= k} |j| p_j E_{k-j}.
  // Visiting indices by increasing total degree makes every E_{k-j} available.
  MultiSeries out(p.caps_);
  const std::size_t n = p.coeffs_.size();
  const std::size_t arity = p.caps_.size();
  std::vector<Degrees> idx(n);
  std::vector<int> degree(n);
  for (std::size_t f = 0; f < n; ++f) {
    idx[f] = p.index_of(f);
    degree[f] = std::accumulate(idx[f].begin(), idx[f].end(), 0);
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return degree[x] < degree[y]; });

  std::vector<std::size_t> nz_p;
  for (std::size_t j = 1; j < n; ++j) {
    if (p.coeffs_[j] != CDual{}) nz_p.push_back(j);
  }

  out.coeffs_[0] = CDual{1.0};
  for (std::size_t k : order) {
    if (k == 0) continue;
    CDual acc{};
    for (std::size_t j : nz_p) {
      bool below = true;
      for (std::size_t v = 0; v < arity; ++v) {
        if (idx[j][v] > idx[k][v]) {
          below = false;
          break;
        }
      }
      if (below) acc += CDual{static_cast<double>(degree[j])} * p.coeffs_[j] * out.coeffs_[k - j];
    }
    out.coeffs_[k] = acc * CDual{1.0 / degree[k]};
  }
  return out;
}

CDual extract_mixed(const MultiSeries& p, const Degrees& orders) {
  double scale = 1.0;
  for (int o : orders) scale *= factorial(o);
  return p.coeff(orders) * CDual{scale};
}

}  // namespace su11
