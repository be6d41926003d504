#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <queue>
#include <span>
#include <vector>

namespace mwsim::quad {

/// Pairwise (cascade) summation; fixed order, error O(eps log n).
template <typename T>
T pairwise_sum(std::span<const T> v) {
  const std::size_t n = v.size();
  if (n == 0) return T{};
  if (n <= 8) {
    T s = v[0];
    for (std::size_t i = 1; i < n; ++i) s += v[i];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_sum(v.first(h)) + pairwise_sum(v.subspan(h));
}

template <typename T>
T pairwise_sum(const std::vector<T>& v) {
  return pairwise_sum(std::span<const T>(v.data(), v.size()));
}

struct Result {
  std::complex<double> value;
  double error = 0.0;
  int evaluations = 0;
  bool converged = false;
};

namespace detail {

// Gauss-Kronrod 7/15 abscissae and weights.
inline constexpr double xgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double wgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double wg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b;
  std::complex<double> value;
  double error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <typename F>
Panel gk15(F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const std::complex<double> fc = f(c);
  std::complex<double> rk = fc * wgk[7];
  std::complex<double> rg = fc * wg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * xgk[j];
    const std::complex<double> s = f(c - dx) + f(c + dx);
    rk += wgk[j] * s;
    if (j & 1) rg += wg[j / 2] * s;
  }
  return {a, b, rk * h, std::abs((rk - rg) * h)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) integration of a complex-valued f
/// over [a, b]. `breaks` optionally seeds the initial panels (must be
/// increasing and inside [a, b]); useful to resolve oscillation from the
/// start. Converged when the summed error estimate falls below
/// max(abs_tol, rel_tol * |I|).
template <typename F>
Result integrate(F&& f, double a, double b, double abs_tol, double rel_tol,
                 const std::vector<double>& breaks = {}, int max_panels = 20000) {
  Result r;
  if (b == a) {
    r.converged = true;
    return r;
  }
  std::vector<double> edges{a};
  for (double x : breaks) {
    if (x > edges.back() && x < b) edges.push_back(x);
  }
  edges.push_back(b);

  std::priority_queue<detail::Panel> heap;
  std::complex<double> total = 0.0;
  double err = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    auto p = detail::gk15(f, edges[i], edges[i + 1]);
    total += p.value;
    err += p.error;
    heap.push(p);
  }
  r.evaluations = 15 * static_cast<int>(heap.size());
  while (err > std::max(abs_tol, rel_tol * std::abs(total)) &&
         static_cast<int>(heap.size()) < max_panels) {
    const auto p = heap.top();
    heap.pop();
    const double m = 0.5 * (p.a + p.b);
    if (!(m > p.a && m < p.b)) {  // panel cannot be split further
      heap.push(p);
      break;
    }
    const auto l = detail::gk15(f, p.a, m);
    const auto rr = detail::gk15(f, m, p.b);
    r.evaluations += 30;
    total += l.value + rr.value - p.value;
    err += l.error + rr.error - p.error;
    heap.push(l);
    heap.push(rr);
  }
  // Re-sum in a fixed order so the value does not carry the update history.
  std::vector<detail::Panel> panels;
  panels.reserve(heap.size());
  while (!heap.empty()) {
    panels.push_back(heap.top());
    heap.pop();
  }
  std::sort(panels.begin(), panels.end(),
            [](const auto& x, const auto& y) { return x.a < y.a; });
  std::vector<std::complex<double>> vals;
  double e = 0.0;
  for (const auto& p : panels) {
    vals.push_back(p.value);
    e += p.error;
  }
  r.value = pairwise_sum(vals);
  r.error = e;
  r.converged = e <= std::max(abs_tol, rel_tol * std::abs(r.value));
  return r;
}

/// Gauss-Legendre nodes and weights on [-1, 1] (Newton on P_n).
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
  explicit GaussLegendre(int n);
};

}  // namespace mwsim::quad
