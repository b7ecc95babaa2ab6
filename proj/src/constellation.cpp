#include "mtom/constellation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <stdexcept>

namespace mtom {

namespace {

std::uint32_t gray(std::uint32_t k) { return k ^ (k >> 1); }

std::uint32_t gray_inverse(std::uint32_t g) {
  std::uint32_t k = 0;
  for (; g; g >>= 1) k ^= g;
  return k;
}

// Square QAM as the product of two BRGC PAMs, labels [I bits | Q bits],
// each PAM MSB first. Point index equals the label word.
Constellation square_qam(int m) {
  const int mh = m / 2;
  const int levels = 1 << mh;
  Constellation c;
  c.m = m;
  c.points.resize(static_cast<std::size_t>(1) << m);
  c.labels.resize(c.points.size());
  for (std::uint32_t u = 0; u < c.points.size(); ++u) {
    const std::uint32_t ui = u >> mh;
    const std::uint32_t uq = u & ((1u << mh) - 1u);
    const int ki = static_cast<int>(gray_inverse(ui));
    const int kq = static_cast<int>(gray_inverse(uq));
    c.points[u] = cplx(2 * ki - (levels - 1), 2 * kq - (levels - 1));
    c.labels[u] = u;
  }
  return c;
}

// Cross QAM (odd m) built by folding the outer columns of a Gray-labeled
// 2^((m+1)/2) x 2^((m-1)/2) rectangle onto top/bottom wings, with the wing
// placement that minimizes the total Gray penalty (exhaustive search over the
// quadrant-symmetric wing bijections; the fold keeps the constellation closed
// under sign flips with the two Gray MSBs acting as the Re/Im sign bits).
Constellation cross_qam(int m) {
  const int mi = (m + 1) / 2;
  const int mq = (m - 1) / 2;
  const int cols = 1 << mi;
  const int rows = 1 << mq;
  const int x_keep = 3 * rows / 2 - 1;
  // Wing cell (|x|, |y|) -> (x', y') per quadrant. m=5: the plain transpose is
  // already penalty-minimal. m=7: searched assignment, penalty 16 vs 32 for
  // the transpose.
  static const std::map<std::pair<int, int>, std::pair<int, int>> wing5 = {
      {{7, 1}, {1, 5}}, {{7, 3}, {3, 5}}};
  static const std::map<std::pair<int, int>, std::pair<int, int>> wing7 = {
      {{13, 1}, {5, 11}}, {{13, 3}, {3, 11}}, {{13, 5}, {3, 9}}, {{13, 7}, {5, 9}},
      {{15, 1}, {7, 11}}, {{15, 3}, {1, 11}}, {{15, 5}, {1, 9}}, {{15, 7}, {7, 9}}};
  const auto& wing = m == 5 ? wing5 : wing7;
  Constellation c;
  c.m = m;
  c.points.resize(static_cast<std::size_t>(1) << m);
  c.labels.resize(c.points.size());
  for (std::uint32_t u = 0; u < c.points.size(); ++u) {
    const std::uint32_t ui = u >> mq;
    const std::uint32_t uq = u & ((1u << mq) - 1u);
    const int ki = static_cast<int>(gray_inverse(ui));
    const int kq = static_cast<int>(gray_inverse(uq));
    double x = 2 * ki - (cols - 1);
    double y = 2 * kq - (rows - 1);
    if (std::abs(x) > x_keep) {
      const double sx = x > 0 ? 1.0 : -1.0;
      const double sy = y > 0 ? 1.0 : -1.0;
      const auto target = wing.at({static_cast<int>(std::abs(x)), static_cast<int>(std::abs(y))});
      x = sx * target.first;
      y = sy * target.second;
    }
    c.points[u] = cplx(x, y);
    c.labels[u] = u;
  }
  return c;
}

}  // namespace

Constellation brgc_qam(int m) {
  if (m >= 2 && m % 2 == 0 && m <= 10) return normalize_power(square_qam(m));
  if (m == 5 || m == 7) return normalize_power(cross_qam(m));
  throw std::invalid_argument("brgc_qam: unsupported m=" + std::to_string(m) +
                              " (even 2..10 for square QAM, 5 or 7 for cross QAM)");
}

std::pair<int, int> default_sign_positions(int m) { return {0, (m + 1) / 2}; }

Constellation normalize_power(const Constellation& c) {
  double e = 0.0;
  for (const auto& p : c.points) e += std::norm(p);
  e /= static_cast<double>(c.points.size());
  if (e <= 0.0) throw std::invalid_argument("normalize_power: all-zero constellation");
  Constellation out = c;
  const double s = 1.0 / std::sqrt(e);
  for (auto& p : out.points) p *= s;
  return out;
}

QuadrantSet normalize_power(const QuadrantSet& q) {
  double e = 0.0;
  for (const auto& p : q.reduced_points) e += std::norm(p);
  e /= static_cast<double>(q.reduced_points.size());
  if (e <= 0.0) throw std::invalid_argument("normalize_power: all-zero constellation");
  QuadrantSet out = q;
  const double s = 1.0 / std::sqrt(e);
  for (auto& p : out.reduced_points) p *= s;
  return out;
}

std::uint32_t compose_quadrant_label(std::uint32_t reduced, int m,
                                     std::pair<int, int> sign_positions, int s_re, int s_im) {
  std::uint32_t full = 0;
  int src = 0;
  for (int pos = 0; pos < m; ++pos) {
    int bit;
    if (pos == sign_positions.first)
      bit = s_re;
    else if (pos == sign_positions.second)
      bit = s_im;
    else
      bit = static_cast<int>((reduced >> (m - 3 - src)) & 1u), ++src;
    full = (full << 1) | static_cast<std::uint32_t>(bit);
  }
  return full;
}

namespace {

void check_sign_positions(int m, std::pair<int, int> sp) {
  if (sp.first == sp.second || sp.first < 0 || sp.second < 0 || sp.first >= m || sp.second >= m)
    throw std::invalid_argument("sign label positions out of range or equal");
}

}  // namespace

Constellation expand_quadrant(const QuadrantSet& q, std::pair<int, int> sign_positions) {
  check_sign_positions(q.m, sign_positions);
  const int p_re = sign_positions.first;
  const int p_im = sign_positions.second;
  Constellation c;
  c.m = q.m;
  c.points.resize(static_cast<std::size_t>(1) << q.m);
  c.labels.resize(c.points.size());
  for (std::uint32_t u = 0; u < c.points.size(); ++u) c.labels[u] = u;
  for (int j = 0; j < q.size(); ++j) {
    const cplx r = q.reduced_points[static_cast<std::size_t>(j)];
    for (int s_re = 0; s_re < 2; ++s_re) {
      for (int s_im = 0; s_im < 2; ++s_im) {
        const std::uint32_t u =
            compose_quadrant_label(static_cast<std::uint32_t>(j), q.m, {p_re, p_im}, s_re, s_im);
        c.points[u] = cplx(s_re ? r.real() : -r.real(), s_im ? r.imag() : -r.imag());
      }
    }
  }
  return c;
}

QuadrantSet reduce_quadrant(const Constellation& c, std::pair<int, int> sign_positions) {
  check_sign_positions(c.m, sign_positions);
  const int p_re = sign_positions.first;
  const int p_im = sign_positions.second;
  std::vector<int> index_of_label(c.points.size());
  for (int i = 0; i < c.size(); ++i) index_of_label[c.labels[static_cast<std::size_t>(i)]] = i;
  QuadrantSet q;
  q.m = c.m;
  q.sign_positions = sign_positions;
  q.reduced_points.resize(static_cast<std::size_t>(1) << (c.m - 2));
  for (std::uint32_t j = 0; j < q.reduced_points.size(); ++j) {
    const std::uint32_t u = compose_quadrant_label(j, c.m, {p_re, p_im}, 1, 1);
    q.reduced_points[j] = c.points[static_cast<std::size_t>(index_of_label[u])];
  }
  return q;
}

Moments moments(const Constellation& c, const std::vector<double>* pmf) {
  const std::size_t n = c.points.size();
  std::vector<double> uniform;
  const std::vector<double>* p = pmf;
  if (p == nullptr) {
    uniform.assign(n, 1.0 / static_cast<double>(n));
    p = &uniform;
  } else {
    if (p->size() != n) throw std::invalid_argument("moments: pmf size mismatch");
    double sum = 0.0;
    for (double w : *p) {
      if (w < 0.0) throw std::invalid_argument("moments: negative pmf entry");
      sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("moments: pmf does not sum to 1");
  }
  Moments mo;
  double peak = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a2 = std::norm(c.points[i]);
    const double w = (*p)[i];
    mo.mu2 += w * a2;
    mo.mu4 += w * a2 * a2;
    mo.mu6 += w * a2 * a2 * a2;
    peak = std::max(peak, a2);
  }
  mo.papr = peak / mo.mu2;
  return mo;
}

std::vector<std::vector<int>> merge_groups(const Constellation& c, double threshold) {
  const int n = c.size();
  std::vector<int> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int a) {
    while (parent[static_cast<std::size_t>(a)] != a) {
      parent[static_cast<std::size_t>(a)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(a)])];
      a = parent[static_cast<std::size_t>(a)];
    }
    return a;
  };
  for (int i = 0; i < n; ++i)
    for (int k = i + 1; k < n; ++k)
      if (std::abs(c.points[static_cast<std::size_t>(i)] - c.points[static_cast<std::size_t>(k)]) < threshold)
        parent[static_cast<std::size_t>(find(i))] = find(k);
  std::vector<std::vector<int>> groups;
  std::vector<int> root_group(static_cast<std::size_t>(n), -1);
  for (int i = 0; i < n; ++i) {
    const int r = find(i);
    if (root_group[static_cast<std::size_t>(r)] < 0) {
      root_group[static_cast<std::size_t>(r)] = static_cast<int>(groups.size());
      groups.emplace_back();
    }
    groups[static_cast<std::size_t>(root_group[static_cast<std::size_t>(r)])].push_back(i);
  }
  return groups;
}

}  // namespace mtom
