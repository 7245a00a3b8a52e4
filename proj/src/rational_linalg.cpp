#include "ssle/rational_linalg.hpp"

#include "ssle/errors.hpp"

namespace ssle {

LinearSolution solve_linear(RMatrix a, RVector b) {
  const std::size_t rows = a.size();
  if (b.size() != rows) throw UsageError("solve_linear: dimension mismatch");
  const std::size_t cols = rows ? a[0].size() : 0;
  std::vector<int> pivot_col;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t piv = r;
    while (piv < rows && sgn(a[piv][c]) == 0) ++piv;
    if (piv == rows) continue;
    std::swap(a[piv], a[r]);
    std::swap(b[piv], b[r]);
    Rational inv = 1 / a[r][c];
    for (std::size_t k = c; k < cols; ++k) a[r][k] *= inv;
    b[r] *= inv;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || sgn(a[i][c]) == 0) continue;
      Rational f = a[i][c];
      for (std::size_t k = c; k < cols; ++k) a[i][k] -= f * a[r][k];
      b[i] -= f * b[r];
    }
    pivot_col.push_back(static_cast<int>(c));
    ++r;
  }
  LinearSolution out;
  for (std::size_t i = r; i < rows; ++i)
    if (sgn(b[i]) != 0) return out;
  out.consistent = true;
  out.particular.assign(cols, Rational(0));
  std::vector<bool> is_pivot(cols, false);
  for (std::size_t i = 0; i < r; ++i) {
    out.particular[pivot_col[i]] = b[i];
    is_pivot[pivot_col[i]] = true;
  }
  for (std::size_t f = 0; f < cols; ++f) {
    if (is_pivot[f]) continue;
    RVector v(cols, Rational(0));
    v[f] = 1;
    for (std::size_t i = 0; i < r; ++i) v[pivot_col[i]] = -a[i][f];
    out.kernel.push_back(std::move(v));
  }
  return out;
}

std::vector<RVector> nullspace(const RMatrix& a) {
  return solve_linear(a, RVector(a.size(), Rational(0))).kernel;
}

namespace {

Rational horner(const RVector& c, const Rational& x) {
  Rational acc = 0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
  return acc;
}

std::string poly_string(const RVector& c, const std::string& var) {
  std::string out;
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (sgn(c[k]) == 0) continue;
    if (!out.empty()) out += " + ";
    out += "(" + to_string(c[k]) + ")";
    if (k == 1) out += "*" + var;
    if (k > 1) out += "*" + var + "^" + std::to_string(k);
  }
  return out.empty() ? "0" : out;
}

}  // namespace

Rational RationalFunction::operator()(const Rational& x) const {
  Rational den = horner(q, x);
  if (sgn(den) == 0) throw SingularInputError("rational function pole");
  return horner(p, x) / den;
}

std::string RationalFunction::to_string(const std::string& var) const {
  return "[" + poly_string(p, var) + "] / [" + poly_string(q, var) + "]";
}

std::optional<RationalFunction> fit_rational_function(const RVector& xs, const RVector& ys, int max_total) {
  if (xs.size() != ys.size()) throw UsageError("fit_rational_function: size mismatch");
  for (int total = 0; total <= max_total; ++total) {
    for (int dq = 0; dq <= total; ++dq) {
      const int dp = total - dq;
      const std::size_t unknowns = static_cast<std::size_t>(dp + dq + 2);
      // Keep at least one sample in reserve to confirm the fit.
      if (xs.size() < unknowns) continue;
      RMatrix a;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        RVector row;
        Rational pw = 1;
        for (int k = 0; k <= dp; ++k, pw *= xs[i]) row.push_back(pw);
        pw = 1;
        for (int k = 0; k <= dq; ++k, pw *= xs[i]) row.push_back(-ys[i] * pw);
        a.push_back(std::move(row));
      }
      auto ker = nullspace(a);
      for (const auto& v : ker) {
        RationalFunction f;
        f.p.assign(v.begin(), v.begin() + dp + 1);
        f.q.assign(v.begin() + dp + 1, v.end());
        int lead = -1;
        for (int k = dq; k >= 0; --k)
          if (sgn(f.q[k]) != 0) {
            lead = k;
            break;
          }
        if (lead < 0) continue;
        Rational s = 1 / f.q[lead];
        for (auto& c : f.p) c *= s;
        for (auto& c : f.q) c *= s;
        bool ok = true;
        for (std::size_t i = 0; i < xs.size() && ok; ++i) {
          Rational den = horner(f.q, xs[i]);
          ok = sgn(den) != 0 && horner(f.p, xs[i]) == ys[i] * den;
        }
        if (ok) return f;
      }
    }
  }
  return std::nullopt;
}

}  // namespace ssle
