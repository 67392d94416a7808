#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <ostream>

namespace qct {

// Fixed-size Euclidean vector used for positions, velocities and ODE states.
template <int N>
struct Vec {
  std::array<double, N> c{};

  constexpr Vec() = default;

  template <class... T>
    requires(sizeof...(T) == N && N > 0)
  constexpr Vec(T... values) : c{static_cast<double>(values)...} {}

  static constexpr int size() { return N; }

  constexpr double& operator[](int i) { return c[static_cast<std::size_t>(i)]; }
  constexpr double operator[](int i) const { return c[static_cast<std::size_t>(i)]; }

  constexpr auto begin() { return c.begin(); }
  constexpr auto end() { return c.end(); }
  constexpr auto begin() const { return c.begin(); }
  constexpr auto end() const { return c.end(); }

  static constexpr Vec unit(int axis) {
    Vec e;
    e[axis] = 1.0;
    return e;
  }

  constexpr Vec& operator+=(const Vec& o) {
    for (int i = 0; i < N; ++i) (*this)[i] += o[i];
    return *this;
  }
  constexpr Vec& operator-=(const Vec& o) {
    for (int i = 0; i < N; ++i) (*this)[i] -= o[i];
    return *this;
  }
  constexpr Vec& operator*=(double s) {
    for (auto& v : c) v *= s;
    return *this;
  }

  friend constexpr Vec operator+(Vec a, const Vec& b) { return a += b; }
  friend constexpr Vec operator-(Vec a, const Vec& b) { return a -= b; }
  friend constexpr Vec operator-(Vec a) { return a *= -1.0; }
  friend constexpr Vec operator*(Vec a, double s) { return a *= s; }
  friend constexpr Vec operator*(double s, Vec a) { return a *= s; }
  friend constexpr Vec operator/(Vec a, double s) { return a *= (1.0 / s); }
  friend constexpr bool operator==(const Vec&, const Vec&) = default;

  friend std::ostream& operator<<(std::ostream& os, const Vec& v) {
    os << '(';
    for (int i = 0; i < N; ++i) os << (i ? ", " : "") << v[i];
    return os << ')';
  }
};

template <int N>
constexpr double dot(const Vec<N>& a, const Vec<N>& b) {
  double s = 0.0;
  for (int i = 0; i < N; ++i) s += a[i] * b[i];
  return s;
}

template <int N>
double norm(const Vec<N>& a) {
  return std::sqrt(dot(a, a));
}

template <int N>
bool all_finite(const Vec<N>& a) {
  for (double v : a)
    if (!std::isfinite(v)) return false;
  return true;
}

// Concatenate two vectors; used to pack (x, v) into a second-order ODE state.
template <int N, int M>
constexpr Vec<N + M> concat(const Vec<N>& a, const Vec<M>& b) {
  Vec<N + M> out;
  for (int i = 0; i < N; ++i) out[i] = a[i];
  for (int i = 0; i < M; ++i) out[N + i] = b[i];
  return out;
}

template <int Offset, int N, int M>
constexpr Vec<N> slice(const Vec<M>& a) {
  static_assert(Offset + N <= M);
  Vec<N> out;
  for (int i = 0; i < N; ++i) out[i] = a[Offset + i];
  return out;
}

}  // namespace qct
