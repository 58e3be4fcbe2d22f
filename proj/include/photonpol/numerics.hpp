#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace photonpol {

/// Sum of term(0) + ... + term(n-1) by recursive halving. The association
/// order depends only on n, so results are reproducible bit for bit.
template <class T, class Term>
T pairwise_sum(std::size_t begin, std::size_t end, const Term& term) {
  constexpr std::size_t kLeaf = 8;
  if (end - begin <= kLeaf) {
    T acc{};
    for (std::size_t i = begin; i < end; ++i) acc = acc + term(i);
    return acc;
  }
  const std::size_t mid = begin + (end - begin) / 2;
  return pairwise_sum<T>(begin, mid, term) + pairwise_sum<T>(mid, end, term);
}

template <class T, class Term>
T pairwise_sum(std::size_t n, const Term& term) {
  return pairwise_sum<T>(std::size_t{0}, n, term);
}

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule mapped onto [lo, hi].
QuadratureRule gauss_legendre(int n, double lo, double hi);

/// n-point trapezoid rule for a periodic integrand on [0, 2pi).
QuadratureRule periodic_trapezoid(int n);

}  // namespace photonpol
