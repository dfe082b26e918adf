#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "rise/error.hpp"
#include "rise/metrics.hpp"

using rise::Labels;

namespace {

Labels random_labels(std::size_t n, std::size_t c, rise::Rng& rng) {
  Labels l(n);
  for (auto& x : l) x = rng.below(c);
  return l;
}

Labels relabel(const Labels& l, rise::Rng& rng) {
  const std::size_t c = *std::max_element(l.begin(), l.end()) + 1;
  std::vector<std::size_t> perm(c);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (std::size_t i = c; i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
  Labels out(l.size());
  for (std::size_t i = 0; i < l.size(); ++i) out[i] = perm[l[i]];
  return out;
}

}  // namespace

TEST_CASE("accuracy: worked examples") {
  CHECK(rise::clustering_accuracy({1, 1, 0, 0}, {0, 0, 1, 1}) == 1.0);
  CHECK(rise::clustering_accuracy({1, 0, 0, 0}, {0, 0, 1, 1}) == 0.75);
  CHECK(rise::clustering_accuracy({0, 1, 2}, {0, 1, 2}) == 1.0);
  // More predicted clusters than classes: unmatched clusters score nothing.
  CHECK(rise::clustering_accuracy({0, 1, 2, 3}, {0, 0, 1, 1}) == 0.5);
  CHECK_THROWS_AS(rise::clustering_accuracy({0, 1}, {0}), rise::ArgumentError);
}

TEST_CASE("nmi: worked examples") {
  CHECK(rise::nmi({2, 2, 0, 0, 1}, {0, 0, 1, 1, 2}) == doctest::Approx(1.0));
  CHECK(rise::nmi({0, 0, 0, 0}, {0, 0, 1, 1}) == 0.0);
  CHECK(rise::nmi({0, 1}, {0, 1}) == doctest::Approx(1.0));
  // Hand value: pred {0,0,1,1} vs truth {0,1,1,1}.
  const double hp = std::log(2.0);
  const double ht = -(0.25 * std::log(0.25) + 0.75 * std::log(0.75));
  const double mi = 0.25 * std::log(0.25 / (0.5 * 0.25)) + 0.25 * std::log(0.25 / (0.5 * 0.75)) +
                    0.5 * std::log(0.5 / (0.5 * 0.75));
  CHECK(rise::nmi({0, 0, 1, 1}, {0, 1, 1, 1}) == doctest::Approx(mi / std::sqrt(hp * ht)));
  CHECK_THROWS_AS(rise::nmi({0}, {}), rise::ArgumentError);
}

TEST_CASE("purity: worked examples") {
  CHECK(rise::purity({0, 0, 1, 1}, {0, 1, 1, 1}) == 0.75);
  CHECK(rise::purity({3, 1, 2}, {3, 1, 2}) == 1.0);
  CHECK(rise::purity({0, 0, 0, 0, 0}, {0, 1, 1, 2, 1}) == doctest::Approx(0.6));
  CHECK_THROWS_AS(rise::purity({0, 1}, {0}), rise::ArgumentError);
}

TEST_CASE("accuracy equals brute force over bijections") {
  rise::Rng rng(1);
  for (int t = 0; t < 500; ++t) {
    const std::size_t n = 1 + rng.below(8);
    const Labels p = random_labels(n, 1 + rng.below(4), rng);
    const Labels q = random_labels(n, 1 + rng.below(4), rng);
    CHECK(rise::clustering_accuracy(p, q) == doctest::Approx(oracle::brute_force_accuracy(p, q)));
  }
}

TEST_CASE("metric ordering, symmetry and relabel invariance") {
  rise::Rng rng(2);
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = 1 + rng.below(60);
    const Labels p = random_labels(n, 1 + rng.below(6), rng);
    const Labels q = random_labels(n, 1 + rng.below(6), rng);
    const auto s = rise::evaluate(p, q);
    CHECK(s.acc >= 0.0);
    CHECK(s.acc <= s.purity + 1e-15);
    CHECK(s.purity <= 1.0);
    CHECK(s.nmi >= 0.0);
    CHECK(s.nmi <= 1.0);
    CHECK(std::abs(rise::nmi(p, q) - rise::nmi(q, p)) < 1e-12);
    const Labels pr = relabel(p, rng);
    const Labels qr = relabel(q, rng);
    CHECK(rise::clustering_accuracy(pr, qr) == doctest::Approx(s.acc));
    CHECK(rise::purity(pr, qr) == doctest::Approx(s.purity));
    CHECK(std::abs(rise::nmi(pr, qr) - s.nmi) < 1e-12);
  }
}

TEST_CASE("max_weight_assignment picks the optimal permutation") {
  // Rows [1 9 3], [8 2 7], [4 6 5]: the best of the six permutations is 9 + 8 + 5 = 22.
  const std::vector<double> w = {1, 9, 3, 8, 2, 7, 4, 6, 5};
  CHECK(rise::max_weight_assignment(w, 3) == std::vector<std::size_t>{1, 0, 2});
}
