#include "oracles.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

#include <boost/math/distributions/chi_squared.hpp>

namespace relayqkd::oracle {

EveEnumeration enumerate_intercept_resend() {
  const Exact half(1, 2);
  EveEnumeration out;
  Exact matched{0};
  Exact matched_errors{0};
  // Bases as 0 = X, 1 = Y. The sent bit is 0; the bit-1 half is its mirror image.
  for (int sender = 0; sender < 2; ++sender) {
    for (int eve = 0; eve < 2; ++eve) {
      for (int eve_bit = 0; eve_bit < 2; ++eve_bit) {
        const Exact p_eve_bit = sender == eve ? Exact(eve_bit == 0 ? 1 : 0) : half;
        for (int receiver = 0; receiver < 2; ++receiver) {
          ++out.cases;
          const Exact p = half * half * p_eve_bit * half;
          if (sender == 0 && receiver == 0) {
            // Delivered state distribution, counted once per (eve, eve_bit).
            out.delivered_given_x0[{eve, eve_bit}] += half * p_eve_bit;
          }
          if (receiver != sender) continue;
          matched += p;
          const Exact p_error = receiver == eve ? Exact(eve_bit == 1 ? 1 : 0) : half;
          matched_errors += p * p_error;
        }
      }
    }
  }
  out.matched_error_rate = matched_errors / matched;
  return out;
}

namespace {

struct ChainSearch {
  std::vector<std::size_t> counts;
  std::unordered_map<std::uint64_t, std::size_t> memo;

  std::uint64_t key(std::size_t i, const std::vector<std::uint32_t>& masks) const {
    std::uint64_t k = i;
    for (std::uint32_t m : masks) k = (k << 12) | m;
    return k;
  }

  // Best chain count using link-0 tokens i.. with `masks` marking tokens of
  // links 1.. already consumed.
  std::size_t best(std::size_t i, std::vector<std::uint32_t>& masks) {
    if (i == counts[0]) return 0;
    const std::uint64_t k = key(i, masks);
    if (auto it = memo.find(k); it != memo.end()) return it->second;

    std::size_t result = best(i + 1, masks);  // leave token i unused
    pick(1, i, masks, result);
    memo.emplace(k, result);
    return result;
  }

  // Chooses one unused token on every link >= `link` for the chain started by
  // link-0 token i.
  void pick(std::size_t link, std::size_t i, std::vector<std::uint32_t>& masks, std::size_t& result) {
    if (link == counts.size()) {
      result = std::max(result, 1 + best(i + 1, masks));
      return;
    }
    std::uint32_t& m = masks[link - 1];
    for (std::size_t j = 0; j < counts[link]; ++j) {
      const std::uint32_t bit = 1U << j;
      if (m & bit) continue;
      m |= bit;
      pick(link + 1, i, masks, result);
      m &= ~bit;
    }
  }
};

}  // namespace

std::size_t max_chains_exhaustive(const std::vector<std::size_t>& tokens_per_link) {
  if (tokens_per_link.empty()) return 0;
  if (tokens_per_link.size() > 5) throw std::invalid_argument("exhaustive chain search supports at most 5 links");
  for (std::size_t c : tokens_per_link) {
    if (c > 12) throw std::invalid_argument("exhaustive chain search supports at most 12 tokens per link");
  }
  ChainSearch search{tokens_per_link, {}};
  std::vector<std::uint32_t> masks(tokens_per_link.size() - 1, 0);
  return search.best(0, masks);
}

Exact all_same_basis_fraction(int n_nodes) {
  if (n_nodes < 1 || n_nodes > 20) throw std::invalid_argument("node count out of range for enumeration");
  const std::int64_t total = std::int64_t{1} << n_nodes;
  std::int64_t same = 0;
  for (std::int64_t code = 0; code < total; ++code) {
    bool all_equal = true;
    const std::int64_t first = code & 1;
    for (int k = 1; k < n_nodes; ++k) all_equal = all_equal && ((code >> k) & 1) == first;
    if (all_equal) ++same;
  }
  return Exact(same, total);
}

double chi_square_fair(std::size_t ones, std::size_t n) {
  if (n == 0) throw std::invalid_argument("chi-square of zero trials");
  const double expected = static_cast<double>(n) / 2.0;
  const double d1 = static_cast<double>(ones) - expected;
  const double d0 = static_cast<double>(n - ones) - expected;
  return d1 * d1 / expected + d0 * d0 / expected;
}

double chi_square_critical(double alpha, double dof) {
  const boost::math::chi_squared dist(dof);
  return boost::math::quantile(boost::math::complement(dist, alpha));
}

}  // namespace relayqkd::oracle
