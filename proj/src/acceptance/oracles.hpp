#pragma once

// Independent reference computations used by the tests and the acceptance
// suite. Nothing here calls into the simulator or the post-processing code.

#include <cstddef>
#include <cstdint>
#include <map>
#include <vector>

#include <boost/rational.hpp>

namespace relayqkd::oracle {

using Exact = boost::rational<std::int64_t>;

/// Outcome of exhaustively enumerating an intercept/resend attack on one hop.
struct EveEnumeration {
  /// P(receiver bit != sender bit | receiver basis == sender basis).
  Exact matched_error_rate{0};
  /// Joint distribution of the resent state given the sent state |0>_X:
  /// key is (basis 0=X/1=Y, bit).
  std::map<std::pair<int, int>, Exact> delivered_given_x0;
  /// Number of (sender basis, Eve basis, Eve outcome, receiver basis) cases
  /// visited with the sent bit held at 0.
  std::size_t cases = 0;
};

EveEnumeration enumerate_intercept_resend();

/// Maximum number of disjoint chains (one token from each link list, any
/// slots) found by memoised exhaustive search. Intended for <= 12 tokens per
/// link and up to 3 links.
std::size_t max_chains_exhaustive(const std::vector<std::size_t>& tokens_per_link);

/// Count of basis patterns over n nodes in which every node used the same
/// basis, by direct enumeration; returned as a fraction of 2^n.
Exact all_same_basis_fraction(int n_nodes);

/// Pearson chi-square statistic of `ones` successes in `n` trials against
/// Bernoulli(1/2).
double chi_square_fair(std::size_t ones, std::size_t n);

/// Upper critical value of chi-square with `dof` degrees of freedom at
/// significance `alpha`.
double chi_square_critical(double alpha, double dof);

}  // namespace relayqkd::oracle
