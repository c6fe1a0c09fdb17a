#pragma once

#include <cmath>
#include <string>

#include "fsnoma/errors.hpp"
#include "fsnoma/specfun.hpp"

namespace fsnoma::detail {

// Running sum with the SeriesControl stopping rule. add() returns true once the
// latest term and its geometric tail estimate (ratio = |t_{n+1}/t_n|) are both
// below rel_tol*|sum| + abs_tol.
class SeriesSum {
public:
  explicit SeriesSum(const SeriesControl& ctl) : ctl_(ctl) {}

  bool add(double term, double ratio) { return add(term, std::abs(term), ratio); }

  // size bounds |term| from above and is used for the stopping test, so a term
  // that vanishes by accident does not end the series early.
  bool add(double term, double size, double ratio) {
    if (!std::isfinite(term)) throw TruncationError("series term is not finite");
    ++n_;
    // Kahan compensation keeps long alternating sums stable.
    const double y = term - comp_;
    const double t = sum_ + y;
    comp_ = (t - sum_) - y;
    sum_ = t;
    const double bound = ctl_.rel_tol * std::abs(sum_) + ctl_.abs_tol;
    if (size == 0.0 && ratio == 0.0) return true;
    if (size <= bound && ratio < 1.0 && size * ratio / (1.0 - ratio) <= bound) return true;
    if (n_ >= ctl_.max_terms)
      throw TruncationError("series did not converge within " + std::to_string(ctl_.max_terms) +
                            " terms");
    return false;
  }

  double value() const { return sum_; }
  int terms() const { return n_; }

private:
  SeriesControl ctl_;
  double sum_ = 0.0;
  double comp_ = 0.0;
  int n_ = 0;
};

}  // namespace fsnoma::detail
