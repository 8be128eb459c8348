#include "smdkit/prox.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace smdkit {

namespace {

void check_dim(std::size_t expect, std::size_t got, const char* where) {
  if (expect != got) {
    throw std::invalid_argument(std::string(where) + ": expected dimension " +
                                std::to_string(expect) + ", got " +
                                std::to_string(got));
  }
}

void check_finite(std::span<const double> v, const char* where) {
  for (double c : v) {
    if (!std::isfinite(c)) {
      throw std::invalid_argument(std::string(where) +
                                  ": non-finite coordinate in input vector");
    }
  }
}

}  // namespace

ProxGeometry::ProxGeometry(ProxKind kind, std::size_t dim)
    : kind_(kind), dim_(dim) {
  if (dim == 0) throw std::invalid_argument("ProxGeometry: dimension must be positive");
}

double ProxGeometry::p() const {
  return kind_ == ProxKind::entropic_simplex ? 1.0 : 2.0;
}

double ProxGeometry::q() const {
  return kind_ == ProxKind::entropic_simplex
             ? std::numeric_limits<double>::infinity()
             : 2.0;
}

std::vector<double> ProxGeometry::start_point() const {
  if (kind_ == ProxKind::euclidean_free) return std::vector<double>(dim_, 0.0);
  return std::vector<double>(dim_, 1.0 / static_cast<double>(dim_));
}

bool ProxGeometry::contains(std::span<const double> x, std::string* why) const {
  if (x.size() != dim_) {
    if (why) *why = "dimension mismatch";
    return false;
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i])) {
      if (why) *why = "coordinate " + std::to_string(i) + " is not finite";
      return false;
    }
  }
  if (!constrained()) return true;
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < -kFeasibilityTol) {
      if (why) {
        *why = "coordinate " + std::to_string(i) + " negative (" +
               std::to_string(x[i]) + ")";
      }
      return false;
    }
    sum += x[i];
  }
  if (std::abs(sum - 1.0) > kFeasibilityTol * static_cast<double>(dim_)) {
    if (why) *why = "coordinates sum to " + std::to_string(sum) + ", not 1";
    return false;
  }
  return true;
}

void ProxGeometry::require_feasible(std::span<const double> x,
                                    const char* where) const {
  std::string why;
  if (!contains(x, &why)) {
    throw std::domain_error(std::string(where) + ": infeasible point: " + why);
  }
}

double ProxGeometry::prox_value(std::span<const double> x) const {
  require_feasible(x, "prox_value");
  if (kind_ == ProxKind::entropic_simplex) {
    /* d(x) = ln n + sum x_i ln x_i, with 0 ln 0 = 0; zero at uniform x. */
    double s = std::log(static_cast<double>(dim_));
    for (double c : x) {
      if (c > 0.0) s += c * std::log(c);
    }
    return std::max(s, 0.0);
  }
  if (kind_ == ProxKind::euclidean_free) {
    double s = 0.0;
    for (double c : x) s += c * c;
    return 0.5 * s;
  }
  /* Simplex-restricted Euclidean case is centered so d(start) = 0. */
  double s = 0.0;
  double center = 1.0 / static_cast<double>(dim_);
  for (double c : x) s += (c - center) * (c - center);
  return 0.5 * s;
}

double ProxGeometry::bregman(std::span<const double> x,
                             std::span<const double> y) const {
  require_feasible(x, "bregman");
  require_feasible(y, "bregman");
  if (kind_ == ProxKind::entropic_simplex) {
    double s = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) {
      if (y[i] <= 0.0) {
        throw std::domain_error(
            "bregman: entropic divergence needs strictly positive y, "
            "coordinate " +
            std::to_string(i) + " is zero");
      }
      if (x[i] > 0.0) s += x[i] * std::log(x[i] / y[i]);
    }
    return std::max(s, 0.0);
  }
  double s = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) {
    s += (x[i] - y[i]) * (x[i] - y[i]);
  }
  return 0.5 * s;
}

std::vector<double> ProxGeometry::mirror_step(std::span<const double> x,
                                              std::span<const double> v,
                                              double h) const {
  require_feasible(x, "mirror_step");
  check_dim(dim_, v.size(), "mirror_step");
  check_finite(v, "mirror_step");
  if (!(h > 0.0)) {
    throw std::invalid_argument("mirror_step: step size must be positive");
  }

  if (kind_ == ProxKind::entropic_simplex) {
    /* z_i proportional to x_i exp(-h v_i); computed in log space with
     * max subtraction so arbitrary v cannot overflow. x_i = 0 stays 0. */
    std::vector<double> w(dim_);
    double wmax = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < dim_; ++i) {
      w[i] = x[i] > 0.0 ? std::log(x[i]) - h * v[i]
                        : -std::numeric_limits<double>::infinity();
      wmax = std::max(wmax, w[i]);
    }
    std::vector<double> z(dim_);
    double sum = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) {
      z[i] = std::exp(w[i] - wmax);
      sum += z[i];
    }
    for (double& c : z) c /= sum;  /* renormalize once per step */
    return z;
  }

  std::vector<double> z(x.begin(), x.end());
  for (std::size_t i = 0; i < dim_; ++i) z[i] -= h * v[i];
  if (kind_ == ProxKind::euclidean_free) return z;
  return project_to_simplex(z);
}

std::vector<double> project_to_simplex(std::span<const double> y) {
  if (y.empty()) throw std::invalid_argument("project_to_simplex: empty input");
  std::vector<double> u(y.begin(), y.end());
  std::sort(u.begin(), u.end(), std::greater<double>());
  /* Largest k with u_(k) + (1 - sum of top k)/k > 0 gives the threshold. */
  double cum = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cum += u[j];
    double cand = (1.0 - cum) / static_cast<double>(j + 1);
    if (u[j] + cand > 0.0) theta = cand;
  }
  std::vector<double> z(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    z[i] = std::max(0.0, y[i] + theta);
  }
  /* One renormalization bounds drift from the thresholded sum. */
  double s = std::accumulate(z.begin(), z.end(), 0.0);
  for (double& c : z) c /= s;
  return z;
}

}  // namespace smdkit
