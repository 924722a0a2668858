#include "uniconsist/function_classes.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "uniconsist/error.hpp"

namespace uniconsist {

double besov_seminorm(const SignalSpec& signal, double s) {
  if (!(s > 0.0)) throw PreconditionError("besov_seminorm: s must be positive");
  const std::vector<double> mass = signal.frequency_masses();
  double suffix = 0.0;
  double best = 0.0;
  for (std::size_t m = mass.size(); m >= 1; --m) {
    suffix += mass[m - 1];
    if (suffix > 0.0) best = std::max(best, std::pow(static_cast<double>(m), 2.0 * s) * suffix);
  }
  return best;
}

bool BesovBody::contains(const SignalSpec& signal) const { return besov_seminorm(signal, s) <= P0; }

TailBoundReport tail_bound_check(const SignalSpec& signal, double s, double P0, double r, double n, double C1,
                                 std::optional<double> norm_sq_lower_c) {
  if (!(s > 0.0) || !(P0 > 0.0) || !(r > 0.0) || !(n >= 1.0) || !(C1 > 0.0))
    throw PreconditionError("tail_bound_check: s, P0, r, C1 must be positive and n >= 1");
  TailBoundReport rep;
  rep.C1 = C1;
  rep.seminorm = besov_seminorm(signal, s);
  if (rep.seminorm > P0) {
    std::ostringstream os;
    os << "tail_bound_check: signal is not a member (seminorm " << rep.seminorm << " > P0 " << P0 << ")";
    throw PreconditionError(os.str());
  }
  const double scale = std::pow(n, -2.0 * r);
  rep.l_n = static_cast<std::size_t>(std::ceil(C1 * std::pow(n, r / s)));
  const std::vector<double> mass = signal.frequency_masses();
  double tail = 0.0, head = 0.0;
  for (std::size_t j = 1; j <= mass.size(); ++j) (j >= rep.l_n ? tail : head) += mass[j - 1];
  rep.tail_sum = tail;
  rep.bound = P0 * std::pow(C1, -2.0 * s) * scale;
  rep.ok = tail <= rep.bound;
  if (norm_sq_lower_c) {
    const double c = *norm_sq_lower_c;
    if (!(c > 0.0)) throw PreconditionError("tail_bound_check: norm lower constant must be positive");
    if (!(std::pow(C1, 2.0 * s) > 2.0 * P0 / c))
      throw PreconditionError("tail_bound_check: C1^{2s} must exceed 2 P0 / c");
    if (signal.norm_sq() < c * scale)
      throw PreconditionError("tail_bound_check: ||f||^2 is below the declared c n^{-2r}");
    rep.head_sum = head;
    rep.head_lower_bound = (c - P0 * std::pow(C1, -2.0 * s)) * scale;
    rep.head_ok = head >= *rep.head_lower_bound && *rep.head_lower_bound >= 0.5 * c * scale;
  }
  return rep;
}

double head_besov_radius(double s, std::size_t cutoff, double norm_sq) {
  if (!(s > 0.0)) throw PreconditionError("head_besov_radius: s must be positive");
  return std::pow(static_cast<double>(std::max<std::size_t>(cutoff, 1)), 2.0 * s) * norm_sq;
}

bool finite_band_membership(const SignalSpec& signal, const FiniteBand& band) {
  const auto c = signal.coeffs();
  const std::size_t cut = band.l * coords_per_frequency(signal.basis());
  for (std::size_t i = cut; i < c.size(); ++i)
    if (std::abs(c[i]) > 1e-15) return false;
  return std::sqrt(signal.norm_sq()) <= band.P0;
}

std::size_t descriptor_dimension(const SetDescriptor& set) {
  if (const auto* e = std::get_if<EllipsoidSet>(&set)) return e->axes.size();
  const auto& p = std::get<PointSet>(set);
  return p.points.empty() ? 0 : p.points.front().size();
}

namespace {

// Flips the sign so the largest-magnitude entry is positive.
void canonical_sign(Eigen::VectorXd& v) {
  Eigen::Index k = 0;
  v.cwiseAbs().maxCoeff(&k);
  if (v(k) < 0.0) v = -v;
}

WidthSequence ellipsoid_widths(const EllipsoidSet& e, std::size_t i_max) {
  const auto dim = static_cast<Eigen::Index>(e.axes.size());
  Eigen::VectorXd a(dim);
  for (Eigen::Index k = 0; k < dim; ++k) {
    if (!(e.axes[static_cast<std::size_t>(k)] > 0.0)) throw PreconditionError("ellipsoid semi-axes must be positive");
    a(k) = e.axes[static_cast<std::size_t>(k)];
  }
  const Eigen::MatrixXd A = a.asDiagonal();
  Eigen::MatrixXd Q(dim, 0);
  WidthSequence w;
  for (std::size_t i = 0; i < i_max; ++i) {
    const Eigen::MatrixXd P = Eigen::MatrixXd::Identity(dim, dim) - Q * Q.transpose();
    const Eigen::MatrixXd M = P * A;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
    const double d = svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
    Eigen::VectorXd v = svd.matrixV().col(0);
    canonical_sign(v);
    const Eigen::VectorXd elem = A * v;
    w.d.push_back(d);
    w.basis_vectors.emplace_back(elem.data(), elem.data() + elem.size());
    if (d > 1e-300 && Q.cols() < dim) {
      Q.conservativeResize(Eigen::NoChange, Q.cols() + 1);
      Q.col(Q.cols() - 1) = (P * elem) / (P * elem).norm();
    }
  }
  return w;
}

WidthSequence point_widths(const PointSet& p, std::size_t i_max) {
  const std::size_t dim = descriptor_dimension(p);
  std::vector<Eigen::VectorXd> pts;
  for (const auto& q : p.points) {
    if (q.size() != dim) throw PreconditionError("point cloud has points of different dimension");
    pts.emplace_back(Eigen::Map<const Eigen::VectorXd>(q.data(), static_cast<Eigen::Index>(dim)));
  }
  std::vector<Eigen::VectorXd> basis;
  WidthSequence w;
  for (std::size_t i = 0; i < i_max; ++i) {
    double best = -1.0;
    std::size_t arg = 0;
    Eigen::VectorXd best_res;
    for (std::size_t k = 0; k < pts.size(); ++k) {
      Eigen::VectorXd res = pts[k];
      // Modified Gram-Schmidt, applied twice for stability.
      for (int pass = 0; pass < 2; ++pass)
        for (const auto& b : basis) res -= b.dot(res) * b;
      const double dist = res.norm();
      if (dist > best) {
        best = dist;
        arg = k;
        best_res = res;
      }
    }
    w.d.push_back(best);
    w.basis_vectors.emplace_back(pts[arg].data(), pts[arg].data() + pts[arg].size());
    if (best > 1e-300) basis.push_back(best_res / best);
  }
  return w;
}

}  // namespace

WidthSequence greedy_widths(const SetDescriptor& set, std::size_t i_max) {
  const std::size_t dim = descriptor_dimension(set);
  if (dim == 0) throw PreconditionError("greedy_widths: empty set descriptor");
  if (const auto* p = std::get_if<PointSet>(&set); p && p->points.empty())
    throw PreconditionError("greedy_widths: empty point cloud");
  if (const auto* e = std::get_if<EllipsoidSet>(&set)) return ellipsoid_widths(*e, i_max);
  return point_widths(std::get<PointSet>(set), i_max);
}

std::string CompactnessVerdict::describe() const {
  std::ostringstream os;
  if (first_index)
    os << "d_" << *first_index << " < " << epsilon;
  else
    os << "no decay through i_max = " << i_max;
  return os.str();
}

CompactnessVerdict compactness_diagnostic(const SetDescriptor& set, double epsilon, std::size_t i_max) {
  CompactnessVerdict v;
  v.epsilon = epsilon;
  v.i_max = i_max == 0 ? descriptor_dimension(set) : i_max;
  v.widths = greedy_widths(set, v.i_max);
  for (std::size_t i = 0; i < v.widths.d.size(); ++i)
    if (v.widths.d[i] < epsilon) {
      v.first_index = i + 1;
      break;
    }
  return v;
}

}  // namespace uniconsist
