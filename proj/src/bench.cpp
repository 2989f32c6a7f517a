#include "gsr/bench.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/QR>

#include "gsr/errors.hpp"
#include "gsr/rng.hpp"

namespace gsr {

std::string to_string(DesignKind k) {
  switch (k) {
    case DesignKind::I: return "I";
    case DesignKind::II: return "II";
    case DesignKind::III: return "III";
  }
  return "?";
}

std::string to_string(SignalKind k) {
  switch (k) {
    case SignalKind::i: return "i";
    case SignalKind::ii: return "ii";
    case SignalKind::iii: return "iii";
    case SignalKind::iv: return "iv";
  }
  return "?";
}

DesignKind design_kind_from_string(const std::string& s) {
  if (s == "I" || s == "1") return DesignKind::I;
  if (s == "II" || s == "2") return DesignKind::II;
  if (s == "III" || s == "3") return DesignKind::III;
  throw std::invalid_argument("unknown design kind '" + s + "' (expected I, II or III)");
}

SignalKind signal_kind_from_string(const std::string& s) {
  if (s == "i" || s == "1") return SignalKind::i;
  if (s == "ii" || s == "2") return SignalKind::ii;
  if (s == "iii" || s == "3") return SignalKind::iii;
  if (s == "iv" || s == "4") return SignalKind::iv;
  throw std::invalid_argument("unknown signal kind '" + s + "' (expected i, ii, iii or iv)");
}

Mat gen_design(DesignKind kind, Index n, Index p, std::uint64_t seed, std::uint64_t stream) {
  if (n <= 0 || p <= 0) throw std::invalid_argument("gen_design: n and p must be positive");
  Rng rng(seed, stream);
  Mat a(n, p);
  switch (kind) {
    case DesignKind::I:
      // Row-major draw order so the matrix does not depend on storage layout.
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < p; ++j) a(i, j) = rng.normal();
      break;
    case DesignKind::II:
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < p; ++j) a(i, j) = rng.uniform() < 0.5 ? -1.0 : 1.0;
      break;
    case DesignKind::III: {
      if (!std::has_single_bit(static_cast<std::uint64_t>(p)))
        throw std::invalid_argument("gen_design: type III needs p to be a power of two");
      if (n > p) throw std::invalid_argument("gen_design: type III needs n <= p");
      IndexList rows = rng.sample_without_replacement(p, n);
      std::sort(rows.begin(), rows.end());
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < p; ++j)
          a(i, j) = std::popcount(static_cast<std::uint64_t>(rows[i] & j)) % 2 ? -1.0 : 1.0;
      break;
    }
  }
  return a;
}

Signal gen_signal(SignalKind kind, const GroupStructure& g, Index r_bar, double alpha,
                  std::uint64_t seed, std::uint64_t stream) {
  if (r_bar < 0 || r_bar > g.num_groups())
    throw std::invalid_argument("gen_signal: need 0 <= r_bar <= m");
  Rng rng(seed, stream);
  Signal s{Vec::Zero(g.dim()), rng.sample_without_replacement(g.num_groups(), r_bar)};
  std::sort(s.support.begin(), s.support.end());
  const Index negatives = r_bar / 2;
  for (Index k = 0; k < r_bar; ++k) {
    const Index grp = s.support[k];
    for (Index j : g.group(grp)) {
      switch (kind) {
        case SignalKind::i: s.x[j] = alpha * rng.normal(); break;
        case SignalKind::ii: s.x[j] = alpha * rng.uniform() - 0.5; break;
        case SignalKind::iii: s.x[j] = rng.normal() >= 0.0 ? alpha : -alpha; break;
        case SignalKind::iv: {
          const double mag = 1e5 / std::sqrt(static_cast<double>(grp + 1));
          s.x[j] = k < negatives ? -mag : mag;
          break;
        }
      }
    }
  }
  // A type ii draw can land exactly on zero for some alpha; keep the support honest.
  for (Index grp : s.support)
    if (g.gather(s.x, grp).norm() == 0.0)
      throw std::runtime_error("gen_signal: a selected group came out identically zero");
  return s;
}

Vec gen_observations(const Mat& a, const Vec& x, double theta1, double theta2,
                     std::uint64_t seed, std::uint64_t stream) {
  if (x.size() != a.cols()) throw std::invalid_argument("gen_observations: x does not match A");
  if (!(theta1 >= 0.0) || !(theta2 >= 0.0))
    throw std::invalid_argument("gen_observations: theta1 and theta2 must be >= 0");
  Rng rng(seed, stream);
  const Vec e1 = rng.normal_vector(a.cols());
  const Vec e2 = rng.normal_vector(a.rows());
  Vec xs = x;
  if (theta1 > 0.0) xs += (theta1 / e1.norm()) * e1;
  Vec b = a * xs;
  if (theta2 > 0.0) b += (theta2 / e2.norm()) * e2;
  return b;
}

Instance make_instance(const InstanceSpec& spec) {
  if (spec.m <= 0 || spec.p <= 0 || spec.n <= 0)
    throw std::invalid_argument("make_instance: n, p, m must be positive");
  Instance inst;
  inst.groups = GroupStructure::contiguous(spec.p, spec.m);
  inst.A = gen_design(spec.design, spec.n, spec.p, spec.seed, derive_stream(spec.index, 1));
  Signal sig = gen_signal(spec.signal, inst.groups, spec.r_bar, spec.alpha, spec.seed,
                          derive_stream(spec.index, 2));
  inst.b = gen_observations(inst.A, sig.x, spec.theta1, spec.theta2, spec.seed,
                            derive_stream(spec.index, 3));
  inst.radius = 1000.0 * sig.x.lpNorm<Eigen::Infinity>();
  inst.x_true = std::move(sig.x);
  inst.support_true = std::move(sig.support);
  inst.seed = spec.seed;
  inst.meta = {{"design", to_string(spec.design)},
               {"signal", to_string(spec.signal)},
               {"n", spec.n},
               {"p", spec.p},
               {"m", spec.m},
               {"r_bar", spec.r_bar},
               {"alpha", spec.alpha},
               {"theta1", spec.theta1},
               {"theta2", spec.theta2},
               {"seed", spec.seed},
               {"index", spec.index},
               {"radius", inst.radius},
               {"rng", Rng::kName}};
  return inst;
}

namespace {

Mat columns(const Mat& a, const IndexList& cols) { return a(Eigen::all, cols); }

}  // namespace

OracleResult oracle_ls(const Instance& inst) {
  const IndexList cols = inst.groups.columns_of(inst.support_true);
  const double n = static_cast<double>(inst.n());
  OracleResult out;
  out.x_ls = Vec::Zero(inst.p());
  Eigen::ColPivHouseholderQR<Mat> qr;
  if (!cols.empty()) {
    qr.compute(columns(inst.A, cols));
    if (qr.rank() < static_cast<Index>(cols.size()))
      throw SingularDesign("oracle_ls: restricted design is rank deficient");
    out.x_ls(cols) = qr.solve(inst.b);
  }
  out.residual_noise = inst.A.transpose() * (inst.A * out.x_ls - inst.b) / n;
  if (inst.x_true) {
    const Vec eps = inst.b - inst.A * *inst.x_true;
    out.correlated_noise = inst.A.transpose() * eps / n;
    out.projected_noise = Vec::Zero(inst.p());
    if (!cols.empty()) out.projected_noise(cols) = qr.solve(eps);
  }
  return out;
}

Vec box_restricted_ls(const Mat& a, const Vec& b, const IndexList& cols, double radius,
                      double tol, int max_iter) {
  const Index k = static_cast<Index>(cols.size());
  if (k == 0) return Vec();
  const Mat as = columns(a, cols);
  const double n = static_cast<double>(a.rows());
  Eigen::ColPivHouseholderQR<Mat> qr(as);
  if (qr.rank() == k) {
    Vec z = qr.solve(b);
    if (z.lpNorm<Eigen::Infinity>() <= radius) return z;
  }
  const Mat h = as.transpose() * as / n;
  const Vec c = as.transpose() * b / n;
  const double lip = Eigen::SelfAdjointEigenSolver<Mat>(h, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
  if (!(lip > 0.0)) return Vec::Zero(k);
  auto clip = [&](const Vec& v) { return v.cwiseMax(-radius).cwiseMin(radius); };
  Vec x = Vec::Zero(k), y = x;
  double t = 1.0;
  for (int it = 0; it < max_iter; ++it) {
    const Vec grad = h * y - c;
    const Vec xn = clip(y - grad / lip);
    const double gm = lip * (xn - y).norm();
    const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    // Restart when the momentum step goes uphill.
    if ((y - xn).dot(xn - x) > 0.0) {
      y = xn;
      t = 1.0;
    } else {
      y = xn + ((t - 1.0) / tn) * (xn - x);
      t = tn;
    }
    x = xn;
    if (gm <= tol) {
      const Vec g2 = h * x - c;
      if (lip * (clip(x - g2 / lip) - x).norm() <= tol) break;
    }
  }
  return x;
}

BruteForceResult brute_force_zero_norm(const Instance& inst, double nu, double radius) {
  const Index m = inst.groups.num_groups();
  if (m > kBruteForceMaxGroups)
    throw std::invalid_argument("brute_force_zero_norm: at most 16 groups can be enumerated");
  if (!(nu > 0.0)) throw std::invalid_argument("brute_force_zero_norm: nu must be > 0");
  const double n = static_cast<double>(inst.n());
  BruteForceResult best;
  best.objective = std::numeric_limits<double>::infinity();
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
    IndexList sel;
    for (Index i = 0; i < m; ++i)
      if (mask >> i & 1u) sel.push_back(i);
    const IndexList cols = inst.groups.columns_of(sel);
    Vec x = Vec::Zero(inst.p());
    if (!cols.empty()) x(cols) = box_restricted_ls(inst.A, inst.b, cols, radius);
    const std::size_t nnz = group_zero_norm(x, inst.groups);
    const double obj = nu * 0.5 * (inst.A * x - inst.b).squaredNorm() / n + static_cast<double>(nnz);
    if (obj < best.objective) {
      best.objective = obj;
      best.x = std::move(x);
    }
  }
  for (Index i = 0; i < m; ++i)
    if (inst.groups.gather(best.x, i).norm() > 0.0) best.support.push_back(i);
  return best;
}

Instance assemble_multitask(const std::vector<TaskData>& tasks) {
  if (tasks.empty()) throw std::invalid_argument("assemble_multitask: no tasks");
  Index n = 0, p = 0;
  std::vector<Index> sizes;
  for (const auto& t : tasks) {
    if (t.X.rows() == 0 || t.X.cols() == 0)
      throw std::invalid_argument("assemble_multitask: empty task");
    if (t.X.rows() != t.y.size())
      throw std::invalid_argument("assemble_multitask: task response length does not match rows");
    n += t.X.rows();
    p += t.X.cols();
    sizes.push_back(t.X.cols());
  }
  Instance inst;
  inst.A = Mat::Zero(n, p);
  inst.b.resize(n);
  Index r = 0, c = 0;
  for (const auto& t : tasks) {
    inst.A.block(r, c, t.X.rows(), t.X.cols()) = t.X;
    inst.b.segment(r, t.y.size()) = t.y;
    r += t.X.rows();
    c += t.X.cols();
  }
  inst.groups = GroupStructure::from_sizes(sizes);
  inst.radius = 2000.0;
  inst.meta = {{"kind", "multitask"}, {"tasks", tasks.size()}, {"radius", inst.radius}};
  return inst;
}

Metrics metrics(const Vec& x_out, const Instance& inst) {
  if (x_out.size() != inst.p()) throw std::invalid_argument("metrics: x_out has wrong length");
  Metrics mt;
  if (inst.x_true) {
    const double nrm = inst.x_true->norm();
    if (!(nrm > 0.0)) throw std::invalid_argument("metrics: relerr undefined for x_true = 0");
    mt.relerr = (x_out - *inst.x_true).norm() / nrm;
  }
  const Vec gn = group_norms(x_out, inst.groups);
  IndexList found;
  for (Index i = 0; i < gn.size(); ++i)
    if (gn[i] > kApproxZeroTol) found.push_back(i);
  mt.group_sparsity = found.size();
  std::size_t hit = 0;
  for (Index i : found)
    if (std::binary_search(inst.support_true.begin(), inst.support_true.end(), i)) ++hit;
  mt.support_precision = found.empty() ? 1.0 : static_cast<double>(hit) / found.size();
  mt.support_recall =
      inst.support_true.empty() ? 1.0 : static_cast<double>(hit) / inst.support_true.size();
  mt.exact_support = found == inst.support_true;
  return mt;
}

}  // namespace gsr
