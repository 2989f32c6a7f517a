#include "gsr/groups.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace gsr {

namespace {

void check_dim(const Vec& x, const GroupStructure& g, const char* what) {
  if (x.size() != g.dim())
    throw std::invalid_argument(std::string(what) + ": vector has dimension " +
                                std::to_string(x.size()) + ", groups expect " +
                                std::to_string(g.dim()));
}

}  // namespace

GroupStructure::GroupStructure(Index p, std::vector<IndexList> groups)
    : p_(p), groups_(std::move(groups)), owner_(p, -1) {
  if (p <= 0) throw std::invalid_argument("GroupStructure: p must be positive");
  for (std::size_t i = 0; i < groups_.size(); ++i) {
    if (groups_[i].empty())
      throw std::invalid_argument("GroupStructure: group " + std::to_string(i) +
                                  " is empty");
    for (Index j : groups_[i]) {
      if (j < 0 || j >= p)
        throw std::invalid_argument("GroupStructure: coordinate " +
                                    std::to_string(j) + " out of range");
      if (owner_[j] != -1)
        throw std::invalid_argument("GroupStructure: coordinate " +
                                    std::to_string(j) +
                                    " belongs to more than one group");
      owner_[j] = static_cast<Index>(i);
    }
  }
  for (Index j = 0; j < p; ++j)
    if (owner_[j] == -1)
      throw std::invalid_argument("GroupStructure: coordinate " +
                                  std::to_string(j) + " is not covered");
}

GroupStructure GroupStructure::contiguous(Index p, Index m) {
  if (p <= 0 || m <= 0 || m > p)
    throw std::invalid_argument("GroupStructure::contiguous: need 0 < m <= p");
  const Index d = (p + m - 1) / m;
  std::vector<IndexList> groups;
  for (Index start = 0; start < p; start += d) {
    IndexList block;
    for (Index j = start; j < std::min(start + d, p); ++j) block.push_back(j);
    groups.push_back(std::move(block));
  }
  if (static_cast<Index>(groups.size()) != m)
    throw std::invalid_argument(
        "GroupStructure::contiguous: blocks of size ceil(p/m) yield " +
        std::to_string(groups.size()) + " groups, not " + std::to_string(m));
  return GroupStructure(p, std::move(groups));
}

GroupStructure GroupStructure::from_sizes(const std::vector<Index>& sizes) {
  std::vector<IndexList> groups;
  Index next = 0;
  for (Index s : sizes) {
    if (s <= 0) throw std::invalid_argument("GroupStructure: group size must be positive");
    IndexList block(s);
    for (Index k = 0; k < s; ++k) block[k] = next++;
    groups.push_back(std::move(block));
  }
  return GroupStructure(next, std::move(groups));
}

Vec GroupStructure::gather(const Vec& x, Index i) const {
  const IndexList& idx = groups_[i];
  Vec out(idx.size());
  for (std::size_t k = 0; k < idx.size(); ++k) out[k] = x[idx[k]];
  return out;
}

void GroupStructure::scatter(Vec& x, Index i, const Vec& values) const {
  const IndexList& idx = groups_[i];
  for (std::size_t k = 0; k < idx.size(); ++k) x[idx[k]] = values[k];
}

IndexList GroupStructure::columns_of(const IndexList& group_ids) const {
  IndexList cols;
  for (Index i : group_ids) cols.insert(cols.end(), groups_[i].begin(), groups_[i].end());
  return cols;
}

nlohmann::json GroupStructure::to_json() const {
  nlohmann::json groups = nlohmann::json::array();
  for (const auto& block : groups_) {
    nlohmann::json one = nlohmann::json::array();
    for (Index j : block) one.push_back(j + 1);
    groups.push_back(std::move(one));
  }
  return {{"p", p_}, {"groups", std::move(groups)}};
}

GroupStructure GroupStructure::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("p") || !j.contains("groups"))
    throw std::invalid_argument("group structure JSON needs \"p\" and \"groups\"");
  const Index p = j.at("p").get<Index>();
  std::vector<IndexList> groups;
  for (const auto& block : j.at("groups")) {
    IndexList idx;
    for (const auto& v : block) {
      const Index one_based = v.get<Index>();
      if (one_based < 1)
        throw std::invalid_argument("group structure JSON uses 1-based indices");
      idx.push_back(one_based - 1);
    }
    groups.push_back(std::move(idx));
  }
  return GroupStructure(p, std::move(groups));
}

BoxConstraint::BoxConstraint(double r) : radius(r) {
  if (!(r >= 0.0) || !std::isfinite(r))
    throw std::invalid_argument("BoxConstraint: radius must be finite and nonnegative");
}

Vec group_norms(const Vec& x, const GroupStructure& g) {
  check_dim(x, g, "group_norms");
  Vec out(g.num_groups());
  for (Index i = 0; i < g.num_groups(); ++i) {
    double ss = 0.0;
    for (Index j : g.group(i)) ss += x[j] * x[j];
    out[i] = std::sqrt(ss);
  }
  return out;
}

double l21_norm(const Vec& x, const GroupStructure& g) {
  return group_norms(x, g).sum();
}

double l21_norm(const Vec& x, const GroupStructure& g, const Vec& weights) {
  if (weights.size() != g.num_groups())
    throw std::invalid_argument("l21_norm: weights must have one entry per group");
  if ((weights.array() < 0.0).any())
    throw std::invalid_argument("l21_norm: weights must be nonnegative");
  return weights.dot(group_norms(x, g));
}

std::size_t approx_group_zero_norm(const Vec& x, const GroupStructure& g, double tol) {
  if (tol < 0.0) throw std::invalid_argument("approx_group_zero_norm: tol must be >= 0");
  const Vec norms = group_norms(x, g);
  return static_cast<std::size_t>((norms.array() > tol).count());
}

std::size_t group_zero_norm(const Vec& x, const GroupStructure& g) {
  check_dim(x, g, "group_zero_norm");
  std::size_t count = 0;
  for (Index i = 0; i < g.num_groups(); ++i)
    for (Index j : g.group(i))
      if (x[j] != 0.0) {
        ++count;
        break;
      }
  return count;
}

double equilibrium_residual(const Vec& x, const Vec& w, const GroupStructure& g) {
  if (w.size() != g.num_groups())
    throw std::invalid_argument("equilibrium_residual: w must have one entry per group");
  if ((w.array() < 0.0).any() || (w.array() > 1.0).any())
    throw std::invalid_argument("equilibrium_residual: w must lie in [0,1]^m");
  return (1.0 - w.array()).matrix().dot(group_norms(x, g));
}

Vec project_box(const Vec& x, const BoxConstraint& box) {
  return x.cwiseMax(-box.radius).cwiseMin(box.radius);
}

}  // namespace gsr
