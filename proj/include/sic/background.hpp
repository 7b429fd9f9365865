#pragma once

// Maximum-entropy background distribution over edge weights.
//
// Each admissible cell (i, j) carries an independent geometric/exponential
// distribution with survival Pr(A_ij >= l) = exp(-l * L_ij), where
//   L_ij = lambda_out[i] + lambda_in[j] + sum of lambda_block over the
//          blocks containing (i, j),
// and expectation E[A_ij] = 1 / (exp(L_ij) - 1). The multipliers minimize
// the convex dual
//   sum_cells -log(1 - exp(-L_ij)) + sum_i lambda_out[i] d_out[i]
//     + sum_j lambda_in[j] d_in[j] + sum_b lambda_block[b] D_b,
// whose gradient is (target - expected) for every constraint.
//
// Constraints that can only be met by an infinite multiplier (a node with
// zero out- or in-strength, a block with target 0) are not optimized: their
// cells leave the domain and have expectation exactly 0.

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sic/graph.hpp"
#include "sic/interestingness.hpp"

namespace sic {

/// Constraint on the total weight of the cells rows x cols.
struct Block {
  std::vector<NodeId> rows;
  std::vector<NodeId> cols;
  std::optional<double> target;  // empirical sum when unset
};

struct PriorSpec {
  bool degree_prior{true};
  std::vector<Block> blocks;
  bool exclude_self_loops{false};

  /// No constraints at all: every edge is worth one unit of surprisal.
  bool uniform() const noexcept { return !degree_prior && blocks.empty(); }
};

struct FitOptions {
  double tol{1e-6};
  std::size_t max_iters{10000};
  std::size_t history_size{10};  // L-BFGS memory
  bool record_history{false};
};

class BackgroundError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonConvergence : public BackgroundError {
 public:
  NonConvergence(std::size_t iters, double residual)
      : BackgroundError("MaxEnt fit did not converge after " + std::to_string(iters) +
                        " iterations (relative residual " + std::to_string(residual) + ")"),
        iters_(iters),
        residual_(residual) {}
  std::size_t iterations() const noexcept { return iters_; }
  double residual() const noexcept { return residual_; }

 private:
  std::size_t iters_;
  double residual_;
};

class InfeasiblePrior : public BackgroundError {
 public:
  using BackgroundError::BackgroundError;
};

class DomainError : public BackgroundError {
 public:
  using BackgroundError::BackgroundError;
};

struct FitInfo {
  std::size_t iterations{0};
  double residual{0.0};
  std::vector<double> dual_history;
};

/// Fitted multipliers plus the admissible-cell mask.
class MaxEntModel {
 public:
  struct BlockState {
    std::vector<std::size_t> cells;  // i * n + j, sorted, unique
    double target{0.0};
    double lambda{0.0};
    bool active{true};  // false: target 0, cells excluded
    std::vector<NodeId> rows, cols;
  };

  MaxEntModel() = default;
  explicit MaxEntModel(std::size_t n)
      : n_(n), lambda_out(n, 0.0), lambda_in(n, 0.0), domain(n * n, true) {}

  std::size_t node_count() const noexcept { return n_; }

  bool in_domain(NodeId i, NodeId j) const {
    return i < n_ && j < n_ && domain[static_cast<std::size_t>(i) * n_ + j];
  }

  /// Combined multiplier L_ij (meaningful only inside the domain).
  double multiplier(NodeId i, NodeId j) const {
    double l = lambda_out[i] + lambda_in[j];
    std::size_t cell = static_cast<std::size_t>(i) * n_ + j;
    for (const auto& b : blocks) {
      if (std::binary_search(b.cells.begin(), b.cells.end(), cell)) l += b.lambda;
    }
    return l;
  }

  double expected(NodeId i, NodeId j) const {
    if (!in_domain(i, j)) return 0.0;
    return 1.0 / std::expm1(multiplier(i, j));
  }

  std::vector<double> expected_matrix() const;

  std::size_t n_{0};
  std::vector<double> lambda_out;
  std::vector<double> lambda_in;
  std::vector<BlockState> blocks;
  std::vector<bool> domain;
  FitInfo info;
};

/// Dual objective over the free multipliers of a model. Variable layout:
/// active out-multipliers, active in-multipliers, active block multipliers.
class MaxEntDual {
 public:
  MaxEntDual(const DiGraph& graph, const PriorSpec& prior);

  std::size_t variable_count() const noexcept { return vars_.size(); }

  /// +infinity when some domain cell has L_ij <= 0.
  double value(const std::vector<double>& x) const;
  std::vector<double> gradient(const std::vector<double>& x) const;
  /// max over constraints of |target - expected| / max(1, target).
  double relative_residual(const std::vector<double>& x) const;

  std::vector<double> initial_point() const;
  MaxEntModel to_model(const std::vector<double>& x) const;
  const MaxEntModel& skeleton() const noexcept { return skeleton_; }

 private:
  enum class Kind { out, in, block };
  struct Var {
    Kind kind;
    std::size_t index;  // node id or block index
    double target;
  };

  void multipliers(const std::vector<double>& x, std::vector<double>& lam) const;

  std::size_t n_;
  MaxEntModel skeleton_;                // domain, blocks, pinned values
  std::vector<std::size_t> cells_;      // domain cells
  std::vector<Var> vars_;
  std::vector<std::ptrdiff_t> out_var_, in_var_;  // -1 if not a variable
  std::vector<std::ptrdiff_t> block_var_;
  double total_weight_{0.0};
};

/************ implementation ****************************************/

inline std::vector<double> MaxEntModel::expected_matrix() const {
  std::vector<double> m(n_ * n_, 0.0);
  for (NodeId i = 0; i < n_; ++i)
    for (NodeId j = 0; j < n_; ++j) m[static_cast<std::size_t>(i) * n_ + j] = expected(i, j);
  return m;
}

inline MaxEntDual::MaxEntDual(const DiGraph& graph, const PriorSpec& prior)
    : n_(graph.node_count()), skeleton_(graph.node_count()) {
  const std::size_t n = n_;
  std::vector<double> d_out(n, 0.0), d_in(n, 0.0);
  std::vector<double> dense(n * n, 0.0);
  double max_weight = 0.0;
  for (const Edge& e : graph.edges()) {
    d_out[e.src] += e.weight;
    d_in[e.dst] += e.weight;
    dense[static_cast<std::size_t>(e.src) * n + e.dst] = e.weight;
    max_weight = std::max(max_weight, e.weight);
  }
  const double cap = max_weight > 0.0 ? 40.0 / max_weight : 40.0;

  auto& dom = skeleton_.domain;
  if (prior.exclude_self_loops) {
    for (std::size_t i = 0; i < n; ++i) dom[i * n + i] = false;
  }

  std::vector<Block> blocks = prior.blocks;
  if (!prior.degree_prior) {
    // Without degree constraints every cell still needs a positive
    // multiplier: add a global density constraint over all cells.
    Block all;
    for (NodeId v = 0; v < n; ++v) {
      all.rows.push_back(v);
      all.cols.push_back(v);
    }
    blocks.insert(blocks.begin(), std::move(all));
  }

  for (const Block& b : blocks) {
    MaxEntModel::BlockState st;
    st.rows = b.rows;
    st.cols = b.cols;
    for (NodeId r : b.rows) {
      for (NodeId c : b.cols) {
        if (r >= n || c >= n) throw BackgroundError("block cell outside the node range");
        st.cells.push_back(static_cast<std::size_t>(r) * n + c);
      }
    }
    std::sort(st.cells.begin(), st.cells.end());
    st.cells.erase(std::unique(st.cells.begin(), st.cells.end()), st.cells.end());
    if (b.target) {
      if (*b.target < 0.0) throw BackgroundError("block target must be non-negative");
      st.target = *b.target;
    } else {
      for (std::size_t c : st.cells) st.target += dense[c];
    }
    if (st.target == 0.0) {
      st.active = false;
      st.lambda = cap;
      for (std::size_t c : st.cells) dom[c] = false;
    }
    skeleton_.blocks.push_back(std::move(st));
  }

  if (prior.degree_prior) {
    for (std::size_t i = 0; i < n; ++i) {
      if (d_out[i] == 0.0) {
        skeleton_.lambda_out[i] = cap;
        for (std::size_t j = 0; j < n; ++j) dom[i * n + j] = false;
      }
      if (d_in[i] == 0.0) {
        skeleton_.lambda_in[i] = cap;
        for (std::size_t r = 0; r < n; ++r) dom[r * n + i] = false;
      }
    }
  }

  for (std::size_t c = 0; c < n * n; ++c) {
    if (dom[c]) {
      cells_.push_back(c);
      total_weight_ += dense[c];
    }
  }

  out_var_.assign(n, -1);
  in_var_.assign(n, -1);
  block_var_.assign(skeleton_.blocks.size(), -1);
  std::vector<std::size_t> row_cells(n, 0), col_cells(n, 0), block_cells(skeleton_.blocks.size(), 0);
  for (std::size_t c : cells_) {
    ++row_cells[c / n];
    ++col_cells[c % n];
  }
  for (std::size_t b = 0; b < skeleton_.blocks.size(); ++b) {
    for (std::size_t c : skeleton_.blocks[b].cells) block_cells[b] += dom[c] ? 1 : 0;
  }

  if (prior.degree_prior) {
    for (std::size_t i = 0; i < n; ++i) {
      if (d_out[i] > 0.0) {
        if (row_cells[i] == 0) throw InfeasiblePrior("node " + std::to_string(i) + " has out-weight but no admissible cells");
        out_var_[i] = static_cast<std::ptrdiff_t>(vars_.size());
        vars_.push_back({Kind::out, i, d_out[i]});
      }
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (d_in[j] > 0.0) {
        if (col_cells[j] == 0) throw InfeasiblePrior("node " + std::to_string(j) + " has in-weight but no admissible cells");
        in_var_[j] = static_cast<std::ptrdiff_t>(vars_.size());
        vars_.push_back({Kind::in, j, d_in[j]});
      }
    }
  }
  for (std::size_t b = 0; b < skeleton_.blocks.size(); ++b) {
    const auto& st = skeleton_.blocks[b];
    if (!st.active) continue;
    if (block_cells[b] == 0) throw InfeasiblePrior("block " + std::to_string(b) + " has a positive target but no admissible cells");
    if (prior.degree_prior) {
      double row_cap = 0.0, col_cap = 0.0;
      std::vector<NodeId> rs = st.rows, cs = st.cols;
      std::sort(rs.begin(), rs.end());
      rs.erase(std::unique(rs.begin(), rs.end()), rs.end());
      std::sort(cs.begin(), cs.end());
      cs.erase(std::unique(cs.begin(), cs.end()), cs.end());
      for (NodeId r : rs) row_cap += d_out[r];
      for (NodeId c : cs) col_cap += d_in[c];
      if (st.target > std::min(row_cap, col_cap) * (1.0 + 1e-12)) {
        throw InfeasiblePrior("block " + std::to_string(b) + " target " + std::to_string(st.target) +
                              " exceeds the weight its rows/columns can carry");
      }
    }
    block_var_[b] = static_cast<std::ptrdiff_t>(vars_.size());
    vars_.push_back({Kind::block, b, st.target});
  }
}

inline void MaxEntDual::multipliers(const std::vector<double>& x, std::vector<double>& lam) const {
  const std::size_t n = n_;
  std::vector<double> lo = skeleton_.lambda_out, li = skeleton_.lambda_in;
  for (std::size_t i = 0; i < n; ++i) {
    if (out_var_[i] >= 0) lo[i] = x[static_cast<std::size_t>(out_var_[i])];
    if (in_var_[i] >= 0) li[i] = x[static_cast<std::size_t>(in_var_[i])];
  }
  lam.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) lam[i * n + j] = lo[i] + li[j];
  for (std::size_t b = 0; b < skeleton_.blocks.size(); ++b) {
    double l = block_var_[b] >= 0 ? x[static_cast<std::size_t>(block_var_[b])] : skeleton_.blocks[b].lambda;
    for (std::size_t c : skeleton_.blocks[b].cells) lam[c] += l;
  }
}

inline double MaxEntDual::value(const std::vector<double>& x) const {
  std::vector<double> lam;
  multipliers(x, lam);
  double v = 0.0;
  for (std::size_t c : cells_) {
    if (!(lam[c] > 0.0)) return std::numeric_limits<double>::infinity();
    v -= std::log(-std::expm1(-lam[c]));
  }
  for (std::size_t k = 0; k < vars_.size(); ++k) v += x[k] * vars_[k].target;
  return v;
}

inline std::vector<double> MaxEntDual::gradient(const std::vector<double>& x) const {
  std::vector<double> lam;
  multipliers(x, lam);
  std::vector<double> g(vars_.size());
  for (std::size_t k = 0; k < vars_.size(); ++k) g[k] = vars_[k].target;
  std::vector<double> e(n_ * n_, 0.0);
  for (std::size_t c : cells_) {
    e[c] = 1.0 / std::expm1(lam[c]);
    if (out_var_[c / n_] >= 0) g[static_cast<std::size_t>(out_var_[c / n_])] -= e[c];
    if (in_var_[c % n_] >= 0) g[static_cast<std::size_t>(in_var_[c % n_])] -= e[c];
  }
  for (std::size_t b = 0; b < skeleton_.blocks.size(); ++b) {
    if (block_var_[b] < 0) continue;
    double s = 0.0;
    for (std::size_t c : skeleton_.blocks[b].cells) s += e[c];
    g[static_cast<std::size_t>(block_var_[b])] -= s;
  }
  return g;
}

inline double MaxEntDual::relative_residual(const std::vector<double>& x) const {
  auto g = gradient(x);
  double r = 0.0;
  for (std::size_t k = 0; k < vars_.size(); ++k) {
    r = std::max(r, std::abs(g[k]) / std::max(1.0, vars_[k].target));
  }
  return r;
}

inline std::vector<double> MaxEntDual::initial_point() const {
  std::vector<double> x(vars_.size(), 0.0);
  const double cells = static_cast<double>(cells_.size());
  if (cells == 0.0 || total_weight_ <= 0.0) return x;
  // Uniform L with E = total / cells, split evenly between out and in.
  const double uniform = std::log1p(cells / total_weight_);
  const bool has_degree = std::any_of(vars_.begin(), vars_.end(), [](const Var& v) { return v.kind != Kind::block; });
  for (std::size_t k = 0; k < vars_.size(); ++k) {
    if (vars_[k].kind != Kind::block) x[k] = uniform / 2.0;
    else if (!has_degree && vars_[k].index == 0) x[k] = uniform;  // global density block
  }
  return x;
}

inline MaxEntModel MaxEntDual::to_model(const std::vector<double>& x) const {
  MaxEntModel m = skeleton_;
  for (std::size_t k = 0; k < vars_.size(); ++k) {
    switch (vars_[k].kind) {
      case Kind::out: m.lambda_out[vars_[k].index] = x[k]; break;
      case Kind::in: m.lambda_in[vars_[k].index] = x[k]; break;
      case Kind::block: m.blocks[vars_[k].index].lambda = x[k]; break;
    }
  }
  return m;
}

namespace detail {

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace detail

/// Fits the multipliers by minimizing the dual with L-BFGS directions and a
/// halving backtracking line search. Every accepted step strictly decreases
/// the dual and keeps L_ij > 0 on the domain.
inline MaxEntModel fit_maxent(const DiGraph& graph, const PriorSpec& prior, const FitOptions& opts = {}) {
  if (!(opts.tol > 0.0)) throw BackgroundError("tol must be positive");
  if (prior.uniform()) throw BackgroundError("uniform prior has no model to fit");

  MaxEntDual dual(graph, prior);
  const std::size_t dim = dual.variable_count();
  std::vector<double> x = dual.initial_point();
  double fx = dual.value(x);
  if (!std::isfinite(fx)) throw BackgroundError("initial point outside the dual domain");
  std::vector<double> g = dual.gradient(x);

  FitInfo info;
  if (opts.record_history) info.dual_history.push_back(fx);

  struct Pair {
    std::vector<double> s, y;
    double rho;
  };
  std::deque<Pair> mem;
  double best_res = dual.relative_residual(x);
  std::size_t best_res_iter = 0;
  constexpr std::size_t kStagnationWindow = 500;

  std::size_t it = 0;
  for (; it < opts.max_iters; ++it) {
    double res = dual.relative_residual(x);
    if (res <= opts.tol || dim == 0) {
      info.iterations = it;
      info.residual = res;
      MaxEntModel m = dual.to_model(x);
      m.info = std::move(info);
      return m;
    }
    if (res < best_res * 0.999) {
      best_res = res;
      best_res_iter = it;
    } else if (it - best_res_iter > kStagnationWindow) {
      throw InfeasiblePrior("residual stagnated at " + std::to_string(res) +
                            "; the prior constraints cannot be met jointly");
    }

    // Two-loop recursion.
    std::vector<double> d = g;
    std::vector<double> alpha(mem.size());
    for (std::size_t k = mem.size(); k-- > 0;) {
      alpha[k] = mem[k].rho * detail::dot(mem[k].s, d);
      for (std::size_t i = 0; i < dim; ++i) d[i] -= alpha[k] * mem[k].y[i];
    }
    if (!mem.empty()) {
      double gamma = detail::dot(mem.back().s, mem.back().y) / detail::dot(mem.back().y, mem.back().y);
      for (double& v : d) v *= gamma;
    } else {
      // Steepest descent scaled so the first trial step is modest.
      double gn = std::sqrt(detail::dot(g, g));
      double xn = std::sqrt(detail::dot(x, x));
      double scale = gn > 0.0 ? std::max(1e-3 * xn, 1e-8) / gn : 0.0;
      for (double& v : d) v *= scale;
    }
    for (std::size_t k = 0; k < mem.size(); ++k) {
      double beta = mem[k].rho * detail::dot(mem[k].y, d);
      for (std::size_t i = 0; i < dim; ++i) d[i] += mem[k].s[i] * (alpha[k] - beta);
    }
    for (double& v : d) v = -v;
    double slope = detail::dot(g, d);
    if (!(slope < 0.0)) {
      mem.clear();
      d = g;
      for (double& v : d) v = -v;
      slope = detail::dot(g, d);
    }

    double step = 1.0;
    std::vector<double> xn(dim);
    double fn = fx;
    bool accepted = false;
    for (int ls = 0; ls < 200; ++ls) {
      for (std::size_t i = 0; i < dim; ++i) xn[i] = x[i] + step * d[i];
      fn = dual.value(xn);
      if (std::isfinite(fn) && fn <= fx + 1e-4 * step * slope && fn < fx) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (!mem.empty()) {
        mem.clear();
        continue;
      }
      // No decrease possible along the gradient: numerical optimum.
      break;
    }
    std::vector<double> gn = dual.gradient(xn);
    Pair p;
    p.s.resize(dim);
    p.y.resize(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      p.s[i] = xn[i] - x[i];
      p.y[i] = gn[i] - g[i];
    }
    double sy = detail::dot(p.s, p.y);
    if (sy > 1e-300) {
      p.rho = 1.0 / sy;
      mem.push_back(std::move(p));
      if (mem.size() > opts.history_size) mem.pop_front();
    }
    x = std::move(xn);
    g = std::move(gn);
    fx = fn;
    if (opts.record_history) info.dual_history.push_back(fx);
  }
  double res = dual.relative_residual(x);
  if (res > opts.tol) throw NonConvergence(it, res);
  info.iterations = it;
  info.residual = res;
  MaxEntModel m = dual.to_model(x);
  m.info = std::move(info);
  return m;
}

/// Pr(mu(i, j) >= ell) = exp(-ell * L_ij).
inline double edge_survival(const MaxEntModel& model, NodeId i, NodeId j, double ell) {
  if (!model.in_domain(i, j)) {
    throw DomainError("cell (" + std::to_string(i) + "," + std::to_string(j) + ") is outside the model domain");
  }
  if (ell < 0.0) throw DomainError("ell must be non-negative");
  return std::exp(-ell * model.multiplier(i, j));
}

/// w(e) = -log Pr(mu(e) >= mu(e)) = mu(e) * L_ij, expressed in `base`.
/// A zero-weight edge in an excluded cell carries no information (w = 0).
inline SurprisalGraph surprisal_graph(const DiGraph& graph, const MaxEntModel& model,
                                      LogBase base = LogBase::bits) {
  if (model.node_count() != graph.node_count()) {
    throw DomainError("model has " + std::to_string(model.node_count()) + " nodes, graph has " +
                      std::to_string(graph.node_count()));
  }
  const double unit = base == LogBase::bits ? std::numbers::ln2 : 1.0;
  std::vector<double> ws;
  ws.reserve(graph.edge_count());
  for (const Edge& e : graph.edges()) {
    if (!model.in_domain(e.src, e.dst)) {
      if (e.weight == 0.0) {
        ws.push_back(0.0);
        continue;
      }
      throw DomainError("edge (" + std::to_string(e.src) + "," + std::to_string(e.dst) +
                        ") lies outside the model domain");
    }
    ws.push_back(std::max(0.0, e.weight * model.multiplier(e.src, e.dst) / unit));
  }
  return SurprisalGraph(graph.with_weights(ws));
}

/// Prior-free mode: every edge carries unit surprisal.
inline SurprisalGraph uniform_surprisal_graph(const DiGraph& graph) {
  std::vector<double> ws(graph.edge_count(), 1.0);
  return SurprisalGraph(graph.with_weights(ws));
}

/************ JSON **************************************************/

inline PriorSpec prior_from_json(const nlohmann::json& j) {
  PriorSpec p;
  p.degree_prior = j.value("degree_prior", true);
  p.exclude_self_loops = j.value("exclude_self_loops", false);
  if (j.contains("blocks")) {
    for (const auto& b : j.at("blocks")) {
      Block blk;
      blk.rows = b.at("rows").get<std::vector<NodeId>>();
      blk.cols = b.at("cols").get<std::vector<NodeId>>();
      if (b.contains("target") && !b.at("target").is_null()) blk.target = b.at("target").get<double>();
      p.blocks.push_back(std::move(blk));
    }
  }
  return p;
}

inline nlohmann::json model_to_json(const MaxEntModel& m) {
  nlohmann::json j;
  j["format"] = "sic-maxent-1";
  j["n"] = m.node_count();
  j["lambda_out"] = m.lambda_out;
  j["lambda_in"] = m.lambda_in;
  nlohmann::json blocks = nlohmann::json::array();
  for (const auto& b : m.blocks) {
    blocks.push_back({{"rows", b.rows}, {"cols", b.cols}, {"target", b.target}, {"lambda", b.lambda},
                      {"active", b.active}});
  }
  j["blocks"] = std::move(blocks);
  nlohmann::json excluded = nlohmann::json::array();
  const std::size_t n = m.node_count();
  for (std::size_t c = 0; c < n * n; ++c) {
    if (!m.domain[c]) excluded.push_back({c / n, c % n});
  }
  j["excluded_cells"] = std::move(excluded);
  j["fit"] = {{"iterations", m.info.iterations}, {"residual", m.info.residual}};
  return j;
}

inline MaxEntModel model_from_json(const nlohmann::json& j) {
  if (j.value("format", std::string{}) != "sic-maxent-1") throw BackgroundError("unrecognized model format");
  const std::size_t n = j.at("n").get<std::size_t>();
  MaxEntModel m(n);
  m.lambda_out = j.at("lambda_out").get<std::vector<double>>();
  m.lambda_in = j.at("lambda_in").get<std::vector<double>>();
  if (m.lambda_out.size() != n || m.lambda_in.size() != n) throw BackgroundError("multiplier vectors do not match n");
  for (const auto& b : j.at("blocks")) {
    MaxEntModel::BlockState st;
    st.rows = b.at("rows").get<std::vector<NodeId>>();
    st.cols = b.at("cols").get<std::vector<NodeId>>();
    st.target = b.at("target").get<double>();
    st.lambda = b.at("lambda").get<double>();
    st.active = b.value("active", true);
    for (NodeId r : st.rows)
      for (NodeId c : st.cols) {
        if (r >= n || c >= n) throw BackgroundError("block cell outside the node range");
        st.cells.push_back(static_cast<std::size_t>(r) * n + c);
      }
    std::sort(st.cells.begin(), st.cells.end());
    st.cells.erase(std::unique(st.cells.begin(), st.cells.end()), st.cells.end());
    m.blocks.push_back(std::move(st));
  }
  for (const auto& c : j.at("excluded_cells")) {
    std::size_t i = c.at(0).get<std::size_t>(), jj = c.at(1).get<std::size_t>();
    if (i >= n || jj >= n) throw BackgroundError("excluded cell outside the node range");
    m.domain[i * n + jj] = false;
  }
  if (j.contains("fit")) {
    m.info.iterations = j["fit"].value("iterations", std::size_t{0});
    m.info.residual = j["fit"].value("residual", 0.0);
  }
  return m;
}

inline PriorSpec load_prior(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw BackgroundError("cannot open prior file '" + path + "'");
  return prior_from_json(nlohmann::json::parse(in));
}

inline MaxEntModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw BackgroundError("cannot open model file '" + path + "'");
  return model_from_json(nlohmann::json::parse(in));
}

}  // namespace sic
