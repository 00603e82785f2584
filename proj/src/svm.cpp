#include "bdscreen/svm.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include "bdscreen/rng.hpp"

namespace bdscreen {
namespace {

constexpr double kTau = 1e-12;
constexpr std::size_t kFullGramLimit = 4096;

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

/// Rows of the linear kernel X X^T. Small problems memoize every row; large
/// ones keep the two most recently used rows.
class LinearGram {
 public:
  explicit LinearGram(const Matrix& X) : X_(X), diag_(X.size()) {
    for (std::size_t i = 0; i < X.size(); ++i) diag_[i] = dot(X[i], X[i]);
    if (X.size() <= kFullGramLimit) {
      rows_.resize(X.size());
    } else {
      slots_[0].resize(X.size());
      slots_[1].resize(X.size());
    }
  }

  double diag(std::size_t i) const { return diag_[i]; }

  std::span<const double> row(std::size_t i) {
    if (!rows_.empty()) {
      if (rows_[i].empty()) fill(i, rows_[i]);
      return rows_[i];
    }
    for (int s = 0; s < 2; ++s) {
      if (slot_index_[s] == i) {
        lru_ = 1 - s;
        return slots_[s];
      }
    }
    const int s = lru_;
    slots_[s].resize(X_.size());
    fill(i, slots_[s]);
    slot_index_[s] = i;
    lru_ = 1 - s;
    return slots_[s];
  }

 private:
  void fill(std::size_t i, std::vector<double>& out) const {
    out.resize(X_.size());
    for (std::size_t t = 0; t < X_.size(); ++t) out[t] = dot(X_[i], X_[t]);
  }

  const Matrix& X_;
  std::vector<double> diag_;
  std::vector<std::vector<double>> rows_;
  std::vector<double> slots_[2];
  std::size_t slot_index_[2] = {std::numeric_limits<std::size_t>::max(),
                                std::numeric_limits<std::size_t>::max()};
  int lru_ = 0;
};

void check_problem(const Matrix& X, const std::vector<int>& y) {
  if (X.size() != y.size()) throw std::invalid_argument("svm: X and y differ in length");
  if (X.size() < 2) throw std::invalid_argument("svm: need at least two training points");
  const std::size_t dim = X.front().size();
  bool pos = false;
  bool neg = false;
  for (std::size_t i = 0; i < X.size(); ++i) {
    if (X[i].size() != dim) throw std::invalid_argument("svm: rows differ in dimension");
    if (y[i] == 1) {
      pos = true;
    } else if (y[i] == -1) {
      neg = true;
    } else {
      throw std::invalid_argument("svm: labels must be +1 or -1");
    }
  }
  if (!pos || !neg) throw std::invalid_argument("svm: training data contains a single class");
}

std::vector<double> primal_weights(const Matrix& X, const std::vector<int>& y,
                                   const std::vector<double>& alphas) {
  std::vector<double> w(X.front().size(), 0.0);
  for (std::size_t i = 0; i < X.size(); ++i) {
    if (alphas[i] == 0.0) continue;
    const double coef = alphas[i] * y[i];
    for (std::size_t d = 0; d < w.size(); ++d) w[d] += coef * X[i][d];
  }
  return w;
}

}  // namespace

double BinarySvmModel::decision(std::span<const double> x) const {
  if (x.size() != weights.size()) {
    throw std::invalid_argument("svm: input has dimension " + std::to_string(x.size()) +
                                ", model " + std::to_string(weights.size()));
  }
  return dot(weights, x) + bias;
}

BinarySvmModel svm_train_binary(const Matrix& X, const std::vector<int>& y, const SvmOptions& opts) {
  check_problem(X, y);
  if (!(opts.C > 0.0)) throw std::invalid_argument("svm: C must be positive");
  if (!(opts.tol > 0.0)) throw std::invalid_argument("svm: tol must be positive");
  if (opts.max_epochs < 1) throw std::invalid_argument("svm: max_epochs must be >= 1");

  const std::size_t n = X.size();
  const double C = opts.C;
  LinearGram gram(X);
  std::vector<double> alpha(n, 0.0);
  std::vector<double> grad(n, -1.0);  // gradient of 0.5 a'Qa - e'a, Q_ij = y_i y_j x_i.x_j

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(opts.seed);
  std::shuffle(order.begin(), order.end(), rng);

  const std::size_t max_iter = static_cast<std::size_t>(opts.max_epochs) * n;
  std::size_t iter = 0;
  double violation = std::numeric_limits<double>::infinity();
  bool converged = false;

  for (;;) {
    // i: maximal violator in the "up" set.
    double gmax = -std::numeric_limits<double>::infinity();
    std::size_t i = n;
    for (std::size_t t : order) {
      if (y[t] == 1) {
        if (alpha[t] < C && -grad[t] >= gmax) {
          gmax = -grad[t];
          i = t;
        }
      } else if (alpha[t] > 0.0 && grad[t] >= gmax) {
        gmax = grad[t];
        i = t;
      }
    }

    // j: partner in the "low" set giving the largest second-order decrease.
    double gmax2 = -std::numeric_limits<double>::infinity();
    std::size_t j = n;
    double best_obj = std::numeric_limits<double>::infinity();
    std::span<const double> ki;
    if (i != n) ki = gram.row(i);
    for (std::size_t t : order) {
      double grad_diff = 0.0;
      if (y[t] == 1) {
        if (!(alpha[t] > 0.0)) continue;
        gmax2 = std::max(gmax2, grad[t]);
        grad_diff = gmax + grad[t];
      } else {
        if (!(alpha[t] < C)) continue;
        gmax2 = std::max(gmax2, -grad[t]);
        grad_diff = gmax - grad[t];
      }
      if (i == n || grad_diff <= 0.0) continue;
      double quad = gram.diag(i) + gram.diag(t) - 2.0 * ki[t];
      if (quad <= 0.0) quad = kTau;
      const double obj = -(grad_diff * grad_diff) / quad;
      if (obj <= best_obj) {
        best_obj = obj;
        j = t;
      }
    }

    violation = gmax + gmax2;
    if (i == n || j == n || violation <= opts.tol) {
      converged = true;
      break;
    }
    if (iter >= max_iter) break;
    ++iter;

    const auto kj = gram.row(j);
    ki = gram.row(i);
    const double old_ai = alpha[i];
    const double old_aj = alpha[j];
    double quad = gram.diag(i) + gram.diag(j) - 2.0 * ki[j];
    if (quad <= 0.0) quad = kTau;

    if (y[i] != y[j]) {
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0.0) {
        if (alpha[j] < 0.0) {
          alpha[j] = 0.0;
          alpha[i] = diff;
        }
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0;
        alpha[j] = -diff;
      }
      if (diff > 0.0) {
        if (alpha[i] > C) {
          alpha[i] = C;
          alpha[j] = C - diff;
        }
      } else if (alpha[j] > C) {
        alpha[j] = C;
        alpha[i] = C + diff;
      }
    } else {
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > C) {
        if (alpha[i] > C) {
          alpha[i] = C;
          alpha[j] = sum - C;
        }
      } else if (alpha[j] < 0.0) {
        alpha[j] = 0.0;
        alpha[i] = sum;
      }
      if (sum > C) {
        if (alpha[j] > C) {
          alpha[j] = C;
          alpha[i] = sum - C;
        }
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0;
        alpha[j] = sum;
      }
    }

    const double dai = alpha[i] - old_ai;
    const double daj = alpha[j] - old_aj;
    for (std::size_t t = 0; t < n; ++t) {
      grad[t] += y[t] * (y[i] * ki[t] * dai + y[j] * kj[t] * daj);
    }
  }

  BinarySvmModel model;
  model.C = C;
  model.iterations = iter;
  model.epochs = (iter + n - 1) / n;
  model.final_violation = violation;
  model.converged = converged;

  double upper = std::numeric_limits<double>::infinity();
  double lower = -std::numeric_limits<double>::infinity();
  double free_sum = 0.0;
  std::size_t free_count = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = y[t] * grad[t];
    if (alpha[t] >= C) {
      if (y[t] == -1) upper = std::min(upper, yg); else lower = std::max(lower, yg);
    } else if (alpha[t] <= 0.0) {
      if (y[t] == 1) upper = std::min(upper, yg); else lower = std::max(lower, yg);
    } else {
      free_sum += yg;
      ++free_count;
    }
  }
  double rho = 0.0;
  if (free_count > 0) {
    rho = free_sum / static_cast<double>(free_count);
  } else if (std::isfinite(upper) && std::isfinite(lower)) {
    rho = 0.5 * (upper + lower);
  } else if (std::isfinite(upper)) {
    rho = upper;
  } else if (std::isfinite(lower)) {
    rho = lower;
  }
  model.bias = -rho;
  model.weights = primal_weights(X, y, alpha);
  model.alphas = std::move(alpha);
  return model;
}

double hinge_objective(const BinarySvmModel& model, const Matrix& X, const std::vector<int>& y, double C) {
  if (X.size() != y.size()) throw std::invalid_argument("hinge_objective: X and y differ in length");
  const double half_norm = 0.5 * dot(model.weights, model.weights);
  double slack = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    slack += std::max(0.0, 1.0 - y[i] * model.decision(X[i]));
  }
  return half_norm + C * slack;
}

double dual_objective(const BinarySvmModel& model, const Matrix& X, const std::vector<int>& y) {
  if (model.alphas.size() != X.size() || X.size() != y.size()) {
    throw std::invalid_argument("dual_objective: shape mismatch");
  }
  const auto w = primal_weights(X, y, model.alphas);
  const double sum = std::accumulate(model.alphas.begin(), model.alphas.end(), 0.0);
  return sum - 0.5 * dot(w, w);
}

MulticlassSvmModel svm_train_multiclass(const std::vector<Example>& train, const SvmOptions& opts,
                                        bool parallel) {
  std::array<bool, kLabelCount> present{};
  Matrix X;
  X.reserve(train.size());
  for (const auto& e : train) {
    present[label_index(e.label)] = true;
    X.push_back(e.x);
  }
  for (DisorderLabel label : kAllLabels) {
    if (!present[label_index(label)]) {
      throw std::invalid_argument("svm: label " + std::to_string(code(label)) + " (" +
                                  std::string(label_name(label)) + ") absent from training data");
    }
  }

  auto train_one = [&](DisorderLabel label) {
    std::vector<int> y(train.size());
    for (std::size_t i = 0; i < train.size(); ++i) y[i] = train[i].label == label ? 1 : -1;
    SvmOptions o = opts;
    o.seed = derive_seed(opts.seed, static_cast<std::uint64_t>(code(label)));
    return svm_train_binary(X, y, o);
  };

  MulticlassSvmModel model;
  model.options = opts;
  if (parallel) {
    std::array<std::future<BinarySvmModel>, kLabelCount> jobs;
    for (DisorderLabel label : kAllLabels) {
      jobs[label_index(label)] = std::async(std::launch::async, train_one, label);
    }
    for (std::size_t c = 0; c < kLabelCount; ++c) model.per_class[c] = jobs[c].get();
  } else {
    for (DisorderLabel label : kAllLabels) model.per_class[label_index(label)] = train_one(label);
  }
  return model;
}

SvmPrediction svm_predict(const MulticlassSvmModel& model, std::span<const double> x) {
  SvmPrediction out;
  std::size_t best = 0;
  for (std::size_t c = 0; c < kLabelCount; ++c) {
    out.decision_values[c] = model.per_class[c].decision(x);
    if (out.decision_values[c] > out.decision_values[best]) best = c;
  }
  out.label = kAllLabels[best];
  return out;
}

}  // namespace bdscreen
