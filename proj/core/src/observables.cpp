#include "qvar/observables.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace qvar {
namespace {

void check_dims(const ParamObservable& obs, Eigen::Index dim) {
  if (dim != obs.circuit.dim()) {
    throw std::invalid_argument("observable acts on dimension " +
                                std::to_string(obs.circuit.dim()) + ", state has " +
                                std::to_string(dim));
  }
}

RealVector floor_probabilities(RealVector p) {
  for (auto& v : p) v = v < kProbabilityFloor ? 0.0 : v;
  return p;
}

// A complete basis readout sums to one; dividing out the norm rounding keeps
// finite differences of p consistent across outcomes (Σ dp = 0).
RealVector normalized_probabilities(RealVector p) {
  p = floor_probabilities(std::move(p));
  const double total = p.sum();
  if (total > 0.0) p /= total;
  return p;
}

}  // namespace

ParamObservable::ParamObservable(int measured, RealVector values, Circuit c)
    : m(measured), lambdas(std::move(values)), circuit(std::move(c)) {
  if (m < 1 || m > circuit.num_qubits()) {
    throw std::invalid_argument("ParamObservable: measured qubits must be in 1..n");
  }
  if (lambdas.size() != outcomes()) {
    throw std::invalid_argument("ParamObservable: expected 2^m eigenvalues");
  }
  if (!lambdas.allFinite()) throw std::invalid_argument("ParamObservable: non-finite eigenvalue");
}

Matrix SpectralObservable::dense() const {
  if (projectors.empty()) return {};
  Matrix out = Matrix::Zero(projectors.front().rows(), projectors.front().cols());
  for (std::size_t i = 0; i < projectors.size(); ++i) {
    out += lambdas(static_cast<Eigen::Index>(i)) * projectors[i];
  }
  return out;
}

RealVector marginal_last_qubits(const RealVector& diagonal, int m) {
  const Eigen::Index outcomes = Eigen::Index{1} << m;
  const Eigen::Index mask = outcomes - 1;
  RealVector p = RealVector::Zero(outcomes);
  for (Eigen::Index b = 0; b < diagonal.size(); ++b) p(b & mask) += diagonal(b);
  return p;
}

RealVector probabilities(const ParamObservable& obs, const RealVector& theta, const Matrix& rho) {
  check_dims(obs, rho.rows());
  const Matrix u = unitary(obs.circuit, theta);
  const Matrix u_rho = u * rho;
  RealVector diag(u.rows());
  for (Eigen::Index b = 0; b < u.rows(); ++b) {
    diag(b) = u_rho.row(b).dot(u.row(b)).real();  // conj(u_b)·(uρ)_b
  }
  return normalized_probabilities(marginal_last_qubits(diag, obs.m));
}

RealVector probabilities(const ParamObservable& obs, const RealVector& theta, const Vector& psi) {
  check_dims(obs, psi.size());
  const Matrix x = apply(obs.circuit, theta, Matrix(psi));
  return normalized_probabilities(marginal_last_qubits(x.col(0).cwiseAbs2(), obs.m));
}

RealVector probabilities(const ParamObservable& obs, const RealVector& theta,
                         const LabeledState& state) {
  return state.is_pure() ? probabilities(obs, theta, state.psi())
                         : probabilities(obs, theta, state.rho());
}

double expectation_from(const RealVector& probs, const RealVector& lambdas) {
  return probs.dot(lambdas);
}

double variance_from(const RealVector& probs, const RealVector& lambdas) {
  const double mean = probs.dot(lambdas);
  return probs.dot((lambdas.array() - mean).square().matrix());
}

double expectation(const ParamObservable& obs, const RealVector& theta, const LabeledState& state) {
  return expectation_from(probabilities(obs, theta, state), obs.lambdas);
}

double variance(const ParamObservable& obs, const RealVector& theta, const LabeledState& state) {
  return variance_from(probabilities(obs, theta, state), obs.lambdas);
}

SpectralObservable matrix(const ParamObservable& obs, const RealVector& theta) {
  const Matrix u = unitary(obs.circuit, theta);
  const Eigen::Index mask = obs.outcomes() - 1;
  SpectralObservable out;
  out.lambdas = obs.lambdas;
  for (Eigen::Index i = 0; i < obs.outcomes(); ++i) {
    Matrix rows = Matrix::Zero(u.rows(), u.cols());
    for (Eigen::Index b = 0; b < u.rows(); ++b) {
      if ((b & mask) == i) rows.row(b) = u.row(b);
    }
    // U† (𝟙 ⊗ |i><i|) U = Σ_{b in block i} u_b† u_b
    out.projectors.push_back(hermitian_part(u.adjoint() * rows));
  }
  return out;
}

RealVector probabilities(const SpectralObservable& obs, const LabeledState& state) {
  RealVector p(static_cast<Eigen::Index>(obs.projectors.size()));
  for (std::size_t i = 0; i < obs.projectors.size(); ++i) {
    const Matrix& proj = obs.projectors[i];
    if (proj.rows() != state.dim()) throw std::invalid_argument("probabilities: dimension mismatch");
    const double v = state.is_pure()
                         ? state.psi().dot(proj * state.psi()).real()
                         : (proj * state.rho()).trace().real();
    p(static_cast<Eigen::Index>(i)) = v;
  }
  return floor_probabilities(std::move(p));
}

Matrix naimark_embed(const Matrix& rho, int ancillas) {
  if (ancillas < 1) throw std::invalid_argument("naimark_embed: need at least one ancilla");
  Matrix zero = Matrix::Zero(Eigen::Index{1} << ancillas, Eigen::Index{1} << ancillas);
  zero(0, 0) = 1.0;
  return kron(rho, zero);
}

Vector naimark_embed(const Vector& psi, int ancillas) {
  if (ancillas < 1) throw std::invalid_argument("naimark_embed: need at least one ancilla");
  Vector zero = Vector::Zero(Eigen::Index{1} << ancillas);
  zero(0) = 1.0;
  return kron(psi, zero);
}

LabeledState naimark_embed(const LabeledState& state, int ancillas) {
  if (state.is_pure()) return {naimark_embed(state.psi(), ancillas), state.label()};
  return {naimark_embed(state.rho(), ancillas), state.label()};
}

StateBatch::StateBatch(std::span<const LabeledState> states) {
  if (states.empty()) throw std::invalid_argument("StateBatch: empty batch");
  const Eigen::Index dim = states.front().dim();
  const auto count = static_cast<Eigen::Index>(states.size());
  for (const auto& s : states) {
    if (s.dim() != dim) throw std::invalid_argument("StateBatch: states differ in dimension");
  }
  const bool all_pure =
      std::all_of(states.begin(), states.end(), [](const auto& s) { return s.is_pure(); });
  if (all_pure) {
    columns_.resize(dim, count);
    for (Eigen::Index j = 0; j < count; ++j) columns_.col(j) = states[static_cast<std::size_t>(j)].psi();
    weights_ = RealMatrix::Identity(count, count);
    return;
  }

  std::vector<Matrix> rhos;
  rhos.reserve(states.size());
  for (const auto& s : states) rhos.push_back(s.density());

  // A generic combination separates eigenspaces unless members share them.
  Matrix probe = Matrix::Zero(dim, dim);
  for (std::size_t j = 0; j < rhos.size(); ++j) {
    probe += (1.0 + 0.7548776662466927 * static_cast<double>(j + 1)) * rhos[j];
  }
  const EigenSystem common = herm_eig(hermitian_part(probe));
  bool commuting = true;
  RealMatrix w(count, dim);
  for (Eigen::Index j = 0; j < count && commuting; ++j) {
    const Matrix d = common.vectors.adjoint() * rhos[static_cast<std::size_t>(j)] * common.vectors;
    Matrix off = d;
    off.diagonal().setZero();
    if (max_abs(off) > 1e-10) {
      commuting = false;
      break;
    }
    w.row(j) = d.diagonal().real().cwiseMax(0.0).transpose();
  }
  if (commuting) {
    columns_ = common.vectors;
    weights_ = std::move(w);
    shared_basis_ = true;
    return;
  }

  std::vector<Vector> cols;
  std::vector<std::pair<Eigen::Index, double>> owner;
  for (Eigen::Index j = 0; j < count; ++j) {
    const EigenSystem sys = herm_eig(rhos[static_cast<std::size_t>(j)]);
    for (Eigen::Index k = 0; k < dim; ++k) {
      if (sys.values(k) > kProbabilityFloor) {
        cols.push_back(sys.vectors.col(k));
        owner.emplace_back(j, sys.values(k));
      }
    }
  }
  columns_.resize(dim, static_cast<Eigen::Index>(cols.size()));
  weights_ = RealMatrix::Zero(count, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) {
    const auto ci = static_cast<Eigen::Index>(c);
    columns_.col(ci) = cols[c];
    weights_(owner[c].first, ci) = owner[c].second;
  }
}

RealMatrix column_outcome_weights(const Matrix& final_columns, int m) {
  const Eigen::Index outcomes = Eigen::Index{1} << m;
  const Eigen::Index mask = outcomes - 1;
  RealMatrix q = RealMatrix::Zero(final_columns.cols(), outcomes);
  for (Eigen::Index c = 0; c < final_columns.cols(); ++c) {
    for (Eigen::Index b = 0; b < final_columns.rows(); ++b) {
      q(c, b & mask) += std::norm(final_columns(b, c));
    }
  }
  return q;
}

RealMatrix batch_probabilities(const Circuit& circuit, const RealVector& theta, int m,
                               const StateBatch& batch, Matrix* final_columns) {
  if (batch.dim() != circuit.dim()) {
    throw std::invalid_argument("batch_probabilities: dimension mismatch");
  }
  Matrix x = apply(circuit, theta, batch.columns());
  RealMatrix p = batch.weights() * column_outcome_weights(x, m);
  if (final_columns != nullptr) *final_columns = std::move(x);
  return p;
}

}  // namespace qvar
