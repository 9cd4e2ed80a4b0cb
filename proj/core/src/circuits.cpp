#include "qvar/circuits.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace qvar {
namespace {

using detail::DenseRotationOp;
using detail::Op;
using detail::RotationOp;
using detail::SwapOp;

PauliString single(int n, int q, Pauli p) { return PauliString(n, {{q, p}}, 1.0); }

void apply_rotation(const RotationOp& op, double angle, Matrix& x) {
  const double c = std::cos(angle);
  const Complex mis{0.0, -std::sin(angle)};
  const auto dim = static_cast<std::uint64_t>(x.rows());
  const auto& act = op.action;
  if (act.flip == 0) {
    const Complex plus = c + mis * act.y_phase;
    const Complex minus = c - mis * act.y_phase;
    for (Eigen::Index col = 0; col < x.cols(); ++col) {
      Complex* d = x.col(col).data();
      for (std::uint64_t b = 0; b < dim; ++b) {
        d[b] *= std::popcount(b & act.sign) % 2 == 0 ? plus : minus;
      }
    }
    return;
  }
  const std::uint64_t top = std::bit_floor(act.flip);
  for (Eigen::Index col = 0; col < x.cols(); ++col) {
    Complex* d = x.col(col).data();
    for (std::uint64_t b = 0; b < dim; ++b) {
      if (b & top) continue;
      const std::uint64_t b2 = b ^ act.flip;
      const Complex xb = d[b];
      const Complex xb2 = d[b2];
      d[b] = c * xb + mis * act.phase(b2) * xb2;
      d[b2] = c * xb2 + mis * act.phase(b) * xb;
    }
  }
}

// Σ_c Im <lambda_c | P | x_c>
double pauli_overlap_imag(const RotationOp& op, const Matrix& lambda, const Matrix& x) {
  const auto dim = static_cast<std::uint64_t>(x.rows());
  const auto& act = op.action;
  double acc = 0.0;
  for (Eigen::Index col = 0; col < x.cols(); ++col) {
    const Complex* l = lambda.col(col).data();
    const Complex* d = x.col(col).data();
    Complex sum{0.0, 0.0};
    for (std::uint64_t b = 0; b < dim; ++b) {
      const std::uint64_t b2 = b ^ act.flip;
      sum += std::conj(l[b]) * act.phase(b2) * d[b2];
    }
    acc += sum.imag();
  }
  return acc;
}

void apply_dense(const DenseRotationOp& op, double angle, Matrix& x) {
  const auto& eig = *op.eig;
  Vector phases(eig.values.size());
  for (Eigen::Index i = 0; i < phases.size(); ++i) {
    phases(i) = std::polar(1.0, -angle * eig.values(i));
  }
  x = eig.vectors * (phases.asDiagonal() * (eig.vectors.adjoint() * x));
}

void apply_swap(const SwapOp& op, Matrix& x) {
  const auto dim = static_cast<std::uint64_t>(x.rows());
  const std::uint64_t both = op.bit_a | op.bit_b;
  for (Eigen::Index col = 0; col < x.cols(); ++col) {
    Complex* d = x.col(col).data();
    for (std::uint64_t b = 0; b < dim; ++b) {
      if ((b & op.bit_a) && !(b & op.bit_b)) std::swap(d[b], d[b ^ both]);
    }
  }
}

void apply_op(const Op& op, const RealVector& theta, double sign, Matrix& x) {
  std::visit(
      [&](const auto& o) {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, RotationOp>) {
          apply_rotation(o, sign * o.coeff * theta(o.slot), x);
        } else if constexpr (std::is_same_v<T, DenseRotationOp>) {
          apply_dense(o, sign * o.coeff * theta(o.slot), x);
        } else {
          apply_swap(o, x);
        }
      },
      op);
}

void check_theta(const Circuit& c, const RealVector& theta) {
  if (theta.size() != c.param_count()) {
    throw std::invalid_argument("circuit expects " + std::to_string(c.param_count()) +
                                " parameters, got " + std::to_string(theta.size()));
  }
}

void check_columns(const Circuit& c, const Matrix& columns) {
  if (columns.rows() != c.dim()) {
    throw std::invalid_argument("circuit acts on dimension " + std::to_string(c.dim()) +
                                ", columns have " + std::to_string(columns.rows()) + " rows");
  }
}

const char* kind_token(GateKind k) {
  switch (k) {
    case GateKind::kPauliRotation: return "rot";
    case GateKind::kU3: return "u3";
    case GateKind::kControlledU3: return "cu3";
    case GateKind::kPauliSumRotation: return "psum";
    case GateKind::kSwap: return "swap";
  }
  return "?";
}

GateKind kind_from_token(const std::string& t) {
  if (t == "rot") return GateKind::kPauliRotation;
  if (t == "u3") return GateKind::kU3;
  if (t == "cu3") return GateKind::kControlledU3;
  if (t == "psum") return GateKind::kPauliSumRotation;
  if (t == "swap") return GateKind::kSwap;
  throw std::invalid_argument("unknown gate kind '" + t + "'");
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::istringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(std::stoi(item));
  return out;
}

}  // namespace

Circuit::Circuit(int num_qubits) : n_(num_qubits) {
  if (n_ < 1 || n_ > 12) throw std::invalid_argument("Circuit: qubit count must be in 1..12");
}

int Circuit::add_slots(int count) {
  const int first = param_count_;
  param_count_ += count;
  return first;
}

Circuit& Circuit::add(Gate gate) {
  for (int q : gate.qubits) {
    if (q < 0 || q >= n_) throw std::out_of_range("gate '" + gate.name + "': qubit out of range");
  }
  for (int s : gate.slots) {
    if (s < 0 || s >= param_count_) {
      throw std::out_of_range("gate '" + gate.name + "': slot " + std::to_string(s) +
                              " not reserved");
    }
  }
  for (const auto& g : gate.generators) {
    if (g.n != n_) throw std::invalid_argument("gate '" + gate.name + "': generator qubit count");
  }
  compile(gate);
  gates_.push_back(std::move(gate));
  return *this;
}

void Circuit::compile(const Gate& g) {
  auto expect = [&](std::size_t qubits, std::size_t slots) {
    if (g.qubits.size() != qubits || g.slots.size() != slots) {
      throw std::invalid_argument("gate '" + g.name + "': wrong number of qubits or slots");
    }
  };
  switch (g.kind) {
    case GateKind::kPauliRotation: {
      if (g.generators.size() != 1 || g.slots.size() != 1) {
        throw std::invalid_argument("Pauli rotation needs one generator and one slot");
      }
      ops_.emplace_back(RotationOp{PauliAction(g.generators[0]), g.generators[0].coefficient,
                                   g.slots[0]});
      break;
    }
    case GateKind::kU3: {
      expect(1, 3);
      const int q = g.qubits[0];
      ops_.emplace_back(RotationOp{PauliAction(single(n_, q, Pauli::Z)), 1.0, g.slots[2]});
      ops_.emplace_back(RotationOp{PauliAction(single(n_, q, Pauli::Y)), 1.0, g.slots[0]});
      ops_.emplace_back(RotationOp{PauliAction(single(n_, q, Pauli::Z)), 1.0, g.slots[1]});
      break;
    }
    case GateKind::kControlledU3: {
      expect(2, 3);
      const int ctrl = g.qubits[0];
      const int tgt = g.qubits[1];
      if (ctrl == tgt) throw std::invalid_argument("controlled gate needs distinct qubits");
      // exp(-i t |1><1|_c ⊗ P) = exp(-i t/2 P) exp(+i t/2 Z_c P)
      const std::pair<Pauli, int> parts[] = {
          {Pauli::Z, g.slots[2]}, {Pauli::Y, g.slots[0]}, {Pauli::Z, g.slots[1]}};
      for (const auto& [p, slot] : parts) {
        ops_.emplace_back(RotationOp{PauliAction(single(n_, tgt, p)), 0.5, slot});
        ops_.emplace_back(
            RotationOp{PauliAction(PauliString(n_, {{ctrl, Pauli::Z}, {tgt, p}})), -0.5, slot});
      }
      break;
    }
    case GateKind::kPauliSumRotation: {
      if (g.generators.empty() || g.slots.size() != 1) {
        throw std::invalid_argument("Pauli-sum rotation needs generators and one slot");
      }
      bool commuting = true;
      for (std::size_t i = 0; i < g.generators.size() && commuting; ++i) {
        for (std::size_t j = i + 1; j < g.generators.size(); ++j) {
          if (!g.generators[i].commutes_with(g.generators[j])) {
            commuting = false;
            break;
          }
        }
      }
      if (commuting) {
        for (const auto& t : g.generators) {
          ops_.emplace_back(RotationOp{PauliAction(t), t.coefficient, g.slots[0]});
        }
      } else {
        auto gen = std::make_shared<const Matrix>(pauli_sum_matrix(g.generators));
        auto eig = std::make_shared<const EigenSystem>(herm_eig(*gen));
        ops_.emplace_back(DenseRotationOp{std::move(gen), std::move(eig), 1.0, g.slots[0]});
      }
      break;
    }
    case GateKind::kSwap: {
      expect(2, 0);
      ops_.emplace_back(SwapOp{std::uint64_t{1} << (n_ - 1 - g.qubits[0]),
                               std::uint64_t{1} << (n_ - 1 - g.qubits[1])});
      break;
    }
  }
}

Circuit& Circuit::pauli_rotation(const PauliString& generator, int slot, std::string name) {
  if (name.empty()) {
    name = "R";
    for (const auto& [_, p] : generator.letters) name += static_cast<char>(p);
  }
  std::vector<int> qubits;
  for (const auto& [q, _] : generator.letters) qubits.push_back(q);
  return add(Gate{GateKind::kPauliRotation, std::move(name), std::move(qubits), {slot}, {generator}});
}

Circuit& Circuit::u3(int qubit, int slot_theta, int slot_phi, int slot_lambda) {
  return add(Gate{GateKind::kU3, "U3", {qubit}, {slot_theta, slot_phi, slot_lambda}, {}});
}

Circuit& Circuit::controlled_u3(int control, int target, int slot_theta, int slot_phi,
                                int slot_lambda) {
  return add(
      Gate{GateKind::kControlledU3, "CU3", {control, target}, {slot_theta, slot_phi, slot_lambda}, {}});
}

Circuit& Circuit::pauli_sum_rotation(std::vector<PauliString> generators, int slot,
                                     std::string name) {
  if (name.empty()) name = "RSUM";
  return add(Gate{GateKind::kPauliSumRotation, std::move(name), {}, {slot}, std::move(generators)});
}

Circuit& Circuit::swap(int a, int b) {
  return add(Gate{GateKind::kSwap, "SWAP", {a, b}, {}, {}});
}

Matrix apply(const Circuit& c, const RealVector& theta, Matrix columns) {
  check_theta(c, theta);
  check_columns(c, columns);
  for (const auto& op : c.ops()) apply_op(op, theta, 1.0, columns);
  return columns;
}

Matrix apply_adjoint(const Circuit& c, const RealVector& theta, Matrix columns) {
  check_theta(c, theta);
  check_columns(c, columns);
  for (auto it = c.ops().rbegin(); it != c.ops().rend(); ++it) apply_op(*it, theta, -1.0, columns);
  return columns;
}

Matrix unitary(const Circuit& c, const RealVector& theta) {
  return apply(c, theta, Matrix::Identity(c.dim(), c.dim()));
}

RealVector diagonal_expectation_gradient(const Circuit& c, const RealVector& theta,
                                         Matrix final_columns, const RealMatrix& weights) {
  check_theta(c, theta);
  check_columns(c, final_columns);
  if (weights.rows() != final_columns.rows() || weights.cols() != final_columns.cols()) {
    throw std::invalid_argument("diagonal_expectation_gradient: weights shape mismatch");
  }
  Matrix& x = final_columns;
  Matrix lambda = weights.cast<Complex>().cwiseProduct(x);
  RealVector grad = RealVector::Zero(c.param_count());
  for (auto it = c.ops().rbegin(); it != c.ops().rend(); ++it) {
    std::visit(
        [&](const auto& o) {
          using T = std::decay_t<decltype(o)>;
          if constexpr (std::is_same_v<T, RotationOp>) {
            // d/dθ exp(-i c θ P) = -i c P exp(-i c θ P)
            grad(o.slot) += 2.0 * o.coeff * pauli_overlap_imag(o, lambda, x);
          } else if constexpr (std::is_same_v<T, DenseRotationOp>) {
            const Matrix gx = (*o.generator) * x;
            grad(o.slot) += 2.0 * o.coeff * (lambda.adjoint() * gx).trace().imag();
          }
        },
        *it);
    apply_op(*it, theta, -1.0, x);
    apply_op(*it, theta, -1.0, lambda);
  }
  return grad;
}

Circuit hea(int n, int layers, bool closing_rotations) {
  if (n < 2 || layers < 1) throw std::invalid_argument("hea: needs n >= 2 and layers >= 1");
  Circuit c(n);
  for (int l = 0; l < layers; ++l) {
    const int rx = c.add_slots(n);
    const int rz = c.add_slots(n);
    const int zz = c.add_slots(n - 1);
    for (int q = 0; q < n; ++q) c.pauli_rotation(single(n, q, Pauli::X), rx + q, "RX");
    for (int q = 0; q < n; ++q) c.pauli_rotation(single(n, q, Pauli::Z), rz + q, "RZ");
    for (int q = 0; q + 1 < n; ++q) {
      c.pauli_rotation(PauliString(n, {{q, Pauli::Z}, {q + 1, Pauli::Z}}), zz + q, "RZZ");
    }
  }
  if (closing_rotations) {
    const int rx = c.add_slots(n);
    const int rz = c.add_slots(n);
    for (int q = 0; q < n; ++q) c.pauli_rotation(single(n, q, Pauli::X), rx + q, "RX");
    for (int q = 0; q < n; ++q) c.pauli_rotation(single(n, q, Pauli::Z), rz + q, "RZ");
  }
  return c;
}

namespace {

void conv_block(Circuit& c, int a, int b, int first_slot) {
  const int n = c.num_qubits();
  const int s = first_slot;
  c.u3(a, s + 0, s + 1, s + 2);
  c.u3(b, s + 3, s + 4, s + 5);
  c.pauli_rotation(PauliString(n, {{a, Pauli::X}, {b, Pauli::X}}), s + 6, "RXX");
  c.pauli_rotation(PauliString(n, {{a, Pauli::Y}, {b, Pauli::Y}}), s + 7, "RYY");
  c.pauli_rotation(PauliString(n, {{a, Pauli::Z}, {b, Pauli::Z}}), s + 8, "RZZ");
  c.u3(a, s + 9, s + 10, s + 11);
  c.u3(b, s + 12, s + 13, s + 14);
}

void conv_level(Circuit& c, const std::vector<int>& active, bool ring) {
  const int slots = c.add_slots(15);
  const std::size_t k = active.size();
  for (std::size_t i = 0; i + 1 < k; i += 2) conv_block(c, active[i], active[i + 1], slots);
  for (std::size_t i = 1; i + 1 < k; i += 2) conv_block(c, active[i], active[i + 1], slots);
  if (ring && k > 2) conv_block(c, active[k - 1], active[0], slots);
}

}  // namespace

int qcnn_levels(int n, int measured) {
  if (n < 2) throw std::invalid_argument("qcnn: n must be >= 2");
  if (measured < 1 || measured > n) throw std::invalid_argument("qcnn: measured out of range");
  int levels = 0;
  int k = n;
  while (k >= 2 && k / 2 >= measured) {
    k -= k / 2;
    ++levels;
  }
  return levels;
}

Circuit qcnn(int n, bool ring_convolutions, int measured) {
  const int levels = qcnn_levels(n, measured);
  Circuit c(n);
  std::vector<int> active(static_cast<std::size_t>(n));
  for (int q = 0; q < n; ++q) active[static_cast<std::size_t>(q)] = q;
  for (int level = 0; level < levels; ++level) {
    conv_level(c, active, ring_convolutions);
    const int pool = c.add_slots(3);
    std::vector<int> survivors;
    for (std::size_t i = 0; i + 1 < active.size(); i += 2) {
      c.controlled_u3(active[i], active[i + 1], pool, pool + 1, pool + 2);
      survivors.push_back(active[i + 1]);
    }
    if (active.size() % 2 == 1) survivors.push_back(active.back());
    active = std::move(survivors);
  }
  if (active.size() >= 2) conv_level(c, active, ring_convolutions);
  // Move survivors onto the last qubits, which are the measured ones.
  const int k = static_cast<int>(active.size());
  for (int i = k - 1; i >= 0; --i) {
    const int target = n - k + i;
    if (active[static_cast<std::size_t>(i)] != target) c.swap(active[static_cast<std::size_t>(i)], target);
  }
  return c;
}

Circuit hva_cluster(int n, int layers) {
  if (n < 3 || layers < 1) throw std::invalid_argument("hva_cluster: needs n >= 3 and layers >= 1");
  Circuit c(n);
  std::vector<PauliString> xs;
  std::vector<PauliString> zs;
  for (int q = 0; q < n; ++q) {
    xs.push_back(single(n, q, Pauli::X));
    zs.push_back(single(n, q, Pauli::Z));
  }
  const auto zxz = cluster_zxz_terms(n);
  for (int l = 0; l < layers; ++l) {
    const int s = c.add_slots(3);
    c.pauli_sum_rotation(xs, s, "HVA_X");
    c.pauli_sum_rotation(zs, s + 1, "HVA_Z");
    c.pauli_sum_rotation(zxz, s + 2, "HVA_ZXZ");
  }
  return c;
}

void write_circuit(std::ostream& out, const Circuit& c) {
  out << "circuit n=" << c.num_qubits() << " params=" << c.param_count() << '\n';
  auto join = [](const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s;
  };
  for (const auto& g : c.gates()) {
    out << kind_token(g.kind) << ' ' << g.name;
    if (!g.qubits.empty()) out << " q=" << join(g.qubits);
    if (!g.slots.empty()) out << " s=" << join(g.slots);
    if (!g.generators.empty()) {
      out << " g=";
      for (std::size_t i = 0; i < g.generators.size(); ++i) {
        std::string label = g.generators[i].label();
        for (auto& ch : label) ch = ch == ' ' ? '_' : ch;
        out << (i ? ";" : "") << format_double(g.generators[i].coefficient) << ':' << label;
      }
    }
    out << '\n';
  }
}

std::string to_text(const Circuit& c) {
  std::ostringstream out;
  write_circuit(out, c);
  return out.str();
}

Circuit parse_circuit(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("parse_circuit: empty input");
  int n = 0;
  int params = 0;
  if (std::sscanf(line.c_str(), "circuit n=%d params=%d", &n, &params) != 2) {
    throw std::invalid_argument("parse_circuit: bad header '" + line + "'");
  }
  Circuit c(n);
  c.add_slots(params);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string kind;
    Gate g;
    fields >> kind >> g.name;
    g.kind = kind_from_token(kind);
    std::string field;
    while (fields >> field) {
      const auto eq = field.find('=');
      if (eq == std::string::npos) throw std::invalid_argument("parse_circuit: bad field " + field);
      const std::string key = field.substr(0, eq);
      const std::string value = field.substr(eq + 1);
      if (key == "q") {
        g.qubits = parse_int_list(value);
      } else if (key == "s") {
        g.slots = parse_int_list(value);
      } else if (key == "g") {
        std::istringstream terms(value);
        std::string term;
        while (std::getline(terms, term, ';')) {
          const auto colon = term.find(':');
          std::string label = term.substr(colon + 1);
          for (auto& ch : label) ch = ch == '_' ? ' ' : ch;
          g.generators.push_back(PauliString::parse(n, label, std::stod(term.substr(0, colon))));
        }
      } else {
        throw std::invalid_argument("parse_circuit: unknown key " + key);
      }
    }
    c.add(std::move(g));
  }
  return c;
}

Circuit circuit_from_text(const std::string& text) {
  std::istringstream in(text);
  return parse_circuit(in);
}

}  // namespace qvar
