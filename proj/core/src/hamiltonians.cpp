#include "qvar/hamiltonians.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace qvar {

PauliString::PauliString(int num_qubits, std::map<int, Pauli> ls, double coeff)
    : n(num_qubits), letters(std::move(ls)), coefficient(coeff) {
  for (const auto& [q, _] : letters) {
    if (q < 0 || q >= n) {
      throw std::out_of_range("PauliString: qubit " + std::to_string(q) + " out of range");
    }
  }
}

PauliString PauliString::parse(int num_qubits, const std::string& text, double coeff) {
  std::map<int, Pauli> ls;
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) {
    if (tok == "I") continue;
    if (tok.size() < 2 || (tok[0] != 'X' && tok[0] != 'Y' && tok[0] != 'Z')) {
      throw std::invalid_argument("PauliString: bad token '" + tok + "'");
    }
    const int q = std::stoi(tok.substr(1));
    if (ls.contains(q)) throw std::invalid_argument("PauliString: repeated qubit in '" + text + "'");
    ls[q] = static_cast<Pauli>(tok[0]);
  }
  return PauliString(num_qubits, std::move(ls), coeff);
}

std::uint64_t PauliString::flip_mask() const {
  std::uint64_t m = 0;
  for (const auto& [q, p] : letters) {
    if (p != Pauli::Z) m |= std::uint64_t{1} << (n - 1 - q);
  }
  return m;
}

std::uint64_t PauliString::sign_mask() const {
  std::uint64_t m = 0;
  for (const auto& [q, p] : letters) {
    if (p != Pauli::X) m |= std::uint64_t{1} << (n - 1 - q);
  }
  return m;
}

int PauliString::y_count() const {
  int c = 0;
  for (const auto& [_, p] : letters) c += p == Pauli::Y ? 1 : 0;
  return c;
}

bool PauliString::commutes_with(const PauliString& other) const {
  // Two strings commute iff they anticommute on an even number of qubits.
  const auto anti = (flip_mask() & other.sign_mask()) ^ (sign_mask() & other.flip_mask());
  return std::popcount(anti) % 2 == 0;
}

std::string PauliString::label() const {
  if (letters.empty()) return "I";
  std::string out;
  for (const auto& [q, p] : letters) {
    if (!out.empty()) out += ' ';
    out += static_cast<char>(p);
    out += std::to_string(q);
  }
  return out;
}

PauliAction::PauliAction(const PauliString& p) : flip(p.flip_mask()), sign(p.sign_mask()) {
  static constexpr Complex kPowers[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  y_phase = kPowers[p.y_count() % 4];
}

Complex PauliAction::phase(std::uint64_t b) const {
  return std::popcount(b & sign) % 2 == 0 ? y_phase : -y_phase;
}

Matrix pauli_matrix(const PauliString& p) {
  const Eigen::Index dim = Eigen::Index{1} << p.n;
  const PauliAction act(p);
  Matrix out = Matrix::Zero(dim, dim);
  for (std::uint64_t b = 0; b < static_cast<std::uint64_t>(dim); ++b) {
    out(static_cast<Eigen::Index>(b ^ act.flip), static_cast<Eigen::Index>(b)) =
        p.coefficient * act.phase(b);
  }
  return out;
}

Matrix pauli_sum_matrix(const std::vector<PauliString>& terms) {
  if (terms.empty()) throw std::invalid_argument("pauli_sum_matrix: empty sum");
  const Eigen::Index dim = Eigen::Index{1} << terms.front().n;
  Matrix out = Matrix::Zero(dim, dim);
  for (const auto& t : terms) {
    if (t.n != terms.front().n) throw std::invalid_argument("pauli_sum_matrix: qubit mismatch");
    const PauliAction act(t);
    for (std::uint64_t b = 0; b < static_cast<std::uint64_t>(dim); ++b) {
      out(static_cast<Eigen::Index>(b ^ act.flip), static_cast<Eigen::Index>(b)) +=
          t.coefficient * act.phase(b);
    }
  }
  return out;
}

std::vector<PauliString> ising_terms(int n, double h) {
  if (n < 2) throw std::invalid_argument("ising: n must be >= 2");
  std::vector<PauliString> terms;
  for (int i = 0; i < n; ++i) {
    const int j = (i + 1) % n;
    if (i == j) continue;
    std::map<int, Pauli> zz{{i, Pauli::Z}};
    zz[j] = Pauli::Z;
    terms.emplace_back(n, zz, 1.0);
  }
  for (int i = 0; i < n; ++i) terms.emplace_back(n, std::map<int, Pauli>{{i, Pauli::X}}, h);
  return terms;
}

Matrix ising(int n, double h) { return pauli_sum_matrix(ising_terms(n, h)); }

Matrix schwinger(int n, double mu, const SchwingerCouplings& c) {
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("schwinger: n must be even and >= 2");
  std::vector<PauliString> terms;
  for (int j = 0; j + 1 < n; ++j) {
    terms.emplace_back(n, std::map<int, Pauli>{{j, Pauli::X}, {j + 1, Pauli::X}}, c.w);
    terms.emplace_back(n, std::map<int, Pauli>{{j, Pauli::Y}, {j + 1, Pauli::Y}}, c.w);
  }
  // 1-based site labels enter the alternating signs.
  auto alt = [](int site) { return site % 2 == 0 ? 1.0 : -1.0; };
  for (int j = 0; j < n; ++j) {
    terms.emplace_back(n, std::map<int, Pauli>{{j, Pauli::Z}}, 0.5 * mu * alt(j + 1));
  }
  // g Σ_j [ε0 - ½ Σ_{l<=j} Z_l - (j/2)(-1)^j]; Z_l appears for every j >= l.
  double constant = 0.0;
  for (int j = 1; j <= n; ++j) constant += c.g * (c.eps0 - 0.5 * j * alt(j));
  for (int l = 1; l <= n; ++l) {
    const double weight = -0.5 * c.g * static_cast<double>(n - l + 1);
    terms.emplace_back(n, std::map<int, Pauli>{{l - 1, Pauli::Z}}, weight);
  }
  terms.emplace_back(n, std::map<int, Pauli>{}, constant);
  return pauli_sum_matrix(terms);
}

std::vector<PauliString> cluster_zxz_terms(int n) {
  if (n < 3) throw std::invalid_argument("cluster: n must be >= 3");
  std::vector<PauliString> terms;
  for (int i = 0; i < n; ++i) {
    terms.emplace_back(
        n, std::map<int, Pauli>{{i, Pauli::Z}, {(i + 1) % n, Pauli::X}, {(i + 2) % n, Pauli::Z}},
        1.0);
  }
  return terms;
}

Matrix cluster(int n, double x, double eps) {
  const double angle = std::numbers::pi * x / 2.0;
  std::vector<PauliString> terms;
  for (auto t : cluster_zxz_terms(n)) {
    t.coefficient = -std::cos(angle);
    terms.push_back(std::move(t));
  }
  for (int i = 0; i < n; ++i) {
    terms.emplace_back(n, std::map<int, Pauli>{{i, Pauli::X}}, -std::sin(angle));
    terms.emplace_back(n, std::map<int, Pauli>{{i, Pauli::Z}}, -eps);
  }
  return pauli_sum_matrix(terms);
}

}  // namespace qvar
