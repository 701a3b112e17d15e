#include "tomonet/measurement.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "tomonet/error.hpp"

namespace tomonet {

PauliString::PauliString(std::vector<Pauli> letters) : letters_(std::move(letters)) {
  if (letters_.empty()) throw Error(ErrorKind::InvalidArgument, "empty Pauli string");
  if (identity_count() == letters_.size())
    throw Error(ErrorKind::InvalidArgument, "the all-identity string is not a measurement");
}

PauliString PauliString::parse(std::string_view text) {
  std::vector<Pauli> letters;
  for (char c : text) {
    switch (c) {
      case 'I': letters.push_back(Pauli::I); break;
      case 'X': letters.push_back(Pauli::X); break;
      case 'Y': letters.push_back(Pauli::Y); break;
      case 'Z': letters.push_back(Pauli::Z); break;
      default: throw Error(ErrorKind::InvalidArgument, "invalid Pauli letter in '" + std::string(text) + "'");
    }
  }
  return PauliString(std::move(letters));
}

std::size_t PauliString::identity_count() const {
  return static_cast<std::size_t>(std::count(letters_.begin(), letters_.end(), Pauli::I));
}

std::string PauliString::to_string() const {
  std::string s;
  for (Pauli p : letters_) s.push_back("IXYZ"[static_cast<int>(p)]);
  return s;
}

namespace {

ComplexMatrix single_pauli(Pauli p) {
  switch (p) {
    case Pauli::I: return ComplexMatrix{{1, 0}, {0, 1}};
    case Pauli::X: return ComplexMatrix{{0, 1}, {1, 0}};
    case Pauli::Y: return ComplexMatrix{{0, Complex(0, -1)}, {Complex(0, 1), 0}};
    case Pauli::Z: return ComplexMatrix{{1, 0}, {0, -1}};
  }
  throw Error(ErrorKind::InvalidArgument, "bad Pauli");
}

void require_qubits(const DensityMatrix& state, const MeasurementSet& set) {
  if (state.n_qubits() != set.n_qubits)
    throw Error(ErrorKind::DimensionMismatch, "measurement set and state have different qubit counts");
}

}  // namespace

ComplexMatrix PauliString::matrix() const {
  ComplexMatrix m = single_pauli(letters_.front());
  for (std::size_t q = 1; q < letters_.size(); ++q) m = kron(m, single_pauli(letters_[q]));
  return m;
}

std::vector<std::string> MeasurementSet::labels() const {
  std::vector<std::string> out;
  out.reserve(strings.size());
  for (const auto& s : strings) out.push_back(s.to_string());
  return out;
}

MeasurementSet full_pauli_set(std::size_t n) {
  if (n == 0 || n > 10) throw Error(ErrorKind::InvalidArgument, "qubit count must be in [1, 10]");
  const std::size_t total = std::size_t{1} << (2 * n);
  MeasurementSet set{n, {}, std::nullopt};
  set.strings.reserve(total - 1);
  for (std::size_t idx = 1; idx < total; ++idx) {
    std::vector<Pauli> letters(n);
    for (std::size_t q = 0; q < n; ++q) letters[q] = static_cast<Pauli>((idx >> (2 * (n - 1 - q))) & 3);
    set.strings.emplace_back(std::move(letters));
  }
  return set;
}

Complex pauli_expectation(const ComplexMatrix& rho, const PauliString& p) {
  const std::size_t n = p.n_qubits();
  const std::size_t d = std::size_t{1} << n;
  if (rho.rows() != d || !rho.is_square()) throw Error(ErrorKind::DimensionMismatch, "state/string size mismatch");
  std::size_t flip = 0;
  for (std::size_t q = 0; q < n; ++q) {
    const Pauli l = p.letters()[q];
    if (l == Pauli::X || l == Pauli::Y) flip |= std::size_t{1} << (n - 1 - q);
  }
  // tr(rho M) = sum_c rho(c, r) M(r, c) with r = c ^ flip.
  Complex total = 0.0;
  for (std::size_t c = 0; c < d; ++c) {
    const std::size_t r = c ^ flip;
    Complex m = 1.0;
    for (std::size_t q = 0; q < n; ++q) {
      const bool cbit = (c >> (n - 1 - q)) & 1;
      switch (p.letters()[q]) {
        case Pauli::I:
        case Pauli::X: break;
        case Pauli::Y: m *= cbit ? Complex(0, -1) : Complex(0, 1); break;
        case Pauli::Z: if (cbit) m = -m; break;
      }
    }
    total += rho(c, r) * m;
  }
  return total;
}

DataVector exact_expectations(const DensityMatrix& state, const MeasurementSet& set) {
  require_qubits(state, set);
  DataVector out{std::vector<double>(set.size()), std::nullopt};
  for (std::size_t i = 0; i < set.size(); ++i) {
    const Complex e = pauli_expectation(state.matrix(), set.strings[i]);
    if (std::abs(e.imag()) > 1e-10)
      throw Error(ErrorKind::NotHermitian, "Pauli expectation has a non-negligible imaginary part");
    out.values[i] = std::clamp(e.real(), -1.0, 1.0);
  }
  return out;
}

std::size_t pooled_settings(const PauliString& p) {
  std::size_t k = 1;
  for (std::size_t i = 0; i < p.identity_count(); ++i) k *= 3;
  return k;
}

namespace {

// Eigenvectors of X, Y, Z; outcome bit 0 is the +1 eigenvalue.
Complex basis_component(Pauli axis, unsigned outcome, unsigned comp) {
  const double h = 1.0 / std::sqrt(2.0);
  switch (axis) {
    case Pauli::X: return comp == 0 ? h : (outcome == 0 ? h : -h);
    case Pauli::Y: return comp == 0 ? Complex(h) : (outcome == 0 ? Complex(0, h) : Complex(0, -h));
    case Pauli::Z: return comp == outcome ? 1.0 : 0.0;
    case Pauli::I: break;
  }
  throw Error(ErrorKind::InvalidArgument, "cube settings use X, Y or Z only");
}

std::vector<Pauli> setting_axes(std::size_t index, std::size_t n) {
  std::vector<Pauli> axes(n);
  for (std::size_t q = n; q-- > 0;) {
    axes[q] = static_cast<Pauli>(1 + index % 3);
    index /= 3;
  }
  return axes;
}

std::size_t setting_index(const std::vector<Pauli>& axes) {
  std::size_t idx = 0;
  for (Pauli a : axes) idx = idx * 3 + (static_cast<std::size_t>(a) - 1);
  return idx;
}

std::vector<double> outcome_probabilities(const ComplexMatrix& rho, const std::vector<Pauli>& axes) {
  const std::size_t n = axes.size();
  const std::size_t d = rho.rows();
  std::vector<double> probs(d);
  std::vector<Complex> e(d);
  for (std::size_t b = 0; b < d; ++b) {
    for (std::size_t i = 0; i < d; ++i) {
      Complex v = 1.0;
      for (std::size_t q = 0; q < n; ++q) {
        const unsigned shift = static_cast<unsigned>(n - 1 - q);
        v *= basis_component(axes[q], (b >> shift) & 1, (i >> shift) & 1);
      }
      e[i] = v;
    }
    Complex s = 0.0;
    for (std::size_t r = 0; r < d; ++r) {
      if (e[r] == Complex{}) continue;
      Complex row = 0.0;
      for (std::size_t c = 0; c < d; ++c) row += rho(r, c) * e[c];
      s += std::conj(e[r]) * row;
    }
    probs[b] = std::max(0.0, s.real());
  }
  const double total = std::accumulate(probs.begin(), probs.end(), 0.0);
  for (double& p : probs) p /= total;
  return probs;
}

std::vector<std::uint64_t> multinomial(std::uint64_t m, const std::vector<double>& probs, RandomStream& rng) {
  std::vector<std::uint64_t> counts(probs.size());
  std::uint64_t left = m;
  double mass = 1.0;
  for (std::size_t b = 0; b + 1 < probs.size() && left > 0; ++b) {
    const double p = mass > 0.0 ? std::clamp(probs[b] / mass, 0.0, 1.0) : 0.0;
    counts[b] = rng.binomial(left, p);
    left -= counts[b];
    mass -= probs[b];
  }
  counts.back() += left;
  return counts;
}

}  // namespace

DataVector sample_cube_shots(const DensityMatrix& state, const MeasurementSet& set, std::uint64_t m,
                             RandomStream& rng) {
  require_qubits(state, set);
  if (m == 0) throw Error(ErrorKind::InvalidArgument, "shot count must be >= 1");
  const std::size_t n = set.n_qubits;
  const std::size_t d = state.dim();
  std::size_t n_settings = 1;
  for (std::size_t q = 0; q < n; ++q) n_settings *= 3;

  const std::uint64_t base = rng.next();
  std::vector<std::vector<std::uint64_t>> counts(n_settings);
  for (std::size_t s = 0; s < n_settings; ++s) {
    RandomStream sub(derive_seed(base, {s}));
    counts[s] = multinomial(m, outcome_probabilities(state.matrix(), setting_axes(s, n)), sub);
  }

  DataVector out{std::vector<double>(set.size()), m};
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto& letters = set.strings[i].letters();
    std::size_t sign_mask = 0;
    std::vector<std::size_t> free_qubits;
    for (std::size_t q = 0; q < n; ++q) {
      if (letters[q] == Pauli::I) free_qubits.push_back(q);
      else sign_mask |= std::size_t{1} << (n - 1 - q);
    }
    const std::size_t pooled = pooled_settings(set.strings[i]);
    double acc = 0.0;
    std::vector<Pauli> axes(letters);
    for (std::size_t combo = 0; combo < pooled; ++combo) {
      std::size_t c = combo;
      for (std::size_t q : free_qubits) {
        axes[q] = static_cast<Pauli>(1 + c % 3);
        c /= 3;
      }
      const auto& cnt = counts[setting_index(axes)];
      for (std::size_t b = 0; b < d; ++b) {
        if (cnt[b] == 0) continue;
        const bool odd = std::popcount(b & sign_mask) & 1;
        acc += odd ? -static_cast<double>(cnt[b]) : static_cast<double>(cnt[b]);
      }
    }
    out.values[i] = std::clamp(acc / (static_cast<double>(m) * static_cast<double>(pooled)), -1.0, 1.0);
  }
  return out;
}

MeasurementSet random_subset(const MeasurementSet& set, std::size_t size, std::uint64_t seed) {
  if (size == 0 || size > set.size())
    throw Error(ErrorKind::InvalidArgument, "subset size must be in [1, measurement set size]");
  std::vector<std::size_t> idx(set.size());
  std::iota(idx.begin(), idx.end(), 0);
  RandomStream rng(seed);
  for (std::size_t i = 0; i < size; ++i) {
    const auto j = static_cast<std::size_t>(rng.uniform_int(static_cast<std::int64_t>(i),
                                                            static_cast<std::int64_t>(idx.size() - 1)));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(size);
  std::sort(idx.begin(), idx.end());
  MeasurementSet out{set.n_qubits, {}, seed};
  out.strings.reserve(size);
  for (std::size_t i : idx) out.strings.push_back(set.strings[i]);
  return out;
}

}  // namespace tomonet
