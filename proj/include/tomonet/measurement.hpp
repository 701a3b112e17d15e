#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tomonet/linalg.hpp"
#include "tomonet/random.hpp"
#include "tomonet/states.hpp"

namespace tomonet {

enum class Pauli : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

/// Tensor product of single-qubit Paulis; letter 0 acts on qubit 0.
class PauliString {
 public:
  /// Throws InvalidArgument for the all-identity string.
  explicit PauliString(std::vector<Pauli> letters);
  static PauliString parse(std::string_view text);

  std::size_t n_qubits() const { return letters_.size(); }
  const std::vector<Pauli>& letters() const { return letters_; }
  std::size_t identity_count() const;
  std::string to_string() const;

  /// Dense 2^n x 2^n matrix, built by Kronecker products.
  ComplexMatrix matrix() const;

  friend bool operator==(const PauliString&, const PauliString&) = default;
  friend auto operator<=>(const PauliString&, const PauliString&) = default;

 private:
  std::vector<Pauli> letters_;
};

struct MeasurementSet {
  std::size_t n_qubits = 0;
  std::vector<PauliString> strings;
  std::optional<std::uint64_t> selection_seed;  // set when produced by random_subset

  std::size_t size() const { return strings.size(); }
  std::vector<std::string> labels() const;
};

/// Pauli expectation estimates aligned with a MeasurementSet.
struct DataVector {
  std::vector<double> values;
  std::optional<std::uint64_t> shots;  // empty: exact expectations
};

/// All 4^n - 1 non-identity strings in lexicographic order (I < X < Y < Z).
MeasurementSet full_pauli_set(std::size_t n);

/// tr(rho M) without forming M.
Complex pauli_expectation(const ComplexMatrix& rho, const PauliString& p);

DataVector exact_expectations(const DensityMatrix& state, const MeasurementSet& set);

/// Simulates m shots for each of the 3^n cube settings and coarse-grains the
/// outcome statistics onto every requested string.
DataVector sample_cube_shots(const DensityMatrix& state, const MeasurementSet& set, std::uint64_t m,
                             RandomStream& rng);

/// Number of cube settings compatible with (i.e. pooled into) a string.
std::size_t pooled_settings(const PauliString& p);

/// Uniform size-subset without replacement, parent order preserved.
MeasurementSet random_subset(const MeasurementSet& set, std::size_t size, std::uint64_t seed);

}  // namespace tomonet
