#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "amfg/types.hpp"

namespace amfg {

struct Dimensions {
  int state = 0;      // z
  int control = 0;    // u
  int adversary = 0;  // v

  bool operator==(const Dimensions&) const = default;
};

// Model primitives of the adversarial LQ mean-field game. States are indexed
// 0..horizon and controls 0..horizon-1, so Q/Qbar/Qtilde hold horizon+1
// matrices and R/S hold horizon matrices.
struct GameSpec {
  Dimensions dims;
  int horizon = 0;

  Matrix A;  // z x z
  Matrix B;  // z x u
  Matrix C;  // z x v

  Matrix Sigma_w;  // process noise covariance
  Vector mu_0;     // initial state mean
  Matrix Sigma_0;  // initial state covariance

  MatrixSeq Q;       // state weight
  MatrixSeq Qbar;    // global consensus weight
  MatrixSeq Qtilde;  // local consensus weight
  MatrixSeq R;       // agent control weight
  MatrixSeq S;       // adversary control weight

  int neighborhood_size = 1;

  int z() const noexcept { return dims.state; }
  int u() const noexcept { return dims.control; }
  int v() const noexcept { return dims.adversary; }
  int T() const noexcept { return horizon; }
};

// Exact (bitwise) equality of every field.
bool identical(const GameSpec& a, const GameSpec& b);

// Parses the JSON config document. Sequence-valued weights may be given as a
// scalar (times identity), a single matrix, or a full per-step array; all are
// materialized to full length. Throws SpecError naming the field path.
GameSpec load_spec(std::string_view document);
GameSpec load_spec_file(const std::filesystem::path& path);

// Checks shapes, symmetry (relative 1e-12; smaller asymmetry is removed),
// PSD weights/covariances and PD control weights. Throws ValidationError or
// SpecError.
GameSpec validate_spec(GameSpec spec);

// Canonical serialization: every sequence written out in full, doubles in
// shortest round-trip form. load_spec(serialize_spec(s)) reproduces s exactly.
std::string serialize_spec(const GameSpec& spec);

// Convenience constructor for tests and tools: every weight constant in time.
GameSpec make_constant_spec(const Matrix& A, const Matrix& B, const Matrix& C,
                            const Matrix& Q, const Matrix& Qbar,
                            const Matrix& Qtilde, const Matrix& R,
                            const Matrix& S, int horizon, const Vector& mu_0,
                            const Matrix& Sigma_0, const Matrix& Sigma_w,
                            int neighborhood_size);

}  // namespace amfg
