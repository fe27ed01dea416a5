#include "amfg/model.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "amfg/error.hpp"
#include "amfg/linalg.hpp"

namespace amfg {
namespace {

using json = nlohmann::json;

constexpr double kSymmetryTol = 1e-12;
constexpr double kPsdTol = 1e-10;

std::string indexed(const std::string& path, std::size_t t) {
  return path + "[" + std::to_string(t) + "]";
}

const json& require(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) throw SpecError(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) {
    const std::string full = path.empty() ? key : path + "." + key;
    throw SpecError(full, "missing required field \"" + std::string(key) + "\"");
  }
  return *it;
}

int read_positive_int(const json& node, const std::string& path) {
  if (!node.is_number_integer() || node.get<long long>() < 1) {
    throw SpecError(path, "expected a positive integer");
  }
  return node.get<int>();
}

bool is_number_row(const json& node) {
  if (!node.is_array()) return false;
  for (const auto& x : node) {
    if (!x.is_number()) return false;
  }
  return true;
}

bool is_matrix_node(const json& node) {
  if (!node.is_array() || node.empty()) return false;
  for (const auto& row : node) {
    if (!is_number_row(row)) return false;
  }
  return true;
}

Matrix read_matrix(const json& node, int rows, int cols,
                   const std::string& path) {
  if (node.is_number()) {
    if (rows != cols) {
      throw SpecError(path, "scalar shorthand requires a square matrix, " +
                                std::to_string(rows) + "x" +
                                std::to_string(cols) + " expected");
    }
    return node.get<double>() * Matrix::Identity(rows, cols);
  }
  if (!is_matrix_node(node)) {
    throw SpecError(path, "expected a matrix (row-major nested array)");
  }
  const auto got_rows = static_cast<int>(node.size());
  const auto got_cols = static_cast<int>(node[0].size());
  for (const auto& row : node) {
    if (static_cast<int>(row.size()) != got_cols) {
      throw SpecError(path, "ragged matrix rows");
    }
  }
  if (got_rows != rows || got_cols != cols) {
    throw SpecError(path, "shape mismatch: expected " + std::to_string(rows) +
                              "x" + std::to_string(cols) + ", got " +
                              std::to_string(got_rows) + "x" +
                              std::to_string(got_cols));
  }
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = node[i][j].get<double>();
  }
  return m;
}

Vector read_vector(const json& node, int size, const std::string& path) {
  if (node.is_number()) return Vector::Constant(size, node.get<double>());
  if (!is_number_row(node)) throw SpecError(path, "expected a vector");
  if (static_cast<int>(node.size()) != size) {
    throw SpecError(path, "shape mismatch: expected length " +
                              std::to_string(size) + ", got " +
                              std::to_string(node.size()));
  }
  Vector v(size);
  for (int i = 0; i < size; ++i) v(i) = node[i].get<double>();
  return v;
}

MatrixSeq read_sequence(const json& node, int dim, int length,
                        const std::string& path) {
  // A scalar or a single matrix is broadcast; otherwise one entry per step.
  if (node.is_number() || is_matrix_node(node)) {
    return MatrixSeq(static_cast<std::size_t>(length),
                     read_matrix(node, dim, dim, path));
  }
  if (!node.is_array()) {
    throw SpecError(path, "expected a scalar, a matrix or a sequence");
  }
  if (static_cast<int>(node.size()) != length) {
    throw SpecError(path, "sequence length mismatch: expected " +
                              std::to_string(length) + ", got " +
                              std::to_string(node.size()));
  }
  MatrixSeq seq;
  seq.reserve(node.size());
  for (std::size_t t = 0; t < node.size(); ++t) {
    seq.push_back(read_matrix(node[t], dim, dim, indexed(path, t)));
  }
  return seq;
}

void check_shape(const Matrix& m, int rows, int cols, const std::string& path) {
  if (m.rows() != rows || m.cols() != cols) {
    throw SpecError(path, "shape mismatch: expected " + std::to_string(rows) +
                              "x" + std::to_string(cols) + ", got " +
                              std::to_string(m.rows()) + "x" +
                              std::to_string(m.cols()));
  }
  if (!m.allFinite()) throw SpecError(path, "non-finite entry");
}

void check_sequence_shape(const MatrixSeq& seq, int dim, int length,
                          const std::string& path) {
  if (static_cast<int>(seq.size()) != length) {
    throw SpecError(path, "sequence length mismatch: expected " +
                              std::to_string(length) + ", got " +
                              std::to_string(seq.size()));
  }
  for (std::size_t t = 0; t < seq.size(); ++t) {
    check_shape(seq[t], dim, dim, indexed(path, t));
  }
}

void check_structure(const GameSpec& s) {
  if (s.dims.state < 1) throw SpecError("dims.z", "must be positive");
  if (s.dims.control < 1) throw SpecError("dims.u", "must be positive");
  if (s.dims.adversary < 1) throw SpecError("dims.v", "must be positive");
  if (s.horizon < 1) throw SpecError("horizon", "must be positive");
  if (s.neighborhood_size < 1) {
    throw SpecError("neighborhood_size", "must be positive");
  }
  const int z = s.z(), u = s.u(), v = s.v(), T = s.T();
  check_shape(s.A, z, z, "dynamics.A");
  check_shape(s.B, z, u, "dynamics.B");
  check_shape(s.C, z, v, "dynamics.C");
  check_shape(s.Sigma_w, z, z, "noise.Sigma_w");
  if (s.mu_0.size() != z || !s.mu_0.allFinite()) {
    throw SpecError("noise.mu_0", "expected a finite vector of length " +
                                      std::to_string(z));
  }
  check_shape(s.Sigma_0, z, z, "noise.Sigma_0");
  check_sequence_shape(s.Q, z, T + 1, "costs.Q");
  check_sequence_shape(s.Qbar, z, T + 1, "costs.Qbar");
  check_sequence_shape(s.Qtilde, z, T + 1, "costs.Qtilde");
  check_sequence_shape(s.R, u, T, "costs.R");
  check_sequence_shape(s.S, v, T, "costs.S");
}

void symmetrize_checked(Matrix& m, const std::string& name,
                        const std::string& where) {
  const double asym = linalg::relative_asymmetry(m);
  if (asym > kSymmetryTol) {
    throw ValidationError(where, name + " not symmetric" +
                                     " (relative asymmetry " +
                                     std::to_string(asym) + ")");
  }
  if (asym > 0.0) m = linalg::symmetrize(m);
}

void check_psd(Matrix& m, const std::string& name, const std::string& where,
               const std::string& at) {
  symmetrize_checked(m, name, where);
  if (!linalg::is_psd(m, kPsdTol)) {
    throw ValidationError(where, name + " not positive semidefinite" + at +
                                     " (min eigenvalue " +
                                     std::to_string(linalg::min_eigenvalue(m)) +
                                     ")");
  }
}

void check_psd_sequence(MatrixSeq& seq, const std::string& name,
                        const std::string& path) {
  for (std::size_t t = 0; t < seq.size(); ++t) {
    check_psd(seq[t], name, indexed(path, t), " at t=" + std::to_string(t));
  }
}

void check_pd_sequence(MatrixSeq& seq, const std::string& name,
                       const std::string& path) {
  for (std::size_t t = 0; t < seq.size(); ++t) {
    symmetrize_checked(seq[t], name, indexed(path, t));
    if (!(linalg::min_eigenvalue(seq[t]) > 0.0)) {
      throw ValidationError(indexed(path, t),
                            name + " not positive definite at t=" +
                                std::to_string(t));
    }
  }
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json sequence_to_json(const MatrixSeq& seq) {
  json out = json::array();
  for (const auto& m : seq) out.push_back(matrix_to_json(m));
  return out;
}

bool same_bits(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (std::memcmp(a.data() + i, b.data() + i, sizeof(double)) != 0) {
      return false;
    }
  }
  return true;
}

bool same_bits(const MatrixSeq& a, const MatrixSeq& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!same_bits(a[i], b[i])) return false;
  }
  return true;
}

}  // namespace

bool identical(const GameSpec& a, const GameSpec& b) {
  return a.dims == b.dims && a.horizon == b.horizon &&
         a.neighborhood_size == b.neighborhood_size && same_bits(a.A, b.A) &&
         same_bits(a.B, b.B) && same_bits(a.C, b.C) &&
         same_bits(a.Sigma_w, b.Sigma_w) && same_bits(a.mu_0, b.mu_0) &&
         same_bits(a.Sigma_0, b.Sigma_0) && same_bits(a.Q, b.Q) &&
         same_bits(a.Qbar, b.Qbar) && same_bits(a.Qtilde, b.Qtilde) &&
         same_bits(a.R, b.R) && same_bits(a.S, b.S);
}

GameSpec load_spec(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document.begin(), document.end());
  } catch (const json::parse_error& e) {
    throw SpecError("", std::string("parse failure: ") + e.what());
  }
  if (!doc.is_object()) throw SpecError("", "top level must be an object");

  GameSpec s;
  const json& dims = require(doc, "dims", "");
  s.dims.state = read_positive_int(require(dims, "z", "dims"), "dims.z");
  s.dims.control = read_positive_int(require(dims, "u", "dims"), "dims.u");
  s.dims.adversary = read_positive_int(require(dims, "v", "dims"), "dims.v");
  s.horizon = read_positive_int(require(doc, "horizon", ""), "horizon");
  s.neighborhood_size = read_positive_int(
      require(doc, "neighborhood_size", ""), "neighborhood_size");

  const int z = s.z(), u = s.u(), v = s.v(), T = s.T();

  const json& dyn = require(doc, "dynamics", "");
  s.A = read_matrix(require(dyn, "A", "dynamics"), z, z, "dynamics.A");
  s.B = read_matrix(require(dyn, "B", "dynamics"), z, u, "dynamics.B");
  s.C = read_matrix(require(dyn, "C", "dynamics"), z, v, "dynamics.C");

  const json& noise = require(doc, "noise", "");
  s.Sigma_w =
      read_matrix(require(noise, "Sigma_w", "noise"), z, z, "noise.Sigma_w");
  s.mu_0 = read_vector(require(noise, "mu_0", "noise"), z, "noise.mu_0");
  s.Sigma_0 =
      read_matrix(require(noise, "Sigma_0", "noise"), z, z, "noise.Sigma_0");

  const json& costs = require(doc, "costs", "");
  s.Q = read_sequence(require(costs, "Q", "costs"), z, T + 1, "costs.Q");
  s.Qbar =
      read_sequence(require(costs, "Qbar", "costs"), z, T + 1, "costs.Qbar");
  s.Qtilde = read_sequence(require(costs, "Qtilde", "costs"), z, T + 1,
                           "costs.Qtilde");
  s.R = read_sequence(require(costs, "R", "costs"), u, T, "costs.R");
  s.S = read_sequence(require(costs, "S", "costs"), v, T, "costs.S");

  check_structure(s);
  return s;
}

GameSpec load_spec_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open spec file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_spec(buf.str());
}

GameSpec validate_spec(GameSpec spec) {
  check_structure(spec);
  check_psd_sequence(spec.Q, "Q", "costs.Q");
  check_psd_sequence(spec.Qbar, "Qbar", "costs.Qbar");
  check_psd_sequence(spec.Qtilde, "Qtilde", "costs.Qtilde");
  check_pd_sequence(spec.R, "R", "costs.R");
  check_pd_sequence(spec.S, "S", "costs.S");
  check_psd(spec.Sigma_w, "Sigma_w", "noise.Sigma_w", "");
  check_psd(spec.Sigma_0, "Sigma_0", "noise.Sigma_0", "");
  return spec;
}

std::string serialize_spec(const GameSpec& s) {
  json doc;
  doc["dims"] = {{"z", s.z()}, {"u", s.u()}, {"v", s.v()}};
  doc["horizon"] = s.horizon;
  doc["dynamics"] = {{"A", matrix_to_json(s.A)},
                     {"B", matrix_to_json(s.B)},
                     {"C", matrix_to_json(s.C)}};
  json mu = json::array();
  for (Eigen::Index i = 0; i < s.mu_0.size(); ++i) mu.push_back(s.mu_0(i));
  doc["noise"] = {{"Sigma_w", matrix_to_json(s.Sigma_w)},
                  {"mu_0", mu},
                  {"Sigma_0", matrix_to_json(s.Sigma_0)}};
  doc["costs"] = {{"Q", sequence_to_json(s.Q)},
                  {"Qbar", sequence_to_json(s.Qbar)},
                  {"Qtilde", sequence_to_json(s.Qtilde)},
                  {"R", sequence_to_json(s.R)},
                  {"S", sequence_to_json(s.S)}};
  doc["neighborhood_size"] = s.neighborhood_size;
  return doc.dump(2) + "\n";
}

GameSpec make_constant_spec(const Matrix& A, const Matrix& B, const Matrix& C,
                            const Matrix& Q, const Matrix& Qbar,
                            const Matrix& Qtilde, const Matrix& R,
                            const Matrix& S, int horizon, const Vector& mu_0,
                            const Matrix& Sigma_0, const Matrix& Sigma_w,
                            int neighborhood_size) {
  GameSpec s;
  s.dims = {static_cast<int>(A.rows()), static_cast<int>(B.cols()),
            static_cast<int>(C.cols())};
  s.horizon = horizon;
  s.A = A;
  s.B = B;
  s.C = C;
  s.Sigma_w = Sigma_w;
  s.mu_0 = mu_0;
  s.Sigma_0 = Sigma_0;
  const auto states = static_cast<std::size_t>(horizon + 1);
  const auto steps = static_cast<std::size_t>(horizon);
  s.Q.assign(states, Q);
  s.Qbar.assign(states, Qbar);
  s.Qtilde.assign(states, Qtilde);
  s.R.assign(steps, R);
  s.S.assign(steps, S);
  s.neighborhood_size = neighborhood_size;
  return s;
}

}  // namespace amfg
