#include "amfg/verification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "amfg/error.hpp"
#include "amfg/linalg.hpp"
#include "amfg/meanfield.hpp"
#include "amfg/parallel.hpp"
#include "amfg/rng.hpp"

namespace amfg {

// ---------------------------------------------------------------------------
// Forward-backward oracle

TpbvpSolution solve_tpbvp(const GameSpec& spec) {
  const int T = spec.T();
  const int z = spec.z();
  const int states = T + 1;
  const int n = 2 * z * states;
  auto zi = [&](int t) { return t * z; };
  auto ci = [&](int t) { return (states + t) * z; };

  Matrix sys = Matrix::Zero(n, n);
  Vector rhs = Vector::Zero(n);
  const Matrix I = Matrix::Identity(z, z);
  int row = 0;

  sys.block(row, zi(0), z, z) = I;
  rhs.segment(row, z) = spec.mu_0;
  row += z;
  for (int t = 0; t < T; ++t) {
    sys.block(row, zi(t + 1), z, z) = I;
    sys.block(row, zi(t), z, z) = -spec.A;
    sys.block(row, ci(t + 1), z, z) = coupling_matrix(spec, t);
    row += z;
  }
  for (int t = 0; t < T; ++t) {
    sys.block(row, ci(t), z, z) = I;
    sys.block(row, ci(t + 1), z, z) = -spec.A.transpose();
    sys.block(row, zi(t), z, z) = -spec.Q[static_cast<std::size_t>(t)];
    row += z;
  }
  sys.block(row, ci(T), z, z) = I;
  sys.block(row, zi(T), z, z) = -spec.Q[static_cast<std::size_t>(T)];

  Eigen::FullPivLU<Matrix> lu(sys);
  if (!lu.isInvertible() || lu.rcond() < 1.0 / linalg::kMaxCondition) {
    throw NumericalError("stacked forward-backward system", 0,
                         "singular; the mean-field equilibrium is not unique");
  }
  const Vector x = lu.solve(rhs);

  TpbvpSolution sol;
  for (int t = 0; t <= T; ++t) {
    sol.Z_bar.push_back(x.segment(zi(t), z));
    sol.zeta_bar.push_back(x.segment(ci(t), z));
  }
  return sol;
}

TpbvpResult tpbvp_oracle(const GameSpec& spec,
                         const MeanFieldTrajectories& candidate) {
  TpbvpResult result;
  result.direct = solve_tpbvp(spec);
  result.error =
      std::max(linalg::max_deviation(result.direct.Z_bar, candidate.Z_bar),
               linalg::max_deviation(result.direct.zeta_bar, candidate.zeta_bar));
  return result;
}

// ---------------------------------------------------------------------------
// Mean-level identities

double smp_bridge_error(const GameSpec& spec, const MeanFieldTrajectories& traj) {
  double worst = 0.0;
  for (int t = 0; t < spec.T(); ++t) {
    const auto i = static_cast<std::size_t>(t);
    const Vector U =
        -linalg::solve(spec.R[i], spec.B.transpose() * traj.zeta_bar[i + 1], "R", t);
    const Vector next = spec.A * traj.Z_bar[i] + spec.B * U + spec.C * traj.V_star[i];
    worst = std::max(worst, (next - traj.Z_bar[i + 1]).norm());
  }
  return worst;
}

double closed_loop_mean_error(const GameSpec& spec, const MatrixSeq& K,
                              const VectorSeq& Z_bar, const VectorSeq& V_star) {
  const VectorSeq U = mean_agent_controls(K, Z_bar);
  double worst = 0.0;
  for (std::size_t t = 0; t < U.size(); ++t) {
    const Vector next = spec.A * Z_bar[t] + spec.B * U[t] + spec.C * V_star[t];
    worst = std::max(worst, (next - Z_bar[t + 1]).norm());
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Adversary best response

namespace {

// Mean agent control U_t = -feedback_t Zbar_t + feedforward_t.
AdversaryQuadratic build_adversary_quadratic(const GameSpec& spec,
                                             const MatrixSeq& feedback,
                                             const VectorSeq& feedforward) {
  const int T = spec.T();
  const int z = spec.z();
  const int v = spec.v();
  const int nv = v * T;

  AdversaryQuadratic q;
  q.hessian = Matrix::Zero(nv, nv);
  q.linear = Vector::Zero(nv);

  Vector a = spec.mu_0;
  Matrix Gamma = Matrix::Zero(z, nv);
  for (int t = 0; t < T; ++t) {
    const auto i = static_cast<std::size_t>(t);
    const Vector b = -feedback[i] * a + feedforward[i];
    const Matrix Lambda = -feedback[i] * Gamma;
    const Matrix& Q = spec.Q[i];
    const Matrix& R = spec.R[i];

    q.hessian += 2.0 * (Gamma.transpose() * Q * Gamma +
                        Lambda.transpose() * R * Lambda);
    q.hessian.block(t * v, t * v, v, v) -= 2.0 * spec.S[i];
    q.linear += 2.0 * (Gamma.transpose() * Q * a + Lambda.transpose() * R * b);
    q.constant += a.dot(Q * a) + b.dot(R * b);

    const Vector a_next = spec.A * a + spec.B * b;
    Matrix Gamma_next = spec.A * Gamma + spec.B * Lambda;
    Gamma_next.block(0, t * v, z, v) += spec.C;
    a = a_next;
    Gamma = std::move(Gamma_next);
  }
  const Matrix& QT = spec.Q[static_cast<std::size_t>(T)];
  q.hessian += 2.0 * Gamma.transpose() * QT * Gamma;
  q.linear += 2.0 * Gamma.transpose() * QT * a;
  q.constant += a.dot(QT * a);
  q.hessian = linalg::symmetrize(q.hessian);
  return q;
}

Vector stack(const VectorSeq& seq, int dim) {
  Vector out(dim * static_cast<int>(seq.size()));
  for (std::size_t t = 0; t < seq.size(); ++t) {
    out.segment(static_cast<int>(t) * dim, dim) = seq[t];
  }
  return out;
}

VectorSeq unstack(const Vector& x, int dim) {
  VectorSeq out;
  for (Eigen::Index k = 0; k < x.size() / dim; ++k) {
    out.push_back(x.segment(k * dim, dim));
  }
  return out;
}

}  // namespace

AdversaryQuadratic reduced_adversary_objective(
    const GameSpec& spec, const VectorSeq& frozen_agent_controls) {
  if (static_cast<int>(frozen_agent_controls.size()) != spec.T()) {
    throw Error("reduced_adversary_objective: control sequence length");
  }
  const MatrixSeq no_feedback(static_cast<std::size_t>(spec.T()),
                              Matrix::Zero(spec.u(), spec.z()));
  return build_adversary_quadratic(spec, no_feedback, frozen_agent_controls);
}

AdversaryQuadratic reduced_adversary_objective(const GameSpec& spec,
                                               const MatrixSeq& K,
                                               const VectorSeq& Z_bar,
                                               AgentResponse response) {
  if (response == AgentResponse::kOpenLoop) {
    return reduced_adversary_objective(spec, mean_agent_controls(K, Z_bar));
  }
  const int z = spec.z();
  MatrixSeq feedback;
  VectorSeq feedforward;
  for (std::size_t t = 0; t < K.size(); ++t) {
    feedback.push_back(K[t].leftCols(z) + K[t].middleCols(z, z));
    feedforward.push_back(-K[t].rightCols(z) * Z_bar[t]);
  }
  return build_adversary_quadratic(spec, feedback, feedforward);
}

AdversaryBestResponse best_response_from_quadratic(const AdversaryQuadratic& q,
                                                   const VectorSeq& V_star,
                                                   int adversary_dim) {
  AdversaryBestResponse br;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(q.hessian, Eigen::EigenvaluesOnly);
  br.max_hessian_eigenvalue = eig.eigenvalues().maxCoeff();
  br.concave = br.max_hessian_eigenvalue < 0.0;

  const Vector v_star = stack(V_star, adversary_dim);
  br.stationarity_residual = (q.hessian * v_star + q.linear).norm();
  br.stationarity_tolerance = 1e-8 * (1.0 + v_star.norm());
  if (!br.concave) return br;

  Eigen::LLT<Matrix> llt(-q.hessian);
  const Vector v_br = llt.solve(q.linear);  // -H v = g
  br.V_br = unstack(v_br, adversary_dim);
  br.gap_inf = (v_br - v_star).cwiseAbs().maxCoeff();
  br.objective_gain = q.value(v_br) - q.value(v_star);
  br.adversary_cost_difference = -br.objective_gain;
  return br;
}

AdversaryBestResponse adversary_best_response(const GameSpec& spec,
                                              const MatrixSeq& K,
                                              const VectorSeq& Z_bar,
                                              const VectorSeq& V_star,
                                              AgentResponse response) {
  AdversaryBestResponse br = best_response_from_quadratic(
      reduced_adversary_objective(spec, K, Z_bar, response), V_star, spec.v());
  br.response = response;
  return br;
}

// ---------------------------------------------------------------------------
// Agent exploitability

MatrixSeq batch_lqr_gains(const AugmentedSystem& aug, const MatrixSeq& R) {
  const int T = static_cast<int>(aug.A_aug.size());
  const int n = static_cast<int>(aug.B_aug.rows());
  const int u = static_cast<int>(aug.B_aug.cols());
  MatrixSeq gains(static_cast<std::size_t>(T));

  for (int t0 = 0; t0 < T; ++t0) {
    const int h = T - t0;
    // X_{t0+k} = Sx_k X_{t0} + Su_k U, for k = 0..h.
    std::vector<Matrix> Sx(static_cast<std::size_t>(h + 1));
    std::vector<Matrix> Su(static_cast<std::size_t>(h + 1));
    Sx[0] = Matrix::Identity(n, n);
    Su[0] = Matrix::Zero(n, u * h);
    for (int k = 0; k < h; ++k) {
      const Matrix& A = aug.A_aug[static_cast<std::size_t>(t0 + k)];
      const auto kk = static_cast<std::size_t>(k);
      Sx[kk + 1] = A * Sx[kk];
      Su[kk + 1] = A * Su[kk];
      Su[kk + 1].block(0, k * u, n, u) += aug.B_aug;
    }
    Matrix H = Matrix::Zero(u * h, u * h);
    Matrix F = Matrix::Zero(u * h, n);
    for (int k = 0; k <= h; ++k) {
      const auto kk = static_cast<std::size_t>(k);
      const Matrix& W = aug.Q_aug[static_cast<std::size_t>(t0 + k)];
      H += Su[kk].transpose() * W * Su[kk];
      F += Su[kk].transpose() * W * Sx[kk];
      if (k < h) {
        H.block(k * u, k * u, u, u) += R[static_cast<std::size_t>(t0 + k)];
      }
    }
    Eigen::LDLT<Matrix> ldlt(linalg::symmetrize(H));
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
      throw NumericalError("batch LQR Hessian", t0, "not positive definite");
    }
    const Matrix all = ldlt.solve(F);
    gains[static_cast<std::size_t>(t0)] = all.topRows(u);
  }
  return gains;
}

namespace {

struct Rollout {
  Vector Z0;
  VectorSeq W;
  VectorSeq Y;
};

struct Deviation {
  MatrixSeq K;
  VectorSeq offset;
};

double rollout_cost(const GameSpec& spec, const VectorSeq& Z_bar,
                    const VectorSeq& V_star, const Rollout& env,
                    const Deviation& policy) {
  const int z = spec.z();
  Vector Z = env.Z0;
  Vector X(3 * z);
  double J = 0.0;
  for (int t = 0; t < spec.T(); ++t) {
    const auto i = static_cast<std::size_t>(t);
    X << Z, env.Y[i], Z_bar[i];
    const Vector U = -policy.K[i] * X + policy.offset[i];
    const Vector dl = Z - env.Y[i];
    const Vector dg = Z - Z_bar[i];
    J += Z.dot(spec.Q[i] * Z) + dl.dot(spec.Qtilde[i] * dl) +
         dg.dot(spec.Qbar[i] * dg) + U.dot(spec.R[i] * U) -
         V_star[i].dot(spec.S[i] * V_star[i]);
    Z = spec.A * Z + spec.B * U + spec.C * V_star[i] + env.W[i];
  }
  const auto n = static_cast<std::size_t>(spec.T());
  const Vector dl = Z - env.Y[n];
  const Vector dg = Z - Z_bar[n];
  J += Z.dot(spec.Q[n] * Z) + dl.dot(spec.Qtilde[n] * dl) +
       dg.dot(spec.Qbar[n] * dg);
  return J;
}

Matrix scaled_gaussian(Engine& engine, Eigen::Index rows, Eigen::Index cols,
                       double target_norm) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix G(rows, cols);
  for (Eigen::Index k = 0; k < G.size(); ++k) G.data()[k] = normal(engine);
  const double norm = G.norm();
  return norm > 0.0 ? Matrix(G * (target_norm / norm)) : G;
}

}  // namespace

AgentExploitability agent_exploitability(
    const GameSpec& spec, const Equilibrium& reference,
    const MatrixSeq& candidate_K, const AgentExploitabilityOptions& options) {
  const int T = spec.T();
  const auto steps = static_cast<std::size_t>(T);
  const auto& traj = reference.trajectories;
  if (candidate_K.size() != steps) {
    throw Error("agent_exploitability: candidate gains cover the wrong horizon");
  }

  AgentExploitability out;
  out.deviation_class =
      "linear feedback perturbations K + D_t with ||D_t||_F = r ||K_t||_F, and "
      "constant feedforward offsets c_t with ||c_t|| = r max(||U*_t||, 1); "
      "r = " + std::to_string(options.relative_size);

  const MatrixSeq batch =
      batch_lqr_gains(reference.solution.augmented, spec.R);
  for (std::size_t t = 0; t < steps; ++t) {
    const double scale = std::max(batch[t].norm(), 1.0);
    out.gain_deviation =
        std::max(out.gain_deviation, (candidate_K[t] - batch[t]).norm() / scale);
  }
  out.gains_agree = out.gain_deviation <= out.gain_tolerance;

  // Candidate policy and its deviations.
  const VectorSeq mean_controls = mean_agent_controls(candidate_K, traj.Z_bar);
  const VectorSeq no_offset(steps, Vector::Zero(spec.u()));
  std::vector<Deviation> policies;
  policies.push_back({candidate_K, no_offset});
  for (int p = 0; p < options.n_perturbations; ++p) {
    Engine engine = make_engine(options.seed, StreamDomain::kPerturbations,
                                static_cast<std::uint64_t>(p));
    Deviation d{candidate_K, no_offset};
    for (std::size_t t = 0; t < steps; ++t) {
      if (p % 2 == 0) {
        const double size =
            options.relative_size * std::max(candidate_K[t].norm(), 1e-12);
        d.K[t] += scaled_gaussian(engine, candidate_K[t].rows(),
                                  candidate_K[t].cols(), size);
      } else {
        const double size =
            options.relative_size * std::max(mean_controls[t].norm(), 1.0);
        d.offset[t] = scaled_gaussian(engine, spec.u(), 1, size);
      }
    }
    policies.push_back(std::move(d));
  }

  // Common random numbers: every policy sees the same rollouts.
  const LocalMFSampler local(spec, reference.solution.local, traj.local_drift);
  const GaussianSampler initial(spec.Sigma_0);
  const GaussianSampler process(spec.Sigma_w);
  const auto reps = static_cast<std::size_t>(std::max(options.n_replications, 2));
  const std::size_t P = policies.size();
  Matrix costs(static_cast<Eigen::Index>(reps), static_cast<Eigen::Index>(P));

  parallel_for(reps, options.threads, [&](std::size_t begin, std::size_t end) {
    Rollout env;
    for (std::size_t r = begin; r < end; ++r) {
      Engine engine = make_engine(options.seed, StreamDomain::kRollouts, r);
      env.Z0 = spec.mu_0 + initial.draw(engine);
      env.W.resize(steps);
      for (std::size_t t = 0; t < steps; ++t) env.W[t] = process.draw(engine);
      local.sample_into(engine, env.Y);
      for (std::size_t p = 0; p < P; ++p) {
        costs(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(p)) =
            rollout_cost(spec, traj.Z_bar, traj.V_star, env, policies[p]);
      }
    }
  });

  const Vector base = costs.col(0);
  const double n = static_cast<double>(reps);
  out.control_gap = (costs.col(0) - base).mean();
  out.agent_gap = std::numeric_limits<double>::infinity();
  out.worst_z_score = std::numeric_limits<double>::infinity();
  out.statistical_pass = true;
  for (std::size_t p = 1; p < P; ++p) {
    const Vector diff = costs.col(static_cast<Eigen::Index>(p)) - base;
    const double mean = diff.mean();
    const double var = (diff.array() - mean).square().sum() / (n - 1.0);
    const double se = std::sqrt(var / n);
    out.perturbations.push_back({(p - 1) % 2 == 0 ? "gain" : "offset", mean, se});
    if (mean < -3.0 * se) out.statistical_pass = false;
    if (mean < out.agent_gap) {
      out.agent_gap = mean;
      out.agent_gap_std_error = se;
    }
    if (se > 0.0) out.worst_z_score = std::min(out.worst_z_score, mean / se);
  }
  if (out.perturbations.empty()) {
    out.agent_gap = 0.0;
    out.worst_z_score = 0.0;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Consistency

double median(std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 == 1 ? values[mid]
                                : 0.5 * (values[mid - 1] + values[mid]);
}

RunConsistency run_consistency(const VectorSeq& Z_bar, const PopulationRun& run) {
  if (Z_bar.size() != run.Zbar_emp.size()) {
    throw Error("run_consistency: horizon mismatch");
  }
  RunConsistency rc;
  rc.seed = run.seed;
  rc.N = run.N;
  for (std::size_t t = 0; t < Z_bar.size(); ++t) {
    rc.raw_error = std::max(rc.raw_error, (run.Zbar_emp[t] - Z_bar[t]).norm());
    const Matrix centered = run.Z[t].colwise() - run.Zbar_emp[t];
    const double denom = std::max(run.N - 1, 1);
    rc.cross_sectional_std = std::max(
        rc.cross_sectional_std, std::sqrt(centered.squaredNorm() / denom));
    const Vector hoods = pairwise_mean(run.Y_emp[t]);
    rc.neighborhood_average_error = std::max(
        rc.neighborhood_average_error, (hoods - run.Zbar_emp[t]).norm());
  }
  rc.normalized_error = std::sqrt(static_cast<double>(run.N)) * rc.raw_error;
  return rc;
}

double consistency_roundoff_floor(const VectorSeq& Z_bar) {
  double scale = 0.0;
  for (const auto& z : Z_bar) scale = std::max(scale, z.norm());
  return 1e-12 * (1.0 + scale);
}

double ConsistencyReport::bound(int N) const {
  return bound_factor * median_cross_sectional_std +
         std::sqrt(static_cast<double>(N)) * roundoff_floor;
}

namespace {

ConsistencyReport summarize(std::vector<RunConsistency> runs, double floor) {
  ConsistencyReport rep;
  rep.roundoff_floor = floor;
  std::vector<double> raw, normalized, spread;
  for (const auto& r : runs) {
    raw.push_back(r.raw_error);
    normalized.push_back(r.normalized_error);
    spread.push_back(r.cross_sectional_std);
  }
  rep.runs = std::move(runs);
  if (raw.empty()) return rep;
  rep.median_raw_error = median(raw);
  rep.max_raw_error = *std::max_element(raw.begin(), raw.end());
  rep.median_normalized_error = median(normalized);
  rep.max_normalized_error =
      *std::max_element(normalized.begin(), normalized.end());
  rep.median_cross_sectional_std = median(spread);
  const int N = rep.runs.front().N;
  rep.pass = rep.median_normalized_error <= rep.bound(N);
  return rep;
}

}  // namespace

ConsistencyReport check_consistency(const VectorSeq& Z_bar,
                                    std::span<const PopulationRun> runs) {
  std::vector<RunConsistency> per_run;
  for (const auto& run : runs) per_run.push_back(run_consistency(Z_bar, run));
  return summarize(std::move(per_run), consistency_roundoff_floor(Z_bar));
}

ConsistencyStudy consistency_study(const GameSpec& spec,
                                   const PopulationPolicy& policy,
                                   std::span<const int> population_sizes,
                                   std::span<const std::uint64_t> seeds,
                                   int threads) {
  ConsistencyStudy study;
  study.population_sizes.assign(population_sizes.begin(), population_sizes.end());
  PopulationOptions options;
  options.threads = threads;
  for (int N : population_sizes) {
    std::vector<RunConsistency> per_run;
    for (std::uint64_t seed : seeds) {
      const PopulationRun run = run_population(spec, policy, N, seed, options);
      per_run.push_back(run_consistency(policy.Z_bar, run));
    }
    study.reports.push_back(summarize(std::move(per_run),
                                      consistency_roundoff_floor(policy.Z_bar)));
  }
  study.raw_error_decreasing = true;
  for (std::size_t k = 1; k < study.reports.size(); ++k) {
    const auto& prev = study.reports[k - 1];
    const auto& cur = study.reports[k];
    const bool both_roundoff = prev.median_raw_error <= prev.roundoff_floor &&
                               cur.median_raw_error <= cur.roundoff_floor;
    if (!(cur.median_raw_error < prev.median_raw_error) && !both_roundoff) {
      study.raw_error_decreasing = false;
    }
  }
  study.pass = study.raw_error_decreasing;
  for (const auto& r : study.reports) study.pass = study.pass && r.pass;
  return study;
}

namespace {

std::string population_label(int N) { return "[N=" + std::to_string(N) + "]"; }

}  // namespace

VerificationReport verify_equilibrium(const GameSpec& spec, const Equilibrium& eq,
                                      const VerificationOptions& options) {
  check_equilibrium_shapes(spec, eq);
  VerificationReport report;
  const auto& traj = eq.trajectories;
  const MatrixSeq& K = eq.solution.agent.K;

  if (options.tpbvp) {
    report.tpbvp = tpbvp_oracle(spec, traj);
    report.verdicts.push_back({"tpbvp", report.tpbvp->error <= kTpbvpTolerance,
                               report.tpbvp->error, kTpbvpTolerance,
                               "max deviation from the direct stacked solve"});
  }

  if (options.adversary) {
    report.adversary = adversary_best_response(spec, K, traj.Z_bar, traj.V_star,
                                               AgentResponse::kOpenLoop);
    report.adversary_feedback = adversary_best_response(
        spec, K, traj.Z_bar, traj.V_star, AgentResponse::kFeedback);
    const auto& br = *report.adversary;
    report.verdicts.push_back(
        {"adversary.concavity", br.concave, br.max_hessian_eigenvalue, 0.0,
         br.concave ? "reduced Hessian negative definite"
                    : "reduced Hessian indefinite: validity condition violated"});
    report.verdicts.push_back(
        {"adversary.best_response", br.concave && br.gap_inf <= kAdversaryGapTolerance,
         br.concave ? br.gap_inf : std::numeric_limits<double>::infinity(),
         kAdversaryGapTolerance, "max-norm distance of V_br from V*"});
    report.verdicts.push_back(
        {"adversary.stationarity",
         br.stationarity_residual <= br.stationarity_tolerance,
         br.stationarity_residual, br.stationarity_tolerance,
         "gradient norm of the reduced objective at V*"});
  }

  if (options.agent) {
    AgentExploitabilityOptions ao = options.agent_options;
    ao.threads = options.threads;
    report.agent = agent_exploitability(spec, eq, K, ao);
    const auto& a = *report.agent;
    report.verdicts.push_back({"agent.gain_agreement", a.gains_agree,
                               a.gain_deviation, a.gain_tolerance,
                               "relative deviation from batch LQR gains"});
    report.verdicts.push_back({"agent.exploitability", a.statistical_pass,
                               a.worst_z_score, -3.0,
                               "min over perturbations of mean gap / std error; " +
                                   a.deviation_class});
  }

  if (options.consistency) {
    const PopulationPolicy policy = make_population_policy(spec, eq);
    report.consistency = consistency_study(spec, policy, options.population_sizes,
                                           options.seeds, options.threads);
    const auto& study = *report.consistency;
    for (std::size_t k = 0; k < study.reports.size(); ++k) {
      const auto& r = study.reports[k];
      report.verdicts.push_back(
          {"consistency.clt_bound" + population_label(study.population_sizes[k]),
           r.pass, r.median_normalized_error,
           r.bound(study.population_sizes[k]),
           "median sqrt(N) max_t |Zbar_emp - Zbar*| against 4 x median "
           "cross-sectional std (plus round-off floor)"});
    }
    if (study.reports.size() > 1) {
      report.verdicts.push_back(
          {"consistency.raw_error_decreasing", study.raw_error_decreasing,
           study.reports.back().median_raw_error,
           study.reports.front().median_raw_error,
           "median raw error strictly decreasing in N"});
    }
  }
  return report;
}

bool VerificationReport::pass() const noexcept {
  return std::all_of(verdicts.begin(), verdicts.end(),
                     [](const Verdict& v) { return v.pass; });
}

}  // namespace amfg
