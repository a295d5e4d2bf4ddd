#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "gltr/c_api.h"
#include "gltr/dense_backend.hpp"
#include "support.hpp"

using namespace gltr::testing;

namespace {

struct Handle {
  gltr_solver* s = gltr_create();
  ~Handle() { gltr_destroy(s); }
};

struct Loop {
  Vec x;
  double lambda = 0.0;
  int outcome = GLTR_OUTCOME_NONE;
  std::vector<double> alphas;
};

/// Serves every action with dense data through the C surface, M = I.
Loop drive(const Mat& h, const Vec& g0, double radius, const gltr_config& cfg) {
  Handle handle;
  const auto n = g0.size();
  Vec g = g0, g_prev = Vec::Zero(n), v = Vec::Zero(n), p = Vec::Zero(n), hp = Vec::Zero(n);
  Vec x = Vec::Zero(n);
  std::vector<Vec> basis;
  Loop out;
  gltr_action a{};
  EXPECT_EQ(gltr_init(handle.s, &cfg, radius, &a), GLTR_OK);
  while (a.kind != GLTR_DONE) {
    if (a.has_store_basis) basis.push_back(a.store_basis * v);
    double reply = 0.0;
    bool replies = true;
    switch (a.kind) {
      case GLTR_INIT_PRECOND:
        v = g;
        reply = g.dot(v);
        break;
      case GLTR_CG_DIR:
        p = a.beta == 0.0 ? Vec(-v) : Vec(-v + a.beta * p);
        replies = false;
        break;
      case GLTR_HESS_PROD:
        if (a.has_p_from_v) p = a.p_from_v * v;
        hp = h * p;
        reply = p.dot(hp);
        break;
      case GLTR_CG_UPDATE:
        out.alphas.push_back(a.alpha);
        g_prev = g;
        g += a.alpha * hp;
        v = g;
        reply = g.dot(v);
        break;
      case GLTR_LANCZOS_GRAD: {
        Vec w = hp + a.coef_g * g + a.coef_gprev * g_prev;
        g_prev = a.shift_scale * g;
        g = w;
        v = g;
        reply = g.dot(v);
        break;
      }
      case GLTR_RETRANSFORM:
        x.setZero();
        for (std::size_t j = 0; j < a.h_len; ++j) x += a.h[j] * basis[j];
        replies = false;
        break;
      case GLTR_OBJ_VALUE:
        reply = 0.5 * x.dot(h * x) + g0.dot(x);
        break;
      default:
        ADD_FAILURE() << "unexpected action " << a.kind;
        return out;
    }
    const int rc = replies ? gltr_step(handle.s, reply, &a) : gltr_step_noreply(handle.s, &a);
    EXPECT_EQ(rc, GLTR_OK) << gltr_last_error(handle.s);
    if (rc != GLTR_OK) return out;
  }
  out.x = x;
  out.lambda = gltr_lambda(handle.s);
  out.outcome = a.outcome;
  return out;
}

gltr_config tight() {
  gltr_config cfg = gltr_default_config();
  cfg.tol_rel_i = 1e-12;
  cfg.tol_rel_b = 1e-12;
  return cfg;
}

}  // namespace

TEST(CApi, TagsMatchCore) {
  EXPECT_EQ(GLTR_HESS_PROD, static_cast<int>(gltr::ActionKind::hess_prod));
  EXPECT_EQ(GLTR_DONE, static_cast<int>(gltr::ActionKind::done));
  EXPECT_EQ(GLTR_OUTCOME_CONVEXIFIED, static_cast<int>(gltr::Outcome::convexified_resolve));
}

TEST(CApi, IdentitySession) {
  const Vec g = Eigen::Vector3d(0.5, -1.0, 2.0);
  const Loop r = drive(Mat::Identity(3, 3), g, 100.0, tight());
  EXPECT_LE((r.x + g).norm(), 1e-14);
  EXPECT_EQ(r.lambda, 0.0);
}

TEST(CApi, ConversionAlphaInPayload) {
  const Mat h = Vec(Eigen::Vector2d(1.0, 2.0)).asDiagonal();
  const Loop r = drive(h, Eigen::Vector2d(1.0, 1.0), 100.0, tight());
  ASSERT_FALSE(r.alphas.empty());
  EXPECT_NEAR(r.alphas[0], 2.0 / 3.0, 1e-15);
}

TEST(CApi, MatchesDenseBackend) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const Mat h = random_symmetric(20, rng);
    const Vec g = random_vec(20, rng);
    const Loop r = drive(h, g, 0.5, tight());
    gltr::TerminationConfig cfg;
    cfg.tol_rel_i = cfg.tol_rel_b = 1e-12;
    gltr::SolveOptions opts;
    opts.explore_invariant_subspaces = false;
    const auto ref = gltr::solve_gltr(gltr::DenseProblem::from_matrices(h, g, 0.5), cfg, opts);
    EXPECT_EQ(r.outcome, static_cast<int>(ref.outcome));
    EXPECT_LE((r.x - ref.x).norm(), 1e-12 * std::max(1.0, ref.x.norm()));
    EXPECT_EQ(r.lambda, ref.lambda);
  }
}

TEST(CApi, SteppingDoneIsProtocolError) {
  Handle handle;
  gltr_config cfg = gltr_default_config();
  gltr_action a{};
  ASSERT_EQ(gltr_init(handle.s, &cfg, 1.0, &a), GLTR_OK);
  ASSERT_EQ(gltr_step(handle.s, 0.0, &a), GLTR_OK);  // zero gradient: interior at once
  ASSERT_EQ(a.kind, GLTR_RETRANSFORM);
  ASSERT_EQ(gltr_step_noreply(handle.s, &a), GLTR_OK);
  ASSERT_EQ(a.kind, GLTR_DONE);
  EXPECT_EQ(gltr_step(handle.s, 1.0, &a), GLTR_ERR_PROTOCOL);
  EXPECT_STRNE(gltr_last_error(handle.s), "");
}

TEST(CApi, ErrorCodes) {
  Handle handle;
  gltr_config cfg = gltr_default_config();
  gltr_action a{};
  EXPECT_EQ(gltr_init(handle.s, &cfg, -1.0, &a), GLTR_ERR_ARGUMENT);
  EXPECT_EQ(gltr_init(nullptr, &cfg, 1.0, &a), GLTR_ERR_ARGUMENT);
  ASSERT_EQ(gltr_init(handle.s, &cfg, 1.0, &a), GLTR_OK);
  EXPECT_EQ(gltr_step(handle.s, -1.0, &a), GLTR_ERR_PRECONDITIONER);
}

TEST(CApi, ReenterBeforeSolveRejected) {
  Handle handle;
  gltr_action a{};
  EXPECT_EQ(gltr_reenter_radius(handle.s, 1.0, &a), GLTR_ERR_PROTOCOL);
  EXPECT_EQ(gltr_request_new_krylov(handle.s, &a), GLTR_ERR_PROTOCOL);
}
