/**
 * @file linear_solver.hpp
 * @brief Linear solves of the contact saddle-point system.
 *
 * SchurSolver factors the constrained elastic block once (CHOLMOD), precomputes the dense
 * operator W = S + Jmp K^-1 Jmp^T on the traction space and, per partition, factors the
 * dense complement H - G W. The monolithic sparse LU path is kept as a reference.
 */
#pragma once

#include "assembly.hpp"
#include "errors.hpp"
#include "types.hpp"

#include <Eigen/CholmodSupport>
#include <Eigen/SparseLU>

#include <string>

namespace faultsim
{

namespace detail
{

inline double scaled_norm(const VecX &v, Index nu, double row_scale)
{
  return std::sqrt(v.head(nu).squaredNorm() + row_scale * row_scale * v.tail(v.size() - nu).squaredNorm());
}

inline std::string partition_summary(const ContactBlocks &b)
{
  std::size_t stick = 0, open = 0;
  for (std::size_t e = 0; e < b.G.size(); ++e)
  {
    if (b.G[e].isIdentity(0.0))
      ++stick;
    else if (b.G[e].isZero(0.0))
      ++open;
  }
  return std::to_string(stick) + " stick, " + std::to_string(b.G.size() - stick - open) + " slip, " +
         std::to_string(open) + " open";
}

} // namespace detail

class SchurSolver
{
public:
  explicit SchurSolver(const FaultSystem &sys, double ls_tol = 1e-10, int max_refine = 10)
      : sys_(&sys), ls_tol_(ls_tol), max_refine_(max_refine)
  {
    const auto &fixed = sys.constraints().fixed;
    const Index nu = sys.n_u(), nt = sys.n_t();

    std::vector<Triplet> trip;
    trip.reserve(sys.K().nonZeros());
    for (int col = 0; col < sys.K().outerSize(); ++col)
      for (SpMat::InnerIterator it(sys.K(), col); it; ++it)
        if (!fixed[it.row()] && !fixed[it.col()])
          trip.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
    for (Index i = 0; i < nu; ++i)
      if (fixed[i])
        trip.emplace_back(static_cast<int>(i), static_cast<int>(i), 1.0);
    Kbc_.resize(nu, nu);
    Kbc_.setFromTriplets(trip.begin(), trip.end());

    trip.clear();
    for (int col = 0; col < sys.Jmp().outerSize(); ++col)
      if (!fixed[col])
        for (SpMat::InnerIterator it(sys.Jmp(), col); it; ++it)
          trip.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
    Bbc_.resize(nt, nu);
    Bbc_.setFromTriplets(trip.begin(), trip.end());
    BbcT_ = Bbc_.transpose();

    chol_.compute(Kbc_);
    if (chol_.info() != Eigen::Success)
      throw SolverError("elastic block is not positive definite (insufficient boundary conditions?)");

    W_ = MatX(sys.S());
    constexpr Index block = 64;
    for (Index c0 = 0; c0 < nt; c0 += block)
    {
      const Index b = std::min(block, nt - c0);
      const MatX rhs = MatX(BbcT_.middleCols(c0, b));
      const MatX X = chol_.solve(rhs);
      W_.middleCols(c0, b) += Bbc_ * X;
    }
  }

  const MatX &W() const { return W_; }

  struct Factorization
  {
    ContactBlocks blocks;
    Eigen::PartialPivLU<MatX> lu;
  };

  Factorization factorize(const ContactBlocks &blocks) const
  {
    const Index nf = sys_->n_f(), nt = sys_->n_t();
    MatX Sc(nt, nt);
    for (Index e = 0; e < nf; ++e)
    {
      Sc.middleRows(3 * e, 3).noalias() = -blocks.G[e] * W_.middleRows(3 * e, 3);
      Sc.block(3 * e, 3 * e, 3, 3) += blocks.H[e];
    }
    Factorization f{blocks, Eigen::PartialPivLU<MatX>()};
    if (nt > 0)
    {
      f.lu.compute(Sc);
      const double rc = f.lu.rcond();
      if (!(rc > 1e-15))
        throw SolverError("singular contact system (rcond " + std::to_string(rc) + ", partition: " +
                          detail::partition_summary(blocks) + ")");
    }
    return f;
  }

  /// Solves J dx = -r for the partition encoded in `f`.
  VecX solve(const Factorization &f, const VecX &r) const
  {
    const Index nu = sys_->n_u(), nt = sys_->n_t();
    const auto &fixed = sys_->constraints().fixed;
    // Eliminate prescribed increments dx_i = -r_i.
    VecX known = VecX::Zero(nu);
    for (Index i = 0; i < nu; ++i)
      if (fixed[i])
        known(i) = -r(i);
    VecX rhs(nu + nt);
    rhs.head(nu) = -r.head(nu) - sys_->K() * known;
    rhs.tail(nt) = -r.tail(nt) - apply_G(f.blocks, sys_->Jmp() * known);
    for (Index i = 0; i < nu; ++i)
      if (fixed[i])
        rhs(i) = known(i);

    const double scale = sys_->row_scale();
    const double rhs_norm = detail::scaled_norm(rhs, nu, scale);
    VecX dx = raw_solve(f, rhs);
    if (rhs_norm == 0.0)
      return dx;
    double rel = 0.0;
    for (int it = 0; it <= max_refine_; ++it)
    {
      const VecX res = rhs - apply(f.blocks, dx);
      rel = detail::scaled_norm(res, nu, scale) / rhs_norm;
      if (rel <= ls_tol_ * 1e-3 || (rel <= ls_tol_ && it >= 2))
        return dx;
      dx += raw_solve(f, res);
    }
    if (rel <= ls_tol_)
      return dx;
    throw SolverError("linear solve did not reach the residual tolerance (relative residual " +
                      std::to_string(rel) + ", partition: " + detail::partition_summary(f.blocks) + ")");
  }

  /// Product with the constraint-eliminated Jacobian.
  VecX apply(const ContactBlocks &blocks, const VecX &dx) const
  {
    const Index nu = sys_->n_u(), nt = sys_->n_t();
    VecX y(nu + nt);
    const VecX du = dx.head(nu), dt = dx.tail(nt);
    y.head(nu) = Kbc_ * du + BbcT_ * dt;
    const VecX jump = Bbc_ * du - sys_->S() * dt;
    y.tail(nt) = apply_G(blocks, jump);
    for (std::size_t e = 0; e < blocks.H.size(); ++e)
      y.segment<3>(nu + 3 * e) += blocks.H[e] * dt.segment<3>(3 * e);
    return y;
  }

private:
  static VecX apply_G(const ContactBlocks &b, const VecX &v)
  {
    VecX y(v.size());
    for (std::size_t e = 0; e < b.G.size(); ++e)
      y.segment<3>(3 * e) = b.G[e] * v.segment<3>(3 * e);
    return y;
  }

  // One pass of block elimination for [[Kbc, Bbc^T], [G Bbc, H - G S]] x = rhs.
  VecX raw_solve(const Factorization &f, const VecX &rhs) const
  {
    const Index nu = sys_->n_u(), nt = sys_->n_t();
    const VecX y = chol_.solve(rhs.head(nu));
    VecX x(nu + nt);
    if (nt == 0)
    {
      x = y;
      return x;
    }
    const VecX rt = rhs.tail(nt) - apply_G(f.blocks, Bbc_ * y);
    const VecX dt = f.lu.solve(rt);
    x.head(nu) = y - chol_.solve(BbcT_ * dt);
    x.tail(nt) = dt;
    return x;
  }

  const FaultSystem *sys_;
  double ls_tol_;
  int max_refine_;
  SpMat Kbc_, Bbc_, BbcT_;
  Eigen::CholmodSupernodalLLT<SpMat, Eigen::Lower> chol_;
  MatX W_;
};

/// Reference path: sparse LU on the assembled, constraint-eliminated system.
inline VecX solve_reference(const LinearSystem &sys, double ls_tol = 1e-10)
{
  Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(sys.J);
  if (lu.info() != Eigen::Success)
    throw SolverError("sparse LU failed: " + lu.lastErrorMessage());
  VecX dx = lu.solve(-sys.r);
  const double nr = sys.r.norm();
  for (int it = 0; it < 5 && nr > 0.0; ++it)
  {
    const VecX res = -sys.r - sys.J * dx;
    if (res.norm() <= ls_tol * 1e-3 * nr)
      break;
    dx += lu.solve(res);
  }
  if (nr > 0.0 && (sys.J * dx + sys.r).norm() > ls_tol * nr)
    throw SolverError("sparse LU solve did not reach the residual tolerance");
  return dx;
}

} // namespace faultsim
