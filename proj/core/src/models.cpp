#include "scatterfm/models.hpp"

#include "scatterfm/errors.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <random>
#include <sstream>

namespace sfm {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void check_length(std::size_t got, int n, const char* name) {
  if (static_cast<int>(got) != n) {
    std::ostringstream os;
    os << name << " has " << got << " samples but the mesh has " << n << " nodes";
    throw InvalidInput(os.str());
  }
}

Eigen::MatrixXcd op(const BoundaryMesh& mesh, const WaveContext& ctx, OperatorKind kind) {
  return assemble_boundary_operator(mesh, ctx, kind).entries;
}

Eigen::MatrixXcd principal(const Eigen::MatrixXcd& m, const std::vector<int>& idx) {
  const int s = static_cast<int>(idx.size());
  Eigen::MatrixXcd out(s, s);
  for (int i = 0; i < s; ++i) {
    for (int j = 0; j < s; ++j) out(i, j) = m(idx[i], idx[j]);
  }
  return out;
}

Eigen::VectorXd singular_values(const Eigen::MatrixXcd& m) {
  return Eigen::BDCSVD<Eigen::MatrixXcd>(m).singularValues();
}

}  // namespace

LocalBC robin_split(double b, int n) {
  if (b == 0.0) throw InvalidInput("Robin split needs b != 0");
  LocalBC bc;
  bc.b11.assign(n, 1.0 / (2.0 * b));
  bc.b12.assign(n, cdouble(0.0, 0.0));
  bc.b22.assign(n, -0.5 * b);
  return bc;
}

std::string family_name(const BoundaryFamily& family) {
  return std::visit(Overloaded{
                        [](const DirichletBC&) { return std::string("dirichlet"); },
                        [](const NeumannBC&) { return std::string("neumann"); },
                        [](const AlphaBC&) { return std::string("alpha"); },
                        [](const ThetaBC&) { return std::string("theta"); },
                        [](const LocalBC&) { return std::string("local_b"); },
                    },
                    family);
}

void validate(const BoundaryConditionSpec& bc, const BoundaryMesh& mesh) {
  const int n = mesh.size();
  if (bc.on_screen && (!mesh.screen_mask || mesh.screen_indices().empty())) {
    throw InvalidInput("screen model requested but the mesh carries no screen mask");
  }
  std::visit(Overloaded{
                 [](const DirichletBC&) {},
                 [](const NeumannBC&) {},
                 [&](const AlphaBC& a) {
                   check_length(a.alpha.size(), n, "alpha");
                   bool pos = false;
                   bool neg = false;
                   for (double v : a.alpha) {
                     if (v == 0.0 || !std::isfinite(v)) throw InvalidInput("alpha must be finite and nonzero");
                     (v > 0.0 ? pos : neg) = true;
                   }
                   if (pos && neg) throw InvalidInput("alpha must have constant sign on the boundary");
                 },
                 [&](const ThetaBC& t) {
                   check_length(t.theta.size(), n, "theta");
                   for (double v : t.theta) {
                     if (!std::isfinite(v)) throw InvalidInput("theta must be finite");
                   }
                 },
                 [&](const LocalBC& b) {
                   check_length(b.b11.size(), n, "b11");
                   check_length(b.b12.size(), n, "b12");
                   check_length(b.b22.size(), n, "b22");
                   for (double v : b.b11) {
                     if (!(v < 0.0)) throw InvalidInput("b11 must be strictly negative");
                   }
                 },
             },
             bc.family);
}

ModelOperator assemble_M(const BoundaryMesh& mesh, const WaveContext& ctx, const BoundaryConditionSpec& bc) {
  validate(bc, mesh);
  const int n = mesh.size();
  ModelOperator model;
  model.full_size = n;
  model.M.mesh_id = mesh.id;
  model.M.kind = OperatorKind::composite;

  std::visit(Overloaded{
                 [&](const DirichletBC&) {
                   model.M.entries = -op(mesh, ctx, OperatorKind::V);
                   model.trace_tag = TraceTag::D;
                 },
                 [&](const NeumannBC&) {
                   model.M.entries = -op(mesh, ctx, OperatorKind::T);
                   model.trace_tag = TraceTag::N;
                 },
                 [&](const AlphaBC& a) {
                   Eigen::MatrixXcd m = op(mesh, ctx, OperatorKind::V);
                   for (int i = 0; i < n; ++i) m(i, i) += 1.0 / a.alpha[i];
                   model.M.entries = -m;
                   model.trace_tag = TraceTag::D;
                 },
                 [&](const ThetaBC& t) {
                   Eigen::MatrixXcd m = -op(mesh, ctx, OperatorKind::T);
                   for (int i = 0; i < n; ++i) m(i, i) += t.theta[i];
                   model.M.entries = m;
                   model.trace_tag = TraceTag::N;
                 },
                 [&](const LocalBC& b) {
                   Eigen::MatrixXcd m(2 * n, 2 * n);
                   m.topLeftCorner(n, n) = op(mesh, ctx, OperatorKind::V);
                   m.topRightCorner(n, n) = op(mesh, ctx, OperatorKind::K);
                   m.bottomLeftCorner(n, n) = op(mesh, ctx, OperatorKind::Kp);
                   m.bottomRightCorner(n, n) = op(mesh, ctx, OperatorKind::T);
                   for (int i = 0; i < n; ++i) {
                     m(i, i) += b.b11[i];
                     m(i, n + i) += b.b12[i];
                     m(n + i, i) += std::conj(b.b12[i]);
                     m(n + i, n + i) += b.b22[i];
                   }
                   model.M.entries = -m;
                   model.trace_tag = TraceTag::DN;
                 },
             },
             bc.family);

  model.M.row_space = model.trace_tag == TraceTag::N ? TraceSpace::neumann_data : TraceSpace::dirichlet_data;
  model.M.col_space = model.M.row_space;

  if (bc.on_screen) {
    std::vector<int> idx = mesh.screen_indices();
    std::vector<int> block_idx = idx;
    if (model.trace_tag == TraceTag::DN) {
      for (int i : idx) block_idx.push_back(n + i);
    }
    model.M.entries = principal(model.M.entries, block_idx);
    model.screen_indices = std::move(idx);
  }
  return model;
}

LambdaSolver::LambdaSolver(const ModelOperator& model, double threshold) {
  const Eigen::MatrixXcd& m = model.M.entries;
  if (m.rows() != m.cols() || m.rows() == 0) throw InvalidInput("model operator must be square and non-empty");
  const Eigen::VectorXd sv = singular_values(m);
  const double smax = sv(0);
  const double smin = sv(sv.size() - 1);
  condition_number_ = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
  if (!(smin > threshold * smax)) {
    std::ostringstream os;
    os << "model operator is numerically singular (condition number " << condition_number_
       << "); the wavenumber is in or near the excluded set, perturb k";
    throw NearSingularModel(condition_number_, os.str());
  }
  lu_.compute(m);

  const int blocks = model.trace_tag == TraceTag::DN ? 2 : 1;
  full_dim_ = blocks * model.full_size;
  if (model.screen_indices) {
    for (int b = 0; b < blocks; ++b) {
      for (int i : *model.screen_indices) full_index_.push_back(b * model.full_size + i);
    }
  } else {
    for (int i = 0; i < full_dim_; ++i) full_index_.push_back(i);
  }
}

Eigen::MatrixXcd LambdaSolver::solve(const Eigen::MatrixXcd& rhs) const {
  if (rhs.rows() != lu_.rows()) throw InvalidInput("right-hand side size does not match the model operator");
  return lu_.solve(rhs);
}

Eigen::MatrixXcd LambdaSolver::extend(const Eigen::MatrixXcd& values) const {
  if (values.rows() != static_cast<Eigen::Index>(full_index_.size()))
    throw InvalidInput("vector size does not match the model operator");
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(full_dim_, values.cols());
  for (std::size_t i = 0; i < full_index_.size(); ++i) out.row(full_index_[i]) = values.row(i);
  return out;
}

Eigen::VectorXcd apply_lambda(const ModelOperator& model, const Eigen::VectorXcd& rhs, bool zero_extend) {
  const LambdaSolver solver(model);
  Eigen::VectorXcd x = solver.solve(rhs);
  if (zero_extend) return solver.extend(x);
  return x;
}

CoercivityReport coercivity_report(const ModelOperator& model, int n_probes, std::uint64_t seed) {
  const Eigen::MatrixXcd& m = model.M.entries;
  const Eigen::VectorXd sv = singular_values(m);
  CoercivityReport rep;
  rep.sigma_max = sv(0);
  rep.sigma_min = sv(sv.size() - 1);
  rep.im_quadratic_form_min = std::numeric_limits<double>::infinity();
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal;
  for (int p = 0; p < n_probes; ++p) {
    Eigen::VectorXcd phi(m.rows());
    for (Eigen::Index i = 0; i < phi.size(); ++i) phi[i] = cdouble(normal(gen), normal(gen));
    phi.normalize();
    const double im = std::abs(phi.dot(m * phi).imag());
    rep.im_quadratic_form_min = std::min(rep.im_quadratic_form_min, im);
  }
  return rep;
}

}  // namespace sfm
