#include "harmform/kernels.hpp"

#include <cstdlib>

namespace harmform::kernels {

namespace {

using RowMajorXd =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

bool initial_parallel() {
  const char* env = std::getenv("HARMFORM_SERIAL");
  return !(env && env[0] == '1');
}

bool g_parallel = initial_parallel();

// One row of the stacked Lie-derivative matrix: the action of rho on the
// tuple with global rank `row`.  The replaced index stays in its slot, so the
// sorting sign is (-1)^pos times the front-insertion sign.
void lie_derivative_row(const Combinadic& cmb, int row,
                        const Eigen::MatrixXd& rho,
                        const std::vector<int>& col_local, double* out) {
  const int k = cmb.k();
  const std::vector<int>& tup = cmb.tuple(row);
  int merged[8];
  int rest[8];
  for (int pos = 0; pos < k; ++pos) {
    int at = 0;
    for (int i = 0; i < k; ++i)
      if (i != pos) rest[at++] = tup[i];
    const double pos_sign = (pos % 2 == 0) ? 1.0 : -1.0;
    for (int r = 0; r < rho.rows(); ++r) {
      double coef = rho(r, tup[pos]);
      if (coef == 0.0) continue;
      int sign = insert_sign(r, rest, k - 1, merged);
      if (sign == 0) continue;
      int col = col_local[cmb.rank(merged)];
      if (col >= 0) out[col] += pos_sign * sign * coef;
    }
  }
}

double differential_entry(const Combinadic& from, const Eigen::MatrixXd& pair_p,
                          const std::vector<int>& pair_index,
                          const Eigen::MatrixXd& forms, int form_col,
                          const std::vector<int>& tup) {
  const int kk = static_cast<int>(tup.size());  // k+1
  const int m = static_cast<int>(pair_p.rows());
  int rest[8];
  int merged[8];
  double acc = 0.0;
  for (int a = 0; a < kk; ++a)
    for (int b = a + 1; b < kk; ++b) {
      double outer = ((a + b) % 2 == 0) ? 1.0 : -1.0;  // (-1)^{(a+1)+(b+1)}
      int at = 0;
      for (int i = 0; i < kk; ++i)
        if (i != a && i != b) rest[at++] = tup[i];
      const int pr = pair_index[tup[a] * m + tup[b]];
      for (int r = 0; r < m; ++r) {
        double coef = pair_p(r, pr);
        if (coef == 0.0) continue;
        int sign = insert_sign(r, rest, kk - 2, merged);
        if (sign == 0) continue;
        acc += outer * coef * sign * forms(from.rank(merged), form_col);
      }
    }
  return acc;
}

}  // namespace

bool use_parallel() { return g_parallel; }
void set_parallel(bool on) { g_parallel = on; }

namespace serial {

Eigen::MatrixXd lie_derivative_stack(const Combinadic& cmb,
                                     const std::vector<int>& rows,
                                     const std::vector<Eigen::MatrixXd>& rho) {
  const int n = static_cast<int>(rows.size());
  const int ops = static_cast<int>(rho.size());
  std::vector<int> col_local(cmb.count(), -1);
  for (int i = 0; i < n; ++i) col_local[rows[i]] = i;
  RowMajorXd out = RowMajorXd::Zero(ops * n, n);
  for (int a = 0; a < ops; ++a)
    for (int i = 0; i < n; ++i)
      lie_derivative_row(cmb, rows[i], rho[a], col_local,
                         out.row(a * n + i).data());
  return out;
}

Eigen::MatrixXd differential_batch(const Combinadic& from, const Combinadic& to,
                                   const Eigen::MatrixXd& pair_p,
                                   const std::vector<int>& pair_index,
                                   const Eigen::MatrixXd& forms) {
  Eigen::MatrixXd out(to.count(), forms.cols());
  for (int c = 0; c < forms.cols(); ++c)
    for (int j = 0; j < to.count(); ++j)
      out(j, c) =
          differential_entry(from, pair_p, pair_index, forms, c, to.tuple(j));
  return out;
}

Eigen::VectorXd tuple_weights(const Combinadic& cmb, const Eigen::VectorXd& w) {
  double kfact = 1.0;
  for (int i = 2; i <= cmb.k(); ++i) kfact *= i;
  Eigen::VectorXd out(cmb.count());
  for (int r = 0; r < cmb.count(); ++r) {
    double denom = 1.0;
    for (int v : cmb.tuple(r)) denom *= w(v);
    out(r) = kfact / denom;
  }
  return out;
}

}  // namespace serial

Eigen::MatrixXd lie_derivative_stack(const Combinadic& cmb,
                                     const std::vector<int>& rows,
                                     const std::vector<Eigen::MatrixXd>& rho) {
  if (!g_parallel) return serial::lie_derivative_stack(cmb, rows, rho);
  const int n = static_cast<int>(rows.size());
  const int ops = static_cast<int>(rho.size());
  std::vector<int> col_local(cmb.count(), -1);
  for (int i = 0; i < n; ++i) col_local[rows[i]] = i;
  RowMajorXd out = RowMajorXd::Zero(ops * n, n);
#pragma omp parallel for schedule(static) collapse(2)
  for (int a = 0; a < ops; ++a)
    for (int i = 0; i < n; ++i)
      lie_derivative_row(cmb, rows[i], rho[a], col_local,
                         out.row(a * n + i).data());
  return out;
}

Eigen::MatrixXd differential_batch(const Combinadic& from, const Combinadic& to,
                                   const Eigen::MatrixXd& pair_p,
                                   const std::vector<int>& pair_index,
                                   const Eigen::MatrixXd& forms) {
  if (!g_parallel)
    return serial::differential_batch(from, to, pair_p, pair_index, forms);
  Eigen::MatrixXd out(to.count(), forms.cols());
#pragma omp parallel for schedule(static)
  for (int j = 0; j < to.count(); ++j)
    for (int c = 0; c < forms.cols(); ++c)
      out(j, c) =
          differential_entry(from, pair_p, pair_index, forms, c, to.tuple(j));
  return out;
}

Eigen::VectorXd tuple_weights(const Combinadic& cmb, const Eigen::VectorXd& w) {
  if (!g_parallel) return serial::tuple_weights(cmb, w);
  double kfact = 1.0;
  for (int i = 2; i <= cmb.k(); ++i) kfact *= i;
  Eigen::VectorXd out(cmb.count());
#pragma omp parallel for schedule(static)
  for (int r = 0; r < cmb.count(); ++r) {
    double denom = 1.0;
    for (int v : cmb.tuple(r)) denom *= w(v);
    out(r) = kfact / denom;
  }
  return out;
}

}  // namespace harmform::kernels
