#include "specreg/operators.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "specreg/error.hpp"
#include "specreg/logreal.hpp"

namespace specreg {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_model_filter(const SpectralModel& model, const FilterFamily& filter) {
  if (filter.has_lambda_limit() && !model.eigenvalues.empty() && model.eigenvalues.front() > filter.lambda_limit())
    throw ParameterOutOfRange("largest eigenvalue exceeds the valid lambda range of " + filter.id());
}

void check_alpha(const FilterFamily& filter, double alpha) {
  if (!(alpha > 0 && alpha < filter.alpha_max())) throw ParameterOutOfRange("alpha outside (0, alpha_max)");
}
}  // namespace

Matrix Matrix::transpose() const {
  Matrix t(cols, rows);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols != b.rows) throw DimensionError("matrix shapes do not match");
  Matrix c(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t k = 0; k < a.cols; ++k) {
      double v = a(i, k);
      if (v == 0.0) continue;
      for (std::size_t j = 0; j < b.cols; ++j) c(i, j) += v * b(k, j);
    }
  return c;
}

double frobenius_norm(const Matrix& a) {
  double s = 0;
  for (double v : a.data) s += v * v;
  return std::sqrt(s);
}

SpectralModel make_model(std::vector<double> ev, Provenance provenance) {
  if (ev.empty()) throw DimensionError("model needs at least one eigenvalue");
  if (ev.size() > kMaxDimension) throw DimensionError("model dimension exceeds 512");
  for (double l : ev)
    if (!(l > 0) || !std::isfinite(l)) throw InputError("eigenvalues must be finite and strictly positive");
  std::sort(ev.begin(), ev.end(), std::greater<>());
  SpectralModel m;
  m.reference_norm_sq = ev.front();
  m.eigenvalues = std::move(ev);
  m.provenance = std::move(provenance);
  return m;
}

SpectralModel make_diagonal_model(const std::string& rule, std::size_t dim) {
  if (dim == 0 || dim > kMaxDimension) throw DimensionError("dimension must be in [1, 512]");
  std::vector<double> ev(dim);
  for (std::size_t j = 1; j <= dim; ++j) {
    double x = static_cast<double>(j);
    if (rule == "j^-2") ev[j - 1] = 1.0 / (x * x);
    else if (rule == "j^-4") ev[j - 1] = 1.0 / (x * x * x * x);
    else if (rule == "exp") ev[j - 1] = std::exp(-x);
    else throw InputError("unknown diagonal rule '" + rule + "' (expected j^-2, j^-4 or exp)");
  }
  return make_model(std::move(ev), {"synthetic-diagonal", rule});
}

SvdResult svd_decompose(const Matrix& a, double tol, const std::string& matrix_id) {
  if (a.rows == 0 || a.cols == 0) throw DimensionError("empty matrix");
  if (a.rows > kMaxDimension || a.cols > kMaxDimension) throw DimensionError("matrix dimension exceeds 512");
  if (!(tol >= 1e-14 && tol <= 1e-8)) throw ParameterOutOfRange("tol must lie in [1e-14, 1e-8]");
  const bool flip = a.rows < a.cols;
  Matrix w = flip ? a.transpose() : a;  // m × n with m >= n
  const std::size_t m = w.rows, n = w.cols;
  Matrix v = Matrix::identity(n);

  int sweep = 0;
  for (bool rotated = true; rotated; ++sweep) {
    if (sweep >= 60) throw ConvergenceFailure("Jacobi SVD did not converge in 60 sweeps");
    rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double al = 0, be = 0, ga = 0;
        for (std::size_t i = 0; i < m; ++i) {
          al += w(i, p) * w(i, p);
          be += w(i, q) * w(i, q);
          ga += w(i, p) * w(i, q);
        }
        if (ga == 0.0 || std::fabs(ga) <= tol * std::sqrt(al * be)) continue;
        rotated = true;
        double zeta = (be - al) / (2 * ga);
        double t = std::copysign(1.0, zeta) / (std::fabs(zeta) + std::sqrt(1 + zeta * zeta));
        double c = 1 / std::sqrt(1 + t * t), s = c * t;
        for (std::size_t i = 0; i < m; ++i) {
          double x = w(i, p), y = w(i, q);
          w(i, p) = c * x - s * y;
          w(i, q) = s * x + c * y;
        }
        for (std::size_t i = 0; i < n; ++i) {
          double x = v(i, p), y = v(i, q);
          v(i, p) = c * x - s * y;
          v(i, q) = s * x + c * y;
        }
      }
    }
  }

  std::vector<double> sig(n);
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0;
    for (std::size_t i = 0; i < m; ++i) s += w(i, j) * w(i, j);
    sig[j] = std::sqrt(s);
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return sig[x] > sig[y]; });

  SvdResult r;
  r.sweeps = sweep;
  Matrix U(m, n), V(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t j = order[k];
    r.sigma.push_back(sig[j]);
    for (std::size_t i = 0; i < m; ++i) U(i, k) = sig[j] > 0 ? w(i, j) / sig[j] : 0.0;
    for (std::size_t i = 0; i < n; ++i) V(i, k) = v(i, j);
  }
  if (flip) {
    r.U = V;
    r.V = U;
  } else {
    r.U = U;
    r.V = V;
  }
  std::vector<double> ev;
  const double cutoff = 1e-14 * r.sigma.front();
  for (double s : r.sigma)
    if (s > cutoff) ev.push_back(s * s);
  if (ev.empty()) throw InputError("matrix is zero");
  r.model = make_model(std::move(ev), {"dense-svd", matrix_id});
  return r;
}

double reconstruction_residual(const Matrix& a, const SvdResult& svd) {
  Matrix us = svd.U;
  for (std::size_t i = 0; i < us.rows; ++i)
    for (std::size_t k = 0; k < us.cols; ++k) us(i, k) *= svd.sigma[k];
  Matrix rec = us * svd.V.transpose();
  double num = 0;
  for (std::size_t i = 0; i < a.data.size(); ++i) num += (a.data[i] - rec.data[i]) * (a.data[i] - rec.data[i]);
  double den = frobenius_norm(a);
  return den > 0 ? std::sqrt(num) / den : std::sqrt(num);
}

CoefVector default_generator(std::size_t dim) {
  CoefVector w(dim);
  for (std::size_t j = 0; j < dim; ++j) w[j] = std::pow(static_cast<double>(j + 1), -0.6);
  return w;
}

SourceElement make_source_element(const SpectralModel& model, const SourceFn& s, const CoefVector& w) {
  if (!s.certified()) throw Uncertified("source function '" + s.text() + "' is not certified");
  if (w.size() != model.dim()) throw DimensionError("generator length does not match the model dimension");
  CoefVector x(w.size());
  for (std::size_t j = 0; j < w.size(); ++j) x[j] = s(model.eigenvalues[j]) * w[j];
  return {x, w, s};
}

CoefVector regularize(const SpectralModel& model, const FilterFamily& filter, double alpha, const CoefVector& x) {
  check_alpha(filter, alpha);
  check_model_filter(model, filter);
  if (x.size() != model.dim()) throw DimensionError("coefficient length does not match the model dimension");
  CoefVector out(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    double l = model.eigenvalues[j];
    out[j] = eval_g(filter, alpha, l) * l * x[j];
  }
  return out;
}

namespace {
template <class Residual>
double log_error_sum(const SpectralModel& model, const CoefVector& x, Residual residual) {
  if (x.size() != model.dim()) throw DimensionError("coefficient length does not match the model dimension");
  double acc = -kInf;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (x[j] == 0.0) continue;
    ResidualValue r = residual(model.eigenvalues[j]);
    if (r.sign == 0) continue;
    acc = log_add_exp(acc, 2.0 * (r.log_abs + std::log(std::fabs(x[j]))));
  }
  return 0.5 * acc;
}
}  // namespace

double log_regularization_error(const SpectralModel& model, const FilterFamily& filter, double log_alpha,
                                const CoefVector& x) {
  check_model_filter(model, filter);
  return log_error_sum(model, x, [&](double l) { return eval_residual_log(filter, log_alpha, l); });
}

double regularization_error(const SpectralModel& model, const FilterFamily& filter, double alpha,
                            const SourceElement& xdag) {
  check_alpha(filter, alpha);
  check_model_filter(model, filter);
  return std::exp(log_error_sum(model, xdag.x_dagger, [&](double l) { return eval_residual(filter, alpha, l); }));
}

double dense_regularization_error(const SvdResult& svd, const FilterFamily& filter, double alpha,
                                  const CoefVector& c) {
  check_alpha(filter, alpha);
  const std::size_t k = svd.model.dim();
  if (c.size() != k) throw DimensionError("coefficient length does not match the model dimension");
  const std::size_t n = svd.V.rows, m = svd.U.rows;
  CoefVector x(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < k; ++j) x[i] += svd.V(i, j) * c[j];
  CoefVector y(m, 0.0);  // y = U Σ Vᵀ x
  for (std::size_t j = 0; j < k; ++j) {
    double proj = 0;
    for (std::size_t i = 0; i < n; ++i) proj += svd.V(i, j) * x[i];
    for (std::size_t i = 0; i < m; ++i) y[i] += svd.U(i, j) * svd.sigma[j] * proj;
  }
  CoefVector xa(n, 0.0);
  for (std::size_t j = 0; j < k; ++j) {
    double uy = 0;
    for (std::size_t i = 0; i < m; ++i) uy += svd.U(i, j) * y[i];
    double coef = eval_g(filter, alpha, svd.sigma[j] * svd.sigma[j]) * svd.sigma[j] * uy;
    for (std::size_t i = 0; i < n; ++i) xa[i] += svd.V(i, j) * coef;
  }
  double s = 0;
  for (std::size_t i = 0; i < n; ++i) s += (xa[i] - x[i]) * (xa[i] - x[i]);
  return std::sqrt(s);
}

Membership membership_probe_log(const CoefVector& x, const std::vector<double>& log_s) {
  if (x.size() != log_s.size()) throw DimensionError("coefficient length does not match the model dimension");
  const std::size_t n = x.size();
  const double log_floor = std::log(1e-300);
  Membership out;
  std::vector<double> log_v(n, -kInf);
  for (std::size_t j = 0; j < n; ++j) {
    if (x[j] == 0.0) continue;
    if (!(log_s[j] >= log_floor)) {
      out.witness = j;
      return out;
    }
    log_v[j] = std::log(std::fabs(x[j])) - log_s[j];
  }
  double log_total = -kInf, log_tail = -kInf;
  const std::size_t quartile = n - n / 4;
  for (std::size_t j = 0; j < n; ++j) {
    log_total = log_add_exp(log_total, 2 * log_v[j]);
    if (j >= quartile) log_tail = log_add_exp(log_tail, 2 * log_v[j]);
  }
  if (log_total == -kInf) {
    out.inside = true;
    return out;
  }
  out.tail_share = std::exp(log_tail - log_total);
  double run = -kInf;
  for (std::size_t j = 0; j < n; ++j) {
    if (j > 0 && log_v[j] > run + std::log(10.0)) {
      out.witness = j;
      return out;
    }
    run = std::max(run, log_v[j]);
  }
  if (!(out.tail_share < 0.1)) {
    out.witness = quartile;
    return out;
  }
  out.inside = true;
  out.bound = std::exp(0.5 * log_total);
  return out;
}

Membership membership_probe(const SpectralModel& model, const CoefVector& x, const SourceFn& s) {
  if (!s.certified()) throw Uncertified("source function '" + s.text() + "' is not certified");
  if (x.size() != model.dim()) throw DimensionError("coefficient length does not match the model dimension");
  std::vector<double> log_s;
  for (double l : model.eigenvalues) log_s.push_back(s.log_at(std::log(l)));
  return membership_probe_log(x, log_s);
}

Matrix read_csv_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open matrix file '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      char* end = nullptr;
      double v = std::strtod(cell.c_str(), &end);
      while (end && *end && std::isspace(static_cast<unsigned char>(*end))) ++end;
      if (end == cell.c_str() || (end && *end)) numeric = false;
      row.push_back(v);
    }
    if (!numeric) {
      if (first) {
        first = false;
        continue;
      }
      throw InputError("non-numeric cell in matrix file '" + path + "'");
    }
    first = false;
    if (!rows.empty() && row.size() != rows.front().size()) throw InputError("ragged rows in matrix file '" + path + "'");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InputError("matrix file '" + path + "' has no data rows");
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) m(i, j) = rows[i][j];
  return m;
}

}  // namespace specreg
