#pragma once

#include <optional>
#include <string>
#include <vector>

#include "specreg/filters.hpp"
#include "specreg/functions.hpp"

namespace specreg {

struct Provenance {
  std::string kind;    // "synthetic-diagonal" or "dense-svd"
  std::string detail;  // rule ("j^-2") or matrix id
};

struct SpectralModel {
  std::vector<double> eigenvalues;  // λ_j of T*T, strictly positive, descending
  double reference_norm_sq = 0.0;   // ‖T‖² recorded at construction
  Provenance provenance;

  std::size_t dim() const { return eigenvalues.size(); }
};

using CoefVector = std::vector<double>;

struct Matrix {
  std::size_t rows = 0, cols = 0;
  std::vector<double> data;  // row-major

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
  Matrix transpose() const;
  static Matrix identity(std::size_t n);
};

Matrix operator*(const Matrix& a, const Matrix& b);
double frobenius_norm(const Matrix& a);

constexpr std::size_t kMaxDimension = 512;

SpectralModel make_model(std::vector<double> eigenvalues, Provenance provenance);
// Rules: "j^-2" (default), "j^-4", "exp" (λ_j = e^{-j}).
SpectralModel make_diagonal_model(const std::string& rule, std::size_t dim);

struct SvdResult {
  Matrix U;                   // m × k
  std::vector<double> sigma;  // descending, length k = min(m, n)
  Matrix V;                   // n × k
  int sweeps = 0;
  SpectralModel model;        // eigenvalues σ_j² of the nonzero singular values
};

SvdResult svd_decompose(const Matrix& a, double tol = 1e-12, const std::string& matrix_id = "matrix");
double reconstruction_residual(const Matrix& a, const SvdResult& svd);

struct SourceElement {
  CoefVector x_dagger;
  CoefVector generator_w;
  SourceFn source;
};

CoefVector default_generator(std::size_t dim);  // w_j = j^{-0.6}
SourceElement make_source_element(const SpectralModel& model, const SourceFn& s, const CoefVector& w);

CoefVector regularize(const SpectralModel& model, const FilterFamily& filter, double alpha, const CoefVector& x);
double regularization_error(const SpectralModel& model, const FilterFamily& filter, double alpha,
                            const SourceElement& xdag);
// ln of the error at α = e^{log_alpha}; usable where the error underflows.
double log_regularization_error(const SpectralModel& model, const FilterFamily& filter, double log_alpha,
                                const CoefVector& x);
// Error computed in the original coordinates: x = V c, y = A x, x_α = V g(Σ²) Σ Uᵀ y.
double dense_regularization_error(const SvdResult& svd, const FilterFamily& filter, double alpha,
                                  const CoefVector& coefficients);

struct Membership {
  bool inside = false;
  double bound = 0.0;  // ‖v‖ when inside
  std::optional<std::size_t> witness;  // 0-based index
  double tail_share = 0.0;
};

Membership membership_probe(const SpectralModel& model, const CoefVector& x, const SourceFn& s);
// Same probe with ln s(λ_j) supplied per eigenvalue.
Membership membership_probe_log(const CoefVector& x, const std::vector<double>& log_s);

// CSV matrix, row-major, optional header row.
Matrix read_csv_matrix(const std::string& path);

}  // namespace specreg
