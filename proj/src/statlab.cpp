// Copyright 2026 The clonefuse Authors
// SPDX-License-Identifier: Apache-2.0

#include "clonefuse/statlab.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "clonefuse/distributions.hpp"
#include "text_util.hpp"

namespace clonefuse {

namespace {

std::string trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

std::vector<std::string> split_csv(std::string_view line) {
  std::vector<std::string> out;
  std::size_t b = 0;
  while (true) {
    const auto comma = line.find(',', b);
    out.push_back(trim(line.substr(b, comma == std::string_view::npos ? line.npos : comma - b)));
    if (comma == std::string_view::npos) return out;
    b = comma + 1;
  }
}

double parse_number(const std::string& s, const std::string& where) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v)) {
    throw Error(ErrorCode::kFormatViolation, where + ": '" + s + "' is not a number");
  }
  return v;
}

// Rows of a headed CSV, skipping blank and '#' lines.
std::vector<std::pair<std::size_t, std::vector<std::string>>> csv_rows(std::string_view text) {
  std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;
  const auto lines = detail::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string line = trim(lines[i]);
    if (line.empty() || line.front() == '#') continue;
    rows.emplace_back(i + 1, split_csv(line));
  }
  return rows;
}

Eigen::VectorXd differences(const PairedSample& s) {
  if (s.a.size() != s.b.size()) {
    throw Error(ErrorCode::kInvalidArgument, s.name + ": paired columns differ in length");
  }
  if (!s.a.allFinite() || !s.b.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument, s.name + ": non-finite values");
  }
  return s.a - s.b;
}

}  // namespace

RegressionDataset parse_regression_csv(std::string_view text, const std::string& source,
                                       int label_columns) {
  const auto rows = csv_rows(text);
  if (rows.empty()) throw Error(ErrorCode::kFormatViolation, source + ": empty regression file");
  const auto& header = rows.front().second;
  const auto labels = static_cast<std::size_t>(std::max(label_columns, 0));
  if (header.size() < labels + 2) {
    throw Error(ErrorCode::kFormatViolation, source + ": need label columns, at least one feature and a response");
  }
  RegressionDataset data;
  data.feature_names.assign(header.begin() + static_cast<std::ptrdiff_t>(labels), header.end() - 1);
  const auto k = static_cast<Eigen::Index>(data.feature_names.size());
  const auto n = static_cast<Eigen::Index>(rows.size() - 1);
  data.x.resize(n, k);
  data.y.resize(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& [line, cells] = rows[static_cast<std::size_t>(r) + 1];
    const std::string where = source + " line " + std::to_string(line);
    if (cells.size() != header.size()) {
      throw Error(ErrorCode::kFormatViolation, where + ": expected " + std::to_string(header.size()) +
                                                   " fields, got " + std::to_string(cells.size()));
    }
    data.row_labels.emplace_back(cells.begin(), cells.begin() + static_cast<std::ptrdiff_t>(labels));
    for (Eigen::Index c = 0; c < k; ++c) data.x(r, c) = parse_number(cells[labels + static_cast<std::size_t>(c)], where);
    data.y[r] = parse_number(cells.back(), where);
  }
  return data;
}

RegressionDataset load_regression_csv(const std::filesystem::path& path, int label_columns) {
  return parse_regression_csv(detail::read_file(path.string()), path.string(), label_columns);
}

OlsFit ols_fit(const Eigen::Ref<const Eigen::MatrixXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y,
               std::vector<std::string> feature_names) {
  const Eigen::Index n = x.rows();
  const Eigen::Index k = x.cols();
  if (y.size() != n) throw Error(ErrorCode::kDimensionMismatch, "response length differs from design rows");
  if (n <= k + 1) {
    throw Error(ErrorCode::kTooFewSamples, "OLS needs more rows than parameters (" + std::to_string(n) +
                                               " rows, " + std::to_string(k + 1) + " parameters)");
  }
  if (!x.allFinite() || !y.allFinite()) throw Error(ErrorCode::kInvalidArgument, "non-finite regression data");

  Eigen::MatrixXd design(n, k + 1);
  design.col(0).setOnes();
  design.rightCols(k) = x;
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < k + 1) {
    throw Error(ErrorCode::kRankDeficient, "design matrix has rank " + std::to_string(qr.rank()) +
                                               " < " + std::to_string(k + 1));
  }

  OlsFit fit;
  fit.names.push_back("const");
  for (Eigen::Index c = 0; c < k; ++c) {
    fit.names.push_back(c < static_cast<Eigen::Index>(feature_names.size()) ? feature_names[static_cast<std::size_t>(c)]
                                                                          : "x" + std::to_string(c + 1));
  }
  fit.coefficients = qr.solve(y);
  fit.residuals = y - design * fit.coefficients;
  fit.df_model = static_cast<int>(k);
  fit.df_resid = static_cast<int>(n - k - 1);

  const double sst = (y.array() - y.mean()).matrix().squaredNorm();
  if (!(sst > 0.0)) throw Error(ErrorCode::kZeroVariance, "response has zero variance");
  const double ssr = fit.residuals.squaredNorm();
  fit.r_squared = 1.0 - ssr / sst;
  fit.adj_r_squared = 1.0 - (1.0 - fit.r_squared) * static_cast<double>(n - 1) / fit.df_resid;
  const double sigma2 = ssr / fit.df_resid;
  fit.f_statistic = ((sst - ssr) / fit.df_model) / sigma2;
  fit.f_p_value = f_sf(fit.f_statistic, fit.df_model, fit.df_resid);

  // (D'D)^-1 = P R^-1 R^-T P'
  const auto p = k + 1;
  const Eigen::MatrixXd r = qr.matrixR().topLeftCorner(p, p).triangularView<Eigen::Upper>();
  const Eigen::MatrixXd r_inv = r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(p, p));
  const Eigen::MatrixXd perm = qr.colsPermutation();
  const Eigen::MatrixXd cov = sigma2 * perm * (r_inv * r_inv.transpose()) * perm.transpose();
  fit.std_errors = cov.diagonal().cwiseSqrt();
  fit.t_values = fit.coefficients.cwiseQuotient(fit.std_errors);
  fit.p_values.resize(p);
  for (Eigen::Index i = 0; i < p; ++i) fit.p_values[i] = student_t_two_sided(fit.t_values[i], fit.df_resid);

  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(design);
  const auto& sv = svd.singularValues();
  fit.condition_number = sv[0] / sv[sv.size() - 1];
  return fit;
}

OlsFit ols_fit(const RegressionDataset& data, bool standardize, SigmaConvention sigma) {
  if (standardize) return ols_fit(zscore_features(data.x, sigma, data.feature_names), data.y, data.feature_names);
  return ols_fit(data.x, data.y, data.feature_names);
}

std::vector<HypothesisOutcome> hypothesis_report(const OlsFit& fit, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::kInvalidArgument, "alpha outside (0, 1)");
  std::vector<HypothesisOutcome> out;
  for (std::size_t i = 1; i < fit.names.size(); ++i) {
    char label[16];
    std::snprintf(label, sizeof(label), "H%02zu", i);
    const auto idx = static_cast<Eigen::Index>(i);
    out.push_back({label, fit.names[i], fit.coefficients[idx], fit.p_values[idx], fit.p_values[idx] < alpha});
  }
  return out;
}

PairedSample parse_paired_csv(std::string_view text, const std::string& source) {
  const auto rows = csv_rows(text);
  if (rows.size() < 2) throw Error(ErrorCode::kFormatViolation, source + ": need a header and data rows");
  PairedSample s;
  s.name = std::filesystem::path(source).stem().string();
  const auto& header = rows.front().second;
  if (header.size() != 3) throw Error(ErrorCode::kFormatViolation, source + ": header must be label,a,b");
  std::vector<double> a;
  std::vector<double> b;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& [line, cells] = rows[r];
    const std::string where = source + " line " + std::to_string(line);
    if (cells.size() != 3) throw Error(ErrorCode::kFormatViolation, where + ": expected 3 fields");
    a.push_back(parse_number(cells[1], where));
    b.push_back(parse_number(cells[2], where));
  }
  s.a = Eigen::Map<Eigen::VectorXd>(a.data(), static_cast<Eigen::Index>(a.size()));
  s.b = Eigen::Map<Eigen::VectorXd>(b.data(), static_cast<Eigen::Index>(b.size()));
  return s;
}

PairedSample load_paired_csv(const std::filesystem::path& path) {
  return parse_paired_csv(detail::read_file(path.string()), path.string());
}

TTestResult paired_t_test(const PairedSample& sample) {
  const Eigen::VectorXd d = differences(sample);
  const auto n = static_cast<std::size_t>(d.size());
  if (n < 2) throw Error(ErrorCode::kTooFewSamples, sample.name + ": paired t-test needs 2 pairs");
  TTestResult r;
  r.n = n;
  r.mean_a = sample.a.mean();
  r.mean_b = sample.b.mean();
  r.mean_diff = d.mean();
  const double sd = std::sqrt((d.array() - r.mean_diff).square().sum() / static_cast<double>(n - 1));
  if (!(sd > 0.0)) throw Error(ErrorCode::kDegenerateSample, sample.name + ": differences have zero variance");
  r.df = static_cast<double>(n - 1);
  r.t = r.mean_diff / (sd / std::sqrt(static_cast<double>(n)));
  r.p = student_t_two_sided(r.t, r.df);
  return r;
}

WilcoxonResult wilcoxon_signed_rank(const PairedSample& sample) {
  const Eigen::VectorXd d = differences(sample);
  WilcoxonResult r;
  r.mean_diff = d.size() > 0 ? d.mean() : 0.0;
  std::vector<double> nz;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (d[i] == 0.0) {
      ++r.zeros;
    } else {
      nz.push_back(d[i]);
    }
  }
  r.n = nz.size();
  if (r.n < 5) {
    throw Error(ErrorCode::kTooFewNonzero,
                sample.name + ": " + std::to_string(r.n) + " nonzero differences, need at least 5");
  }
  std::vector<std::size_t> order(r.n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return std::abs(nz[x]) < std::abs(nz[y]); });
  std::vector<double> rank(r.n);
  double tie_term = 0.0;
  for (std::size_t i = 0; i < r.n;) {
    std::size_t j = i;
    while (j + 1 < r.n && std::abs(nz[order[j + 1]]) == std::abs(nz[order[i]])) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = avg;
    const double t = static_cast<double>(j - i + 1);
    tie_term += t * t * t - t;
    i = j + 1;
  }
  for (std::size_t i = 0; i < r.n; ++i) (nz[i] > 0 ? r.w_plus : r.w_minus) += rank[i];
  r.statistic = std::min(r.w_plus, r.w_minus);
  const double n = static_cast<double>(r.n);
  const double mu = n * (n + 1.0) / 4.0;
  const double var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
  const double dev = std::max(std::abs(r.w_plus - mu) - 0.5, 0.0);
  r.z = (r.w_plus >= mu ? dev : -dev) / std::sqrt(var);
  r.p = std::min(1.0, 2.0 * normal_sf(std::abs(r.z)));
  return r;
}

std::string_view to_string(PairedTest test) {
  return test == PairedTest::kPairedT ? "paired-t" : "wilcoxon";
}

RoutedTest route_paired_test(const PairedSample& sample, double normality_alpha) {
  RoutedTest out;
  out.normality = shapiro_wilk(differences(sample));
  out.t_test = paired_t_test(sample);
  out.mean_diff = out.t_test.mean_diff;
  if (out.normality.p >= normality_alpha) {
    out.chosen = PairedTest::kPairedT;
    out.p = out.t_test.p;
  } else {
    out.chosen = PairedTest::kWilcoxon;
    out.wilcoxon = wilcoxon_signed_rank(sample);
    out.p = out.wilcoxon.p;
  }
  return out;
}

}  // namespace clonefuse
