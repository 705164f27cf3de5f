// Copyright 2026 The clonefuse Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "clonefuse/error.hpp"

namespace clonefuse {

enum class SigmaConvention { kSample, kPopulation };

/// Column-wise (x - mean) / sd. Throws ZeroVariance naming the column.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> zscore_features(
    const Eigen::MatrixBase<Derived>& x, SigmaConvention sigma = SigmaConvention::kSample,
    const std::vector<std::string>& names = {}) {
  using Scalar = typename Derived::Scalar;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::Index n = x.rows();
  const Eigen::Index dof = sigma == SigmaConvention::kSample ? n - 1 : n;
  if (dof < 1) throw Error(ErrorCode::kTooFewSamples, "standardisation needs at least 2 rows");
  Matrix out(n, x.cols());
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    const Scalar mean = x.col(c).mean();
    const auto centred = (x.col(c).array() - mean).matrix();
    const Scalar sd = std::sqrt(centred.squaredNorm() / static_cast<Scalar>(dof));
    if (!(sd > Scalar(0))) {
      const std::string name = c < static_cast<Eigen::Index>(names.size())
                                   ? names[static_cast<std::size_t>(c)]
                                   : "column " + std::to_string(c);
      throw Error(ErrorCode::kZeroVariance, name + " has zero variance");
    }
    out.col(c) = centred / sd;
  }
  return out;
}

struct RegressionDataset {
  std::vector<std::string> feature_names;
  std::vector<std::vector<std::string>> row_labels;  // leading label columns per row
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
};

/// CSV with a header row. The first `label_columns` columns are labels, the
/// last column is the response and the rest are features.
RegressionDataset parse_regression_csv(std::string_view text, const std::string& source,
                                       int label_columns = 2);
RegressionDataset load_regression_csv(const std::filesystem::path& path, int label_columns = 2);

struct OlsFit {
  std::vector<std::string> names;  // "const" then features
  Eigen::VectorXd coefficients;
  Eigen::VectorXd std_errors;
  Eigen::VectorXd t_values;
  Eigen::VectorXd p_values;
  Eigen::VectorXd residuals;
  double r_squared = 0.0;
  double adj_r_squared = 0.0;
  double f_statistic = 0.0;
  double f_p_value = 1.0;
  double condition_number = 0.0;  // of the design matrix including the intercept
  int df_model = 0;
  int df_resid = 0;
};

/// Least squares with intercept and classical standard errors. Throws
/// RankDeficient when the design is singular.
OlsFit ols_fit(const Eigen::Ref<const Eigen::MatrixXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y,
               std::vector<std::string> feature_names = {});
/// Fits on z-scored features when `standardize` is set.
OlsFit ols_fit(const RegressionDataset& data, bool standardize = true,
               SigmaConvention sigma = SigmaConvention::kSample);

struct HypothesisOutcome {
  std::string hypothesis;  // H01, H02, ...
  std::string feature;
  double coefficient = 0.0;
  double p_value = 1.0;
  bool rejected = false;
};

/// One null hypothesis per feature, in feature order; rejected iff p < alpha.
std::vector<HypothesisOutcome> hypothesis_report(const OlsFit& fit, double alpha = 0.05);

struct PairedSample {
  std::string name;
  Eigen::VectorXd a;
  Eigen::VectorXd b;
  std::string metric_label = "recall";
};

/// CSV with a header row `label,<a name>,<b name>`; differences are a - b.
PairedSample parse_paired_csv(std::string_view text, const std::string& source);
PairedSample load_paired_csv(const std::filesystem::path& path);

struct NormalityResult {
  double w = 0.0;
  double p = 0.0;
};

/// Shapiro-Wilk W and p (Royston's approximation), 3 <= n <= 5000.
NormalityResult shapiro_wilk(const Eigen::Ref<const Eigen::VectorXd>& sample);

struct TTestResult {
  std::size_t n = 0;
  double mean_a = 0.0;
  double mean_b = 0.0;
  double mean_diff = 0.0;
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;
};

TTestResult paired_t_test(const PairedSample& sample);

struct WilcoxonResult {
  std::size_t n = 0;  // nonzero differences
  std::size_t zeros = 0;
  double mean_diff = 0.0;
  double w_plus = 0.0;
  double w_minus = 0.0;
  double statistic = 0.0;  // min(w_plus, w_minus)
  double z = 0.0;
  double p = 1.0;
};

/// Zero differences dropped, average ranks for ties, normal approximation
/// with tie and continuity corrections. Needs 5 nonzero differences.
WilcoxonResult wilcoxon_signed_rank(const PairedSample& sample);

enum class PairedTest { kPairedT, kWilcoxon };
std::string_view to_string(PairedTest test);

struct RoutedTest {
  NormalityResult normality;
  PairedTest chosen = PairedTest::kPairedT;
  TTestResult t_test;
  WilcoxonResult wilcoxon;  // filled only when chosen
  double mean_diff = 0.0;
  double p = 1.0;
};

/// Shapiro-Wilk on a - b; p >= normality_alpha selects the t-test.
RoutedTest route_paired_test(const PairedSample& sample, double normality_alpha = 0.05);

}  // namespace clonefuse
