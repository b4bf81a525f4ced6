#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spreadq/date.hpp"
#include "spreadq/marketdata.hpp"

namespace spreadq {

struct HedgeFit {
    double alpha = 0.0;
    double beta = 0.0;
    std::vector<double> residuals;
};

enum class AdfTrend { None, Constant };

struct AdfResult {
    double statistic = 0.0;
    double p_value = 1.0;
    int lags = 0;
    int nobs = 0;
};

struct CointResult {
    double statistic = 0.0;
    double p_value = 1.0;
    int lags = 0;
    // first-stage fit: y = alpha + beta * x + residual
    double alpha = 0.0;
    double beta = 0.0;
};

struct RankedPair {
    std::string symbol_x;
    std::string symbol_y;
    CointResult result;
};

struct PairRanking {
    std::vector<RankedPair> pairs;
    std::vector<std::string> warnings;
};

// Least squares y = alpha + beta * x.
HedgeFit ols_hedge(std::span<const double> y, std::span<const double> x);

// Schwert rule floor(12 * (T/100)^(1/4)).
int schwert_max_lags(std::size_t length);

// Augmented Dickey-Fuller t-ratio on the lagged level. With no `max_lags`
// the Schwert bound is used; lags are then pruned from the top until the
// longest retained lag has |t| > 1.645.
AdfResult adf_test(std::span<const double> series, std::optional<int> max_lags = std::nullopt,
                   AdfTrend trend = AdfTrend::Constant);

// MacKinnon (1994) response-surface p-value; `n_series` is the number of
// I(1) variables (1 for a plain unit-root test, 2 for a pairwise
// cointegration test). Clamped to [0.001, 0.999].
double mackinnon_p(double statistic, AdfTrend trend, int n_series);

// Two-step Engle-Granger test of y on x (typically log closes).
CointResult engle_granger(std::span<const double> x, std::span<const double> y);

// Tests every unordered pair on log closes inside `fit_range`, sorted by
// ascending p-value, ties by symbol names. Within a pair the
// lexicographically smaller symbol is x.
PairRanking rank_pairs(const std::vector<AssetSeries>& universe, const DateRange& fit_range);

}  // namespace spreadq
