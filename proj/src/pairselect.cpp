#include "spreadq/pairselect.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "spreadq/error.hpp"

namespace spreadq {

namespace {

// MacKinnon (1994) tau surfaces, rows indexed by N-1.
struct TauSurface {
    std::array<double, 6> star;
    std::array<double, 6> min;
    std::array<double, 6> max;
    std::array<std::array<double, 3>, 6> small_p;
    std::array<std::array<double, 4>, 6> large_p;
};

constexpr double kInf = std::numeric_limits<double>::infinity();

const TauSurface kTauNoConstant{
    {-1.04, -1.53, -2.68, -3.09, -3.07, -3.77},
    {-19.04, -19.62, -21.21, -23.25, -21.63, -25.74},
    {kInf, 1.51, 0.86, 0.88, 1.05, 1.24},
    {{{0.6344, 1.2378, 0.032496},
      {1.9129, 1.3857, 0.035322},
      {2.7648, 1.4502, 0.034186},
      {3.4336, 1.4835, 0.0319},
      {4.0999, 1.5533, 0.0359},
      {4.5388, 1.5344, 0.029807}}},
    {{{0.4797, 0.93557, -0.06999, 0.033066},
      {1.5578, 0.8558, -0.2083, -0.033549},
      {2.2268, 0.68093, -0.32362, -0.054448},
      {2.7654, 0.64502, -0.30811, -0.044946},
      {3.2684, 0.68051, -0.26778, -0.034972},
      {3.7268, 0.7167, -0.23648, -0.028288}}},
};

const TauSurface kTauConstant{
    {-1.61, -2.62, -3.13, -3.47, -3.78, -3.93},
    {-18.83, -18.86, -23.48, -28.07, -25.96, -23.27},
    {2.74, 0.92, 0.55, 0.61, 0.79, 1.0},
    {{{2.1659, 1.4412, 0.038269},
      {2.92, 1.5012, 0.039796},
      {3.4699, 1.4856, 0.03164},
      {3.9673, 1.4777, 0.026315},
      {4.5509, 1.5338, 0.029545},
      {5.1399, 1.6036, 0.034445}}},
    {{{1.7339, 0.93202, -0.12745, -0.010368},
      {2.1945, 0.64695, -0.29198, -0.042377},
      {2.5893, 0.45168, -0.36529, -0.050074},
      {3.0387, 0.45452, -0.33666, -0.041921},
      {3.5049, 0.52098, -0.29158, -0.033468},
      {3.9489, 0.58933, -0.25359, -0.02721}}},
};

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

struct OlsFit {
    Eigen::VectorXd coef;
    Eigen::VectorXd stderr_;
    double ssr = 0.0;
};

OlsFit ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    const Eigen::Index n = X.rows(), k = X.cols();
    if (n <= k) fail(ErrorCode::SingularRegression, "not enough observations for regression");
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    qr.setThreshold(1e-10);
    if (qr.rank() < k) fail(ErrorCode::SingularRegression, "design matrix is rank deficient");
    OlsFit fit;
    fit.coef = qr.solve(y);
    const Eigen::VectorXd resid = y - X * fit.coef;
    fit.ssr = resid.squaredNorm();
    const double scale = y.squaredNorm();
    if (!(fit.ssr > 1e-24 * std::max(scale, 1e-300))) {
        fail(ErrorCode::SingularRegression, "regression fits exactly; residual variance is zero");
    }
    const double s2 = fit.ssr / static_cast<double>(n - k);
    const Eigen::MatrixXd xtx_inv = (X.transpose() * X).ldlt().solve(Eigen::MatrixXd::Identity(k, k));
    fit.stderr_ = (s2 * xtx_inv.diagonal().array()).sqrt();
    return fit;
}

// Regression of diff[t] on level[t], diff[t-1..t-p] (and a constant), for
// t in [first, diff.size()).
OlsFit adf_regression(std::span<const double> s, int lags, std::size_t first, AdfTrend trend) {
    const std::size_t T = s.size();
    const std::size_t rows = (T - 1) - first;
    const int k = 1 + lags + (trend == AdfTrend::Constant ? 1 : 0);
    Eigen::MatrixXd X(static_cast<Eigen::Index>(rows), k);
    Eigen::VectorXd y(static_cast<Eigen::Index>(rows));
    for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t t = first + r;  // diff index: s[t+1]-s[t]
        const auto row = static_cast<Eigen::Index>(r);
        y(row) = s[t + 1] - s[t];
        X(row, 0) = s[t];
        for (int j = 1; j <= lags; ++j) X(row, j) = s[t + 1 - j] - s[t - j];
        if (trend == AdfTrend::Constant) X(row, k - 1) = 1.0;
    }
    return ols(X, y);
}

}  // namespace

HedgeFit ols_hedge(std::span<const double> y, std::span<const double> x) {
    if (y.size() != x.size()) fail(ErrorCode::LengthMismatch, "ols_hedge: lengths differ");
    if (x.size() < 3) fail(ErrorCode::SeriesTooShort, "ols_hedge needs at least 3 points");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 1e-14 * n * std::max(1.0, mx * mx))) fail(ErrorCode::DegenerateRegressor, "regressor is constant");
    HedgeFit fit;
    fit.beta = sxy / sxx;
    fit.alpha = my - fit.beta * mx;
    fit.residuals.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) fit.residuals[i] = y[i] - fit.alpha - fit.beta * x[i];
    return fit;
}

int schwert_max_lags(std::size_t length) {
    return static_cast<int>(std::floor(12.0 * std::pow(static_cast<double>(length) / 100.0, 0.25)));
}

AdfResult adf_test(std::span<const double> series, std::optional<int> max_lags, AdfTrend trend) {
    const std::size_t T = series.size();
    if (T < 20) fail(ErrorCode::SeriesTooShort, "ADF needs at least 20 observations");
    int pmax = max_lags ? *max_lags : schwert_max_lags(T);
    if (pmax < 0) fail(ErrorCode::InvalidArgument, "max_lags must be nonnegative");
    // keep at least ~10 residual degrees of freedom
    const int k_extra = trend == AdfTrend::Constant ? 2 : 1;
    pmax = std::min<int>(pmax, std::max<int>(0, (static_cast<int>(T) - 1 - k_extra - 10) / 2));

    int lags = pmax;
    while (lags > 0) {
        // common sample so t-ratios across candidate lag orders are comparable
        OlsFit fit = adf_regression(series, lags, static_cast<std::size_t>(pmax), trend);
        const double t_last = fit.coef(lags) / fit.stderr_(lags);
        if (std::abs(t_last) > 1.645) break;
        --lags;
    }

    OlsFit fit = adf_regression(series, lags, static_cast<std::size_t>(lags), trend);
    AdfResult out;
    out.statistic = fit.coef(0) / fit.stderr_(0);
    out.lags = lags;
    out.nobs = static_cast<int>(T - 1 - static_cast<std::size_t>(lags));
    out.p_value = mackinnon_p(out.statistic, trend, 1);
    return out;
}

double mackinnon_p(double statistic, AdfTrend trend, int n_series) {
    if (n_series < 1 || n_series > 6) fail(ErrorCode::InvalidArgument, "MacKinnon surface defined for 1..6 series");
    const TauSurface& s = trend == AdfTrend::Constant ? kTauConstant : kTauNoConstant;
    const auto i = static_cast<std::size_t>(n_series - 1);
    double p;
    if (std::isnan(statistic)) {
        p = 1.0;
    } else if (statistic > s.max[i]) {
        p = 1.0;
    } else if (statistic < s.min[i]) {
        p = 0.0;
    } else if (statistic <= s.star[i]) {
        const auto& c = s.small_p[i];
        p = normal_cdf(c[0] + statistic * (c[1] + statistic * c[2]));
    } else {
        const auto& c = s.large_p[i];
        p = normal_cdf(c[0] + statistic * (c[1] + statistic * (c[2] + statistic * c[3])));
    }
    return std::clamp(p, 0.001, 0.999);
}

CointResult engle_granger(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) fail(ErrorCode::LengthMismatch, "engle_granger: lengths differ");
    if (x.size() < 50) fail(ErrorCode::SeriesTooShort, "engle_granger needs at least 50 observations");
    HedgeFit hedge = ols_hedge(y, x);

    CointResult out;
    out.alpha = hedge.alpha;
    out.beta = hedge.beta;

    double ss_res = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        ss_res += hedge.residuals[i] * hedge.residuals[i];
        scale += y[i] * y[i];
    }
    if (ss_res <= 1e-24 * std::max(scale, 1e-300)) {
        // exact linear relation: the residual is identically zero
        out.statistic = -kInf;
        out.lags = 0;
        out.p_value = mackinnon_p(out.statistic, AdfTrend::Constant, 2);
        return out;
    }

    AdfResult adf = adf_test(hedge.residuals, std::nullopt, AdfTrend::None);
    out.statistic = adf.statistic;
    out.lags = adf.lags;
    out.p_value = mackinnon_p(adf.statistic, AdfTrend::Constant, 2);
    return out;
}

PairRanking rank_pairs(const std::vector<AssetSeries>& universe, const DateRange& fit_range) {
    if (universe.size() < 2) fail(ErrorCode::TooFewAssets, "pair ranking needs at least 2 assets");
    PairRanking ranking;
    for (std::size_t i = 0; i < universe.size(); ++i) {
        for (std::size_t j = i + 1; j < universe.size(); ++j) {
            const AssetSeries* a = &universe[i];
            const AssetSeries* b = &universe[j];
            if (b->symbol() < a->symbol()) std::swap(a, b);
            try {
                PairSeries pair = align_pair(*a, *b);
                auto [lo, hi] = pair.index_range(fit_range);
                if (lo == PairSeries::npos) fail(ErrorCode::InsufficientOverlap, "no data in fit range");
                std::vector<double> lx, ly;
                for (std::size_t t = lo; t <= hi; ++t) {
                    lx.push_back(std::log(pair.x()[t].close));
                    ly.push_back(std::log(pair.y()[t].close));
                }
                ranking.pairs.push_back({a->symbol(), b->symbol(), engle_granger(lx, ly)});
            } catch (const Error& e) {
                ranking.warnings.push_back(a->symbol() + "/" + b->symbol() + " skipped: " + e.what());
            }
        }
    }
    std::sort(ranking.pairs.begin(), ranking.pairs.end(), [](const RankedPair& l, const RankedPair& r) {
        if (l.result.p_value != r.result.p_value) return l.result.p_value < r.result.p_value;
        if (l.symbol_x != r.symbol_x) return l.symbol_x < r.symbol_x;
        return l.symbol_y < r.symbol_y;
    });
    return ranking;
}

}  // namespace spreadq
