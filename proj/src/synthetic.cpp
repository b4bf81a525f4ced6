#include "spreadq/synthetic.hpp"

#include <cmath>

#include "spreadq/error.hpp"

namespace spreadq {

std::vector<Date> business_days(Date start, std::size_t count) {
    std::vector<Date> out;
    out.reserve(count);
    std::chrono::sys_days d{start};
    while (out.size() < count) {
        const std::chrono::weekday wd{d};
        if (wd != std::chrono::Saturday && wd != std::chrono::Sunday) out.emplace_back(d);
        d += std::chrono::days{1};
    }
    return out;
}

AssetSeries series_from_closes(std::string symbol, const std::vector<Date>& dates, const std::vector<double>& closes,
                               std::mt19937_64& rng) {
    if (dates.size() != closes.size()) fail(ErrorCode::LengthMismatch, "dates and closes differ in length");
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<Bar> rows(dates.size());
    for (std::size_t i = 0; i < dates.size(); ++i) {
        const double ref = i == 0 ? closes[0] : closes[i - 1];
        rows[i].date = dates[i];
        rows[i].close = closes[i];
        rows[i].open = ref * std::exp(0.002 * noise(rng));
        rows[i].volume = std::round(1e6 * std::exp(0.3 * noise(rng)));
    }
    return AssetSeries(std::move(symbol), std::move(rows));
}

SyntheticPair ou_pair(const OuPairConfig& cfg, std::mt19937_64& rng) {
    if (cfg.days < 2 || !(cfg.half_life > 0.0) || !(cfg.spread_vol >= 0.0) || !(cfg.factor_vol >= 0.0)) {
        fail(ErrorCode::InvalidArgument, "invalid OU pair configuration");
    }
    std::normal_distribution<double> noise(0.0, 1.0);
    const double phi = std::pow(0.5, 1.0 / cfg.half_life);
    const double stationary = cfg.spread_vol / std::sqrt(1.0 - phi * phi);
    std::vector<double> px(cfg.days), py(cfg.days);
    double ly = std::log(cfg.start_price);
    double s = stationary * noise(rng);
    for (std::size_t t = 0; t < cfg.days; ++t) {
        if (t > 0) {
            ly += cfg.factor_vol * noise(rng);
            s = phi * s + cfg.spread_vol * noise(rng);
        }
        py[t] = std::exp(ly);
        px[t] = std::exp(cfg.intercept + cfg.beta * ly + s);
    }
    const auto dates = business_days(cfg.start, cfg.days);
    AssetSeries x = series_from_closes("SYNX", dates, px, rng);
    AssetSeries y = series_from_closes("SYNY", dates, py, rng);
    return {std::move(x), std::move(y)};
}

SyntheticPair independent_walks(std::size_t days, double vol, std::mt19937_64& rng, Date start) {
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<double> px(days), py(days);
    double lx = std::log(50.0), ly = std::log(50.0);
    for (std::size_t t = 0; t < days; ++t) {
        if (t > 0) {
            lx += vol * noise(rng);
            ly += vol * noise(rng);
        }
        px[t] = std::exp(lx);
        py[t] = std::exp(ly);
    }
    const auto dates = business_days(start, days);
    AssetSeries x = series_from_closes("RWX", dates, px, rng);
    AssetSeries y = series_from_closes("RWY", dates, py, rng);
    return {std::move(x), std::move(y)};
}

SyntheticPair alternating_pair(std::size_t days, double amplitude, std::mt19937_64& rng, Date start) {
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<double> px(days), py(days);
    px[0] = py[0] = 50.0;
    for (std::size_t t = 1; t < days; ++t) {
        const double ry = 0.005 * noise(rng);
        const double spread = t % 2 == 1 ? amplitude : -amplitude;
        py[t] = py[t - 1] * (1.0 + ry);
        px[t] = px[t - 1] * (1.0 + ry + spread);
    }
    const auto dates = business_days(start, days);
    AssetSeries x = series_from_closes("ALTX", dates, px, rng);
    AssetSeries y = series_from_closes("ALTY", dates, py, rng);
    return {std::move(x), std::move(y)};
}

}  // namespace spreadq
