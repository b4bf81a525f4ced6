#pragma once

#include <cstddef>
#include <random>
#include <utility>
#include <vector>

#include "spreadq/marketdata.hpp"

namespace spreadq {

// Monday to Friday calendar starting at the first business day >= start.
std::vector<Date> business_days(Date start, std::size_t count);

// ln p_y follows a random walk; ln p_x = intercept + beta ln p_y + s_t with
// s_t an Ornstein-Uhlenbeck process sampled daily.
struct OuPairConfig {
    std::size_t days = 400;
    Date start = make_date(2015, 1, 1);
    double beta = 1.0;
    double intercept = 0.0;
    double half_life = 10.0;   // days
    double spread_vol = 0.01;  // daily innovation of s_t
    double factor_vol = 0.006; // daily volatility of ln p_y
    double start_price = 50.0;
};

using SyntheticPair = std::pair<AssetSeries, AssetSeries>;

SyntheticPair ou_pair(const OuPairConfig& cfg, std::mt19937_64& rng);

// Two independent geometric random walks.
SyntheticPair independent_walks(std::size_t days, double vol, std::mt19937_64& rng, Date start = make_date(2015, 1, 1));

// r_x - r_y alternates between +amplitude and -amplitude day by day.
SyntheticPair alternating_pair(std::size_t days, double amplitude, std::mt19937_64& rng,
                               Date start = make_date(2015, 1, 1));

// Builds a series from closes; opens follow the previous close with small
// noise, volumes are log-normal.
AssetSeries series_from_closes(std::string symbol, const std::vector<Date>& dates, const std::vector<double>& closes,
                               std::mt19937_64& rng);

}  // namespace spreadq
