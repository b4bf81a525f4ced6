#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "spreadq/date.hpp"

namespace spreadq {

struct Bar {
    Date date;
    double open = 0.0;
    double close = 0.0;
    double volume = 0.0;
};

// End-of-day history of one symbol. Dates strictly increasing, prices > 0,
// volume >= 0; the constructor enforces this.
class AssetSeries {
public:
    AssetSeries() = default;
    AssetSeries(std::string symbol, std::vector<Bar> rows);

    const std::string& symbol() const { return symbol_; }
    const std::vector<Bar>& rows() const { return rows_; }
    std::size_t size() const { return rows_.size(); }
    bool empty() const { return rows_.empty(); }
    const Bar& operator[](std::size_t i) const { return rows_[i]; }

    std::vector<double> closes() const;

private:
    std::string symbol_;
    std::vector<Bar> rows_;
};

// Two series restricted to a common date vector.
class PairSeries {
public:
    PairSeries(AssetSeries x, AssetSeries y);

    const AssetSeries& x() const { return x_; }
    const AssetSeries& y() const { return y_; }
    std::size_t size() const { return x_.size(); }
    Date date(std::size_t i) const { return x_[i].date; }

    // Index range [first, last] of the days falling inside `range`, or
    // {npos, npos} when no day does.
    std::pair<std::size_t, std::size_t> index_range(const DateRange& range) const;

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
    AssetSeries x_;
    AssetSeries y_;
};

struct RollingSplit {
    int index = 0;
    DateRange train;
    DateRange validation;
    DateRange test;
};

struct RollingSpec {
    int window_months = 18;
    int stride_months = 3;
    int train_months = 12;
    int validation_months = 3;
    int test_months = 3;
};

// Six standardized channels per day: x open, x close, x volume, y open,
// y close, y volume.
inline constexpr std::size_t kPriceChannels = 6;
using PriceFeatures = std::array<double, kPriceChannels>;

struct NormalizedPrices {
    PriceFeatures mean{};
    PriceFeatures stdev{};
    std::vector<PriceFeatures> rows;
};

AssetSeries load_eod_csv(const std::filesystem::path& path);
AssetSeries load_eod_csv(const std::filesystem::path& path, std::string symbol);
void write_eod_csv(const std::filesystem::path& path, const AssetSeries& series);

PairSeries align_pair(const AssetSeries& x, const AssetSeries& y);

// close_t / close_{t-1} - 1
double simple_return(const AssetSeries& series, std::size_t t);

// log prices and log(1+volume), standardized with mean / population stdev
// computed over the days inside `fit_range` only.
NormalizedPrices log_normalize(const PairSeries& pair, const DateRange& fit_range);

std::vector<RollingSplit> make_rollings(const PairSeries& pair, const RollingSpec& spec = {});
std::vector<RollingSplit> make_rollings(Date sample_first, Date sample_last,
                                        const RollingSpec& spec = {});

}  // namespace spreadq
