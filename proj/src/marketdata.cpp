#include "spreadq/marketdata.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "spreadq/error.hpp"

namespace spreadq {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

std::string trim(std::string s) {
    auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    char* end = nullptr;
    errno = 0;
    out = std::strtod(s.c_str(), &end);
    return errno == 0 && end == s.c_str() + s.size() && std::isfinite(out);
}

}  // namespace

AssetSeries::AssetSeries(std::string symbol, std::vector<Bar> rows)
    : symbol_(std::move(symbol)), rows_(std::move(rows)) {
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        const Bar& b = rows_[i];
        if (!b.date.ok()) fail(ErrorCode::MalformedRow, symbol_ + ": invalid date at row " + std::to_string(i));
        if (!(b.open > 0.0) || !(b.close > 0.0)) {
            fail(ErrorCode::NonPositivePrice, symbol_ + ": non-positive price on " + format_date(b.date));
        }
        if (!(b.volume >= 0.0)) {
            fail(ErrorCode::MalformedRow, symbol_ + ": negative volume on " + format_date(b.date));
        }
        if (i > 0 && !(rows_[i - 1].date < b.date)) {
            auto code = rows_[i - 1].date == b.date ? ErrorCode::DuplicateDate : ErrorCode::MalformedRow;
            fail(code, symbol_ + ": dates not strictly increasing at " + format_date(b.date));
        }
    }
}

std::vector<double> AssetSeries::closes() const {
    std::vector<double> out;
    out.reserve(rows_.size());
    for (const auto& b : rows_) out.push_back(b.close);
    return out;
}

PairSeries::PairSeries(AssetSeries x, AssetSeries y) : x_(std::move(x)), y_(std::move(y)) {
    if (x_.size() != y_.size()) fail(ErrorCode::LengthMismatch, "pair series lengths differ");
    for (std::size_t i = 0; i < x_.size(); ++i) {
        if (x_[i].date != y_[i].date) fail(ErrorCode::InsufficientOverlap, "pair dates not aligned");
    }
    if (x_.size() < 2) fail(ErrorCode::InsufficientOverlap, "pair needs at least 2 common dates");
}

std::pair<std::size_t, std::size_t> PairSeries::index_range(const DateRange& range) const {
    const auto& rows = x_.rows();
    auto lo = std::lower_bound(rows.begin(), rows.end(), range.first,
                               [](const Bar& b, Date d) { return b.date < d; });
    auto hi = std::upper_bound(rows.begin(), rows.end(), range.last,
                               [](Date d, const Bar& b) { return d < b.date; });
    if (lo >= hi) return {npos, npos};
    return {static_cast<std::size_t>(lo - rows.begin()), static_cast<std::size_t>(hi - rows.begin()) - 1};
}

AssetSeries load_eod_csv(const std::filesystem::path& path) {
    return load_eod_csv(path, path.stem().string());
}

AssetSeries load_eod_csv(const std::filesystem::path& path, std::string symbol) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::MissingFile, "cannot open " + path.string());

    std::string line;
    if (!std::getline(in, line)) fail(ErrorCode::MalformedRow, path.string() + ":1: missing header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line.erase(0, 3);
    if (trim(line) != "date,open,close,volume") {
        fail(ErrorCode::MalformedRow, path.string() + ":1: expected header date,open,close,volume");
    }

    std::vector<Bar> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        auto fields = split_csv_line(line);
        const std::string where = path.string() + ":" + std::to_string(line_no);
        if (fields.size() != 4) fail(ErrorCode::MalformedRow, where + ": expected 4 fields");
        auto date = parse_date(trim(fields[0]));
        Bar bar;
        if (!date || !parse_double(trim(fields[1]), bar.open) || !parse_double(trim(fields[2]), bar.close) ||
            !parse_double(trim(fields[3]), bar.volume)) {
            fail(ErrorCode::MalformedRow, where + ": unparsable field");
        }
        bar.date = *date;
        if (!(bar.open > 0.0) || !(bar.close > 0.0)) fail(ErrorCode::NonPositivePrice, where + ": price must be > 0");
        if (bar.volume < 0.0) fail(ErrorCode::MalformedRow, where + ": negative volume");
        rows.push_back(bar);
    }

    std::stable_sort(rows.begin(), rows.end(), [](const Bar& a, const Bar& b) { return a.date < b.date; });
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].date == rows[i - 1].date) {
            fail(ErrorCode::DuplicateDate, path.string() + ": duplicate date " + format_date(rows[i].date));
        }
    }
    return AssetSeries(std::move(symbol), std::move(rows));
}

void write_eod_csv(const std::filesystem::path& path, const AssetSeries& series) {
    std::ofstream out(path);
    if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
    out.precision(17);
    out << "date,open,close,volume\n";
    for (const auto& b : series.rows()) {
        out << format_date(b.date) << ',' << b.open << ',' << b.close << ',' << b.volume << '\n';
    }
    if (!out) fail(ErrorCode::IoError, "write failed for " + path.string());
}

PairSeries align_pair(const AssetSeries& x, const AssetSeries& y) {
    if (x.empty() || y.empty()) fail(ErrorCode::InsufficientOverlap, "empty series");
    std::vector<Bar> xs, ys;
    std::size_t i = 0, j = 0;
    while (i < x.size() && j < y.size()) {
        if (x[i].date < y[j].date) {
            ++i;
        } else if (y[j].date < x[i].date) {
            ++j;
        } else {
            xs.push_back(x[i++]);
            ys.push_back(y[j++]);
        }
    }
    if (xs.size() < 2) {
        fail(ErrorCode::InsufficientOverlap, x.symbol() + "/" + y.symbol() + ": fewer than 2 common dates");
    }
    return PairSeries(AssetSeries(x.symbol(), std::move(xs)), AssetSeries(y.symbol(), std::move(ys)));
}

double simple_return(const AssetSeries& series, std::size_t t) {
    if (t < 1 || t >= series.size()) {
        fail(ErrorCode::IndexOutOfRange, "return index " + std::to_string(t) + " outside [1, " +
                                             std::to_string(series.size()) + ")");
    }
    return series[t].close / series[t - 1].close - 1.0;
}

NormalizedPrices log_normalize(const PairSeries& pair, const DateRange& fit_range) {
    const std::size_t n = pair.size();
    std::vector<PriceFeatures> raw(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Bar& bx = pair.x()[i];
        const Bar& by = pair.y()[i];
        raw[i] = {std::log(bx.open), std::log(bx.close), std::log1p(bx.volume),
                  std::log(by.open), std::log(by.close), std::log1p(by.volume)};
    }

    auto [lo, hi] = pair.index_range(fit_range);
    if (lo == PairSeries::npos) fail(ErrorCode::RangeOutOfBounds, "fit range " + format_range(fit_range) + " has no data");
    const double count = static_cast<double>(hi - lo + 1);

    NormalizedPrices out;
    for (std::size_t c = 0; c < kPriceChannels; ++c) {
        double mean = 0.0;
        for (std::size_t i = lo; i <= hi; ++i) mean += raw[i][c];
        mean /= count;
        double ss = 0.0;
        for (std::size_t i = lo; i <= hi; ++i) ss += (raw[i][c] - mean) * (raw[i][c] - mean);
        double sd = std::sqrt(ss / count);
        // a channel this flat relative to its level carries no usable signal
        if (!(sd > 1e-12 * std::max(1.0, std::abs(mean)))) {
            fail(ErrorCode::ZeroVariance, "channel " + std::to_string(c) + " is constant over fit range");
        }
        out.mean[c] = mean;
        out.stdev[c] = sd;
    }
    out.rows.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < kPriceChannels; ++c) out.rows[i][c] = (raw[i][c] - out.mean[c]) / out.stdev[c];
    }
    return out;
}

std::vector<RollingSplit> make_rollings(const PairSeries& pair, const RollingSpec& spec) {
    return make_rollings(pair.date(0), pair.date(pair.size() - 1), spec);
}

std::vector<RollingSplit> make_rollings(Date sample_first, Date sample_last, const RollingSpec& spec) {
    if (spec.train_months + spec.validation_months + spec.test_months != spec.window_months ||
        spec.stride_months <= 0 || spec.train_months <= 0 || spec.validation_months <= 0 || spec.test_months <= 0) {
        fail(ErrorCode::InvalidArgument, "rolling split must be positive and sum to the window");
    }
    const int first_month = month_index(sample_first);
    const int span = month_index(sample_last) - first_month + 1;
    if (span < spec.window_months) {
        fail(ErrorCode::SampleTooShort, "sample spans " + std::to_string(span) + " months, need " +
                                            std::to_string(spec.window_months));
    }
    const int count = (span - spec.window_months) / spec.stride_months + 1;

    // calendar months, clipped to the sample
    auto months = [&](int from, int len) {
        return DateRange{std::max(sample_first, date_from_month_index(from)),
                         std::min(sample_last, last_of_month(date_from_month_index(from + len - 1)))};
    };
    std::vector<RollingSplit> out;
    for (int k = 0; k < count; ++k) {
        const int start = first_month + k * spec.stride_months;
        RollingSplit r;
        r.index = k;
        r.train = months(start, spec.train_months);
        r.validation = months(start + spec.train_months, spec.validation_months);
        r.test = months(start + spec.train_months + spec.validation_months, spec.test_months);
        out.push_back(r);
    }
    return out;
}

}  // namespace spreadq
