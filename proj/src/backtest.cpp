#include "spreadq/backtest.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "spreadq/error.hpp"

namespace spreadq {

namespace {

double mean_of(std::span<const double> v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double population_stdev(std::span<const double> v) {
    const double m = mean_of(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size()));
}

}  // namespace

double sharpe_ratio(std::span<const double> returns, const MetricsConfig& cfg) {
    if (returns.size() < 2) fail(ErrorCode::TooFewReturns, "Sharpe ratio needs at least 2 returns");
    const double sd = population_stdev(returns);
    const double m = mean_of(returns);
    if (!(sd > 1e-12 * std::abs(m)) || sd == 0.0) fail(ErrorCode::ZeroDispersion, "returns have zero dispersion");
    return (m - cfg.risk_free_daily) / sd;
}

double annualized_return(std::span<const double> returns, const MetricsConfig& cfg) {
    if (returns.empty()) fail(ErrorCode::EmptyReturns, "annualized return of an empty sequence");
    if (cfg.trading_days_per_year <= 0) fail(ErrorCode::InvalidArgument, "trading_days_per_year must be > 0");
    double growth = 1.0;
    for (double r : returns) growth *= 1.0 + r;
    if (!(growth > 0.0)) fail(ErrorCode::NonPositiveEquity, "compounded equity is not positive");
    return std::pow(growth, static_cast<double>(cfg.trading_days_per_year) / static_cast<double>(returns.size())) - 1.0;
}

double annualized_return_from_equity(std::span<const double> equity, const MetricsConfig& cfg) {
    if (equity.size() < 2) fail(ErrorCode::EmptyReturns, "equity curve needs at least 2 points");
    if (!(equity.front() > 0.0 && equity.back() > 0.0)) fail(ErrorCode::NonPositiveEquity, "equity must be positive");
    const double growth = equity.back() / equity.front();
    const double n = static_cast<double>(equity.size() - 1);
    return std::pow(growth, static_cast<double>(cfg.trading_days_per_year) / n) - 1.0;
}

double max_drawdown(std::span<const double> equity) {
    double peak = 0.0;
    double worst = 0.0;
    for (double e : equity) {
        if (!(e > 0.0)) fail(ErrorCode::NonPositiveEquity, "equity values must be positive");
        peak = std::max(peak, e);
        worst = std::max(worst, (peak - e) / peak);
    }
    return worst;
}

double annualized_volatility(std::span<const double> returns, const MetricsConfig& cfg) {
    if (returns.size() < 2) fail(ErrorCode::TooFewReturns, "volatility needs at least 2 returns");
    return population_stdev(returns) * std::sqrt(static_cast<double>(cfg.trading_days_per_year));
}

TradingActivity trading_activity(std::span<const Action> actions) {
    TradingActivity out;
    long held_days = 0;
    long gap_days = 0;
    long gaps = 0;
    long flat_run = 0;
    Action prev = Action::Clear;
    for (Action a : actions) {
        if (a == Action::Clear) {
            ++flat_run;
        } else {
            ++held_days;
            if (a != prev) {
                if (out.tt > 0 && flat_run > 0) {
                    gap_days += flat_run;
                    ++gaps;
                }
                ++out.tt;
            }
            flat_run = 0;
        }
        prev = a;
    }
    if (out.tt > 0) out.ahd = static_cast<double>(held_days) / out.tt;
    if (gaps > 0) out.abd = static_cast<double>(gap_days) / static_cast<double>(gaps);
    return out;
}

Metrics compute_metrics(const Rollout& rollout, const MetricsConfig& cfg) {
    Metrics m;
    try {
        m.sr = sharpe_ratio(rollout.returns, cfg);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::ZeroDispersion) throw;
        m.sr = 0.0;
    }
    m.ar = annualized_return(rollout.returns, cfg);
    m.mdd = max_drawdown(rollout.equity);
    m.av = annualized_volatility(rollout.returns, cfg);
    const TradingActivity act = trading_activity(rollout.actions);
    m.ahd = act.ahd;
    m.tt = act.tt;
    m.abd = act.abd;
    return m;
}

BacktestReport aggregate(std::string config_hash, std::string method, std::vector<RollingReport> rollings) {
    BacktestReport r;
    r.config_hash = std::move(config_hash);
    r.method = std::move(method);
    r.rollings = std::move(rollings);
    std::vector<std::array<double, 7>> rows;
    for (const auto& roll : r.rollings) {
        if (roll.ok) rows.push_back(roll.metrics.values());
    }
    r.completed = static_cast<int>(rows.size());
    if (rows.empty()) return r;
    const double n = static_cast<double>(rows.size());
    for (std::size_t k = 0; k < kMetricNames.size(); ++k) {
        double sum = 0.0;
        for (const auto& row : rows) sum += row[k];
        const double mean = sum / n;
        double ss = 0.0;
        for (const auto& row : rows) ss += (row[k] - mean) * (row[k] - mean);
        r.aggregate[k].mean = mean;
        r.aggregate[k].std = rows.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    }
    return r;
}

namespace {

using Json = nlohmann::ordered_json;

Json range_json(const DateRange& r) {
    return Json{{"first", format_date(r.first)}, {"last", format_date(r.last)}};
}

DateRange range_from(const Json& j) {
    auto parse = [](const Json& v) {
        const auto d = parse_date(v.get<std::string>());
        if (!d) fail(ErrorCode::ConfigError, "bad date in report: " + v.get<std::string>());
        return *d;
    };
    return DateRange{parse(j.at("first")), parse(j.at("last"))};
}

}  // namespace

std::string report_to_json(const BacktestReport& report) {
    Json j;
    j["config_hash"] = report.config_hash;
    j["method"] = report.method;
    j["completed"] = report.completed;
    Json rolls = Json::array();
    for (const auto& r : report.rollings) {
        Json e;
        e["index"] = r.index;
        e["status"] = r.ok ? "ok" : "failed";
        if (!r.ok) e["reason"] = r.failure;
        e["train"] = range_json(r.train);
        e["validation"] = range_json(r.validation);
        e["test"] = range_json(r.test);
        if (r.ok) {
            Json m;
            const auto v = r.metrics.values();
            for (std::size_t k = 0; k < kMetricNames.size(); ++k) m[kMetricNames[k]] = v[k];
            e["metrics"] = m;
            e["actions"] = r.actions;
            e["equity"] = r.equity;
            e["trace_path"] = r.trace_path;
        }
        rolls.push_back(e);
    }
    j["rollings"] = rolls;
    Json agg;
    for (std::size_t k = 0; k < kMetricNames.size(); ++k) {
        agg[kMetricNames[k]] = Json{{"mean", report.aggregate[k].mean}, {"std", report.aggregate[k].std}};
    }
    j["aggregate"] = agg;
    return j.dump(2) + "\n";
}

BacktestReport report_from_json(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const std::exception& e) {
        fail(ErrorCode::ConfigError, std::string("report is not valid JSON: ") + e.what());
    }
    try {
        BacktestReport r;
        r.config_hash = j.at("config_hash").get<std::string>();
        r.method = j.at("method").get<std::string>();
        r.completed = j.at("completed").get<int>();
        for (const auto& e : j.at("rollings")) {
            RollingReport roll;
            roll.index = e.at("index").get<int>();
            roll.ok = e.at("status").get<std::string>() == "ok";
            if (!roll.ok) roll.failure = e.at("reason").get<std::string>();
            roll.train = range_from(e.at("train"));
            roll.validation = range_from(e.at("validation"));
            roll.test = range_from(e.at("test"));
            if (roll.ok) {
                const Json& m = e.at("metrics");
                Metrics& mt = roll.metrics;
                double* fields[] = {&mt.sr, &mt.ar, &mt.mdd, &mt.av, &mt.ahd, &mt.tt, &mt.abd};
                for (std::size_t k = 0; k < kMetricNames.size(); ++k) *fields[k] = m.at(kMetricNames[k]).get<double>();
                roll.actions = e.at("actions").get<std::vector<int>>();
                roll.equity = e.at("equity").get<std::vector<double>>();
                roll.trace_path = e.at("trace_path").get<std::string>();
            }
            r.rollings.push_back(std::move(roll));
        }
        const Json& agg = j.at("aggregate");
        for (std::size_t k = 0; k < kMetricNames.size(); ++k) {
            r.aggregate[k].mean = agg.at(kMetricNames[k]).at("mean").get<double>();
            r.aggregate[k].std = agg.at(kMetricNames[k]).at("std").get<double>();
        }
        return r;
    } catch (const Json::exception& e) {
        fail(ErrorCode::ConfigError, std::string("malformed report: ") + e.what());
    }
}

BacktestReport load_report(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::MissingFile, "cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return report_from_json(buf.str());
}

std::string aggregate_csv(const BacktestReport& report) {
    static constexpr std::array<const char*, 7> header = {"SR", "AR(%)", "MDD(%)", "AV(%)", "AHD", "TT", "ABD"};
    static constexpr std::array<double, 7> scale = {1, 100, 100, 100, 1, 1, 1};
    std::string out = "Model";
    for (const char* h : header) out += std::string(",") + h;
    out += "\n" + report.method;
    for (std::size_t k = 0; k < header.size(); ++k) {
        if (report.completed == 0) {
            out += ",n/a";
            continue;
        }
        char cell[64];
        std::snprintf(cell, sizeof cell, ",%.2f ± %.2f", report.aggregate[k].mean * scale[k],
                      report.aggregate[k].std * scale[k]);
        out += cell;
    }
    return out + "\n";
}

void write_trace_csv(const std::filesystem::path& path, std::span<const TraceRow> trace) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
    out.precision(17);
    out << "date,action,r_x,r_y,step_profit,net_value\n";
    for (const auto& r : trace) {
        out << format_date(r.date) << ',' << position(r.action) << ',' << r.r_x << ',' << r.r_y << ','
            << r.step_profit << ',' << r.net_value << '\n';
    }
    if (!out) fail(ErrorCode::IoError, "failed writing " + path.string());
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
    out << text;
    if (!out) fail(ErrorCode::IoError, "failed writing " + path.string());
}

}  // namespace

void render_report(const BacktestReport& report, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) fail(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
    write_text(dir / "report.json", report_to_json(report));
    write_text(dir / "aggregate.csv", aggregate_csv(report));
}

}  // namespace spreadq
