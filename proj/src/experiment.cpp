#include "spreadq/experiment.hpp"

#include <atomic>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "spreadq/agent.hpp"
#include "spreadq/baselines.hpp"
#include "spreadq/error.hpp"
#include "spreadq/nn/checkpoint.hpp"

namespace spreadq {

namespace fs = std::filesystem;

std::vector<AssetSeries> load_universe(const ExperimentConfig& cfg) {
    std::vector<AssetSeries> out;
    for (const auto& sym : cfg.universe) out.push_back(load_eod_csv(cfg.data_dir / (sym + ".csv"), sym));
    return out;
}

namespace {

DateRange fit_range_for(const ExperimentConfig& cfg, const std::vector<AssetSeries>& universe) {
    Date first = universe.front().rows().front().date;
    Date last = universe.front().rows().back().date;
    for (const auto& s : universe) {
        if (s.empty()) fail(ErrorCode::SeriesTooShort, s.symbol() + " has no rows");
        first = std::min(first, s.rows().front().date);
        last = std::max(last, s.rows().back().date);
    }
    return DateRange{cfg.fit_first.value_or(first), cfg.fit_last.value_or(last)};
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) fail(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
}

}  // namespace

void write_pairs_csv(const fs::path& path, const PairRanking& ranking, std::size_t top) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
    out.precision(17);
    out << "symbol_x,symbol_y,beta,statistic,p_value,lags\n";
    const std::size_t n = top > 0 ? std::min(top, ranking.pairs.size()) : ranking.pairs.size();
    for (std::size_t i = 0; i < n; ++i) {
        const auto& p = ranking.pairs[i];
        out << p.symbol_x << ',' << p.symbol_y << ',' << p.result.beta << ',' << p.result.statistic << ','
            << p.result.p_value << ',' << p.result.lags << '\n';
    }
    if (!out) fail(ErrorCode::IoError, "failed writing " + path.string());
}

PairRanking cmd_select_pairs(const ExperimentConfig& cfg, std::size_t top, std::ostream& log) {
    const auto universe = load_universe(cfg);
    const DateRange fit = fit_range_for(cfg, universe);
    PairRanking ranking = rank_pairs(universe, fit);
    for (const auto& w : ranking.warnings) log << "warning: " << w << '\n';
    ensure_dir(cfg.output);
    write_pairs_csv(cfg.output / "pairs.csv", ranking, top);
    if (top > 0 && ranking.pairs.size() > top) ranking.pairs.resize(top);
    return ranking;
}

std::uint64_t rolling_seed(std::uint64_t seed, int rolling_index) {
    // splitmix64 finalizer over the combined words
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    return mix(mix(seed) ^ static_cast<std::uint64_t>(rolling_index));
}

namespace {

std::string rolling_dir_name(int index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "rolling_%02d", index);
    return buf;
}

std::size_t days_in(const PairSeries& pair, const DateRange& range) {
    const auto [lo, hi] = pair.index_range(range);
    if (lo == PairSeries::npos) fail(ErrorCode::RangeOutOfBounds, "no trading days in " + format_range(range));
    return hi - lo + 1;
}

double validation_score(const Rollout& r, const MetricsConfig& m) {
    try {
        return sharpe_ratio(r.returns, m);
    } catch (const Error&) {
        return 0.0;
    }
}

}  // namespace

RollingOutcome run_rolling(const ExperimentConfig& cfg, const PairSeries& pair, const RollingSplit& split) {
    RollingOutcome out;
    RollingReport& rep = out.report;
    rep.index = split.index;
    rep.train = split.train;
    rep.validation = split.validation;
    rep.test = split.test;
    rep.trace_path = rolling_dir_name(split.index) + "/trace.csv";

    const NormalizedPrices features = log_normalize(pair, split.train);
    Rollout rollout;
    switch (cfg.method) {
    case Method::BahLong:
    case Method::BahShort: {
        const Action dir = cfg.method == Method::BahLong ? Action::Long : Action::Short;
        rollout = replay_actions(pair, features, split.test, bah_policy(dir, days_in(pair, split.test)), cfg.env);
        break;
    }
    case Method::Cpm: {
        const SpreadModel model = fit_spread(pair, split.train);
        rollout = replay_actions(pair, features, split.test, cpm_policy(pair, split.test, model, cfg.cpm), cfg.env);
        break;
    }
    default: {
        AgentConfig agent = cfg.agent;
        agent.seed = rolling_seed(cfg.seed, split.index);
        std::vector<double> alphas = cfg.alpha_grid;
        if (alphas.empty() || agent.reward.mode != RewardMode::RiskAware) alphas = {agent.reward.alpha};
        double best = -std::numeric_limits<double>::infinity();
        for (double alpha : alphas) {
            agent.reward.alpha = alpha;
            TrainResult trained = train(split, pair, features, agent, cfg.env);
            double score = 0.0;
            if (alphas.size() > 1) {
                score = validation_score(evaluate(trained.params, split.validation, pair, features, cfg.env), cfg.metrics);
            }
            if (score > best) {
                best = score;
                out.params = trained.params;
                out.training_log = std::move(trained.log);
            }
        }
        rollout = evaluate(*out.params, split.test, pair, features, cfg.env);
        break;
    }
    }
    rep.metrics = compute_metrics(rollout, cfg.metrics);
    rep.actions.reserve(rollout.actions.size());
    for (Action a : rollout.actions) rep.actions.push_back(position(a));
    rep.equity = rollout.equity;
    out.trace = std::move(rollout.trace);
    return out;
}

namespace {

PairSeries select_pair(const ExperimentConfig& cfg, std::ostream& log, std::string& data_digest) {
    const auto universe = load_universe(cfg);
    for (const auto& sym : cfg.universe) {
        std::ifstream in(cfg.data_dir / (sym + ".csv"), std::ios::binary);
        std::ostringstream buf;
        buf << in.rdbuf();
        data_digest += sym + ":" + hex64(fnv1a64(buf.str())) + ";";
    }
    auto find = [&](const std::string& sym) -> const AssetSeries& {
        for (const auto& s : universe) {
            if (s.symbol() == sym) return s;
        }
        fail(ErrorCode::ConfigError, "symbol " + sym + " is not in the universe");
    };
    if (!cfg.auto_pair) return align_pair(find(cfg.pair_x), find(cfg.pair_y));
    const PairRanking ranking = rank_pairs(universe, fit_range_for(cfg, universe));
    for (const auto& w : ranking.warnings) log << "warning: " << w << '\n';
    if (ranking.pairs.empty()) fail(ErrorCode::InsufficientOverlap, "no candidate pair could be tested");
    const RankedPair& best = ranking.pairs.front();
    log << "selected pair " << best.symbol_x << '/' << best.symbol_y << " (p=" << best.result.p_value << ")\n";
    return align_pair(find(best.symbol_x), find(best.symbol_y));
}

}  // namespace

BacktestReport cmd_run(const ExperimentConfig& cfg, std::ostream& log) {
    std::string digest;
    const PairSeries pair = select_pair(cfg, log, digest);
    const std::string hash = hex64(fnv1a64(cfg.hash + "|" + digest));
    const std::vector<RollingSplit> splits = make_rollings(pair, cfg.rolling);
    ensure_dir(cfg.output);

    std::vector<RollingReport> reports(splits.size());
    std::atomic<std::size_t> next{0};
    std::mutex log_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < splits.size(); i = next++) {
            const RollingSplit& split = splits[i];
            const fs::path dir = cfg.output / rolling_dir_name(split.index);
            try {
                ensure_dir(dir);
                RollingOutcome o = run_rolling(cfg, pair, split);
                write_trace_csv(dir / "trace.csv", o.trace);
                if (o.params) {
                    write_training_log(dir / "training_log.csv", o.training_log);
                    nn::save_checkpoint(dir / "checkpoint.json", *o.params);
                }
                reports[i] = std::move(o.report);
                std::lock_guard lock(log_mutex);
                log << "rolling " << split.index << " (" << format_range(split.test) << "): SR "
                    << reports[i].metrics.sr << ", AR " << reports[i].metrics.ar << '\n';
            } catch (const std::exception& e) {
                RollingReport& r = reports[i];
                r = RollingReport{};
                r.index = split.index;
                r.ok = false;
                r.failure = e.what();
                r.train = split.train;
                r.validation = split.validation;
                r.test = split.test;
                std::lock_guard lock(log_mutex);
                log << "rolling " << split.index << " failed: " << e.what() << '\n';
            }
        }
    };
    const std::size_t n_workers = std::min<std::size_t>(static_cast<std::size_t>(cfg.workers), splits.size());
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < n_workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    BacktestReport report = aggregate(hash, to_string(cfg.method), std::move(reports));
    render_report(report, cfg.output);
    std::ofstream resolved(cfg.output / "config.resolved.json", std::ios::binary);
    resolved << cfg.resolved.dump(2) << '\n';
    return report;
}

BacktestReport cmd_report(const fs::path& report_json, const fs::path& out_dir) {
    BacktestReport report = load_report(report_json);
    render_report(report, out_dir);
    return report;
}

}  // namespace spreadq
