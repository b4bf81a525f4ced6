#include "spreadq/config.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "spreadq/error.hpp"

namespace spreadq {

using nlohmann::json;

Method parse_method(const std::string& s) {
    if (s == "credit") return Method::Credit;
    if (s == "credit_no_risk") return Method::CreditNoRisk;
    if (s == "credit_no_bigru") return Method::CreditNoBigru;
    if (s == "mlp_rl") return Method::MlpRl;
    if (s == "cpm") return Method::Cpm;
    if (s == "bah_long") return Method::BahLong;
    if (s == "bah_short") return Method::BahShort;
    fail(ErrorCode::ConfigError, "unknown method '" + s + "'");
}

std::string to_string(Method m) {
    switch (m) {
    case Method::Credit: return "credit";
    case Method::CreditNoRisk: return "credit_no_risk";
    case Method::CreditNoBigru: return "credit_no_bigru";
    case Method::MlpRl: return "mlp_rl";
    case Method::Cpm: return "cpm";
    case Method::BahLong: return "bah_long";
    case Method::BahShort: return "bah_short";
    }
    return "?";
}

bool is_learned(Method m) {
    return m == Method::Credit || m == Method::CreditNoRisk || m == Method::CreditNoBigru || m == Method::MlpRl;
}

json default_config() {
    const AgentConfig a;
    const EnvConfig e;
    const RollingSpec r;
    const MetricsConfig m;
    const CpmConfig c;
    return json{
        {"data", {{"dir", "data"}, {"universe", json::array()}}},
        {"pair", "auto"},
        {"selection", {{"fit_first", ""}, {"fit_last", ""}}},
        {"rolling",
         {{"window_months", r.window_months},
          {"stride_months", r.stride_months},
          {"train_months", r.train_months},
          {"validation_months", r.validation_months},
          {"test_months", r.test_months}}},
        {"env", {{"cost", e.cost}, {"window_days", e.window_days}}},
        {"agent",
         {{"gamma", a.gamma},
          {"lr", a.lr},
          {"epsilon_start", a.epsilon.start},
          {"epsilon_end", a.epsilon.end},
          {"epsilon_decay_fraction", a.epsilon.decay_fraction},
          {"target_sync_every", a.target_sync_every},
          {"replay_capacity", a.replay_capacity},
          {"batch", a.batch},
          {"subseq_len", a.subseq_len},
          {"episodes_per_rolling", a.episodes_per_rolling},
          {"episode_days", a.episode_days},
          {"warmup_episodes", a.warmup_episodes},
          {"validate_every", a.validate_every},
          {"reward_scale", a.reward_scale},
          {"grad_clip", a.grad_clip},
          {"embed_dim", a.model.embed_dim},
          {"hidden_dim", a.model.hidden_dim},
          {"head_hidden", a.model.head_hidden}}},
        {"reward", {{"alpha", a.reward.alpha}, {"alpha_grid", {0.1, 0.5, 1.0, 2.0}}}},
        {"metrics", {{"risk_free_daily", m.risk_free_daily}, {"trading_days_per_year", m.trading_days_per_year}}},
        {"cpm", {{"open_threshold", c.open_threshold}, {"stop_threshold", c.stop_threshold}}},
        {"method", "credit"},
        {"seed", 7},
        {"output", "runs/default"},
        {"workers", 1},
    };
}

namespace {

bool same_kind(const json& a, const json& b) {
    if (a.is_number() && b.is_number()) {
        // integer slots reject fractional values
        return !(a.is_number_integer() && b.is_number_float());
    }
    return a.type() == b.type();
}

void merge_into(json& base, const json& user, const std::string& path) {
    for (auto it = user.begin(); it != user.end(); ++it) {
        const std::string key = path.empty() ? it.key() : path + "." + it.key();
        if (!base.contains(it.key())) fail(ErrorCode::ConfigError, "unknown config key '" + key + "'");
        json& slot = base[it.key()];
        if (key == "pair") {
            if (it->is_string() && *it == "auto") {
                slot = *it;
            } else if (it->is_object() && it->size() == 2 && it->contains("x") && it->contains("y") &&
                       (*it)["x"].is_string() && (*it)["y"].is_string()) {
                slot = *it;
            } else {
                fail(ErrorCode::ConfigError, "pair must be \"auto\" or {\"x\": ..., \"y\": ...}");
            }
            continue;
        }
        if (slot.is_object()) {
            if (!it->is_object()) fail(ErrorCode::ConfigError, "config key '" + key + "' must be an object");
            merge_into(slot, *it, key);
            continue;
        }
        if (!same_kind(slot, *it)) fail(ErrorCode::ConfigError, "config key '" + key + "' has the wrong type");
        slot = *it;
    }
}

template <typename T>
T get(const json& tree, const char* section, const char* key) {
    return tree.at(section).at(key).get<T>();
}

std::optional<Date> optional_date(const std::string& s, const char* key) {
    if (s.empty()) return std::nullopt;
    const auto d = parse_date(s);
    if (!d) fail(ErrorCode::ConfigError, std::string(key) + " is not a YYYY-MM-DD date: " + s);
    return d;
}

}  // namespace

json merge_config(const json& user) {
    if (!user.is_object()) fail(ErrorCode::ConfigError, "config root must be an object");
    json tree = default_config();
    merge_into(tree, user, "");
    return tree;
}

void apply_override(json& tree, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) fail(ErrorCode::ConfigError, "override must be key=value: " + assignment);
    const std::string key = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    json value = json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;

    json patch = value;
    std::vector<std::string> parts;
    std::stringstream ss(key);
    for (std::string part; std::getline(ss, part, '.');) parts.push_back(part);
    for (auto it = parts.rbegin(); it != parts.rend(); ++it) patch = json{{*it, patch}};
    json base = default_config();
    merge_into(base, patch, "");  // validates key and type
    json* node = &tree;
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) node = &(*node)[parts[i]];
    (*node)[parts.back()] = value;
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

ExperimentConfig resolve_config(const json& user_tree, const std::filesystem::path& base_dir) {
    const json tree = merge_config(user_tree);
    ExperimentConfig c;
    c.resolved = tree;
    try {
        auto resolve = [&](const std::string& p) {
            std::filesystem::path path(p);
            return path.is_absolute() ? path : base_dir / path;
        };
        c.data_dir = resolve(get<std::string>(tree, "data", "dir"));
        c.universe = tree.at("data").at("universe").get<std::vector<std::string>>();
        const json& pair = tree.at("pair");
        c.auto_pair = pair.is_string();
        if (!c.auto_pair) {
            c.pair_x = pair.at("x").get<std::string>();
            c.pair_y = pair.at("y").get<std::string>();
            if (c.pair_x == c.pair_y) fail(ErrorCode::ConfigError, "pair symbols must differ");
        }
        c.fit_first = optional_date(get<std::string>(tree, "selection", "fit_first"), "selection.fit_first");
        c.fit_last = optional_date(get<std::string>(tree, "selection", "fit_last"), "selection.fit_last");

        c.rolling.window_months = get<int>(tree, "rolling", "window_months");
        c.rolling.stride_months = get<int>(tree, "rolling", "stride_months");
        c.rolling.train_months = get<int>(tree, "rolling", "train_months");
        c.rolling.validation_months = get<int>(tree, "rolling", "validation_months");
        c.rolling.test_months = get<int>(tree, "rolling", "test_months");

        c.env.cost = get<double>(tree, "env", "cost");
        c.env.window_days = get<int>(tree, "env", "window_days");

        AgentConfig& a = c.agent;
        a.gamma = get<double>(tree, "agent", "gamma");
        a.lr = get<double>(tree, "agent", "lr");
        a.epsilon.start = get<double>(tree, "agent", "epsilon_start");
        a.epsilon.end = get<double>(tree, "agent", "epsilon_end");
        a.epsilon.decay_fraction = get<double>(tree, "agent", "epsilon_decay_fraction");
        a.target_sync_every = get<int>(tree, "agent", "target_sync_every");
        a.replay_capacity = get<int>(tree, "agent", "replay_capacity");
        a.batch = get<int>(tree, "agent", "batch");
        a.subseq_len = get<int>(tree, "agent", "subseq_len");
        a.episodes_per_rolling = get<int>(tree, "agent", "episodes_per_rolling");
        a.episode_days = get<int>(tree, "agent", "episode_days");
        a.warmup_episodes = get<int>(tree, "agent", "warmup_episodes");
        a.validate_every = get<int>(tree, "agent", "validate_every");
        a.reward_scale = get<double>(tree, "agent", "reward_scale");
        a.grad_clip = get<double>(tree, "agent", "grad_clip");
        a.model.embed_dim = get<int>(tree, "agent", "embed_dim");
        a.model.hidden_dim = get<int>(tree, "agent", "hidden_dim");
        a.model.head_hidden = get<int>(tree, "agent", "head_hidden");
        a.reward.alpha = get<double>(tree, "reward", "alpha");
        c.alpha_grid = tree.at("reward").at("alpha_grid").get<std::vector<double>>();

        c.metrics.risk_free_daily = get<double>(tree, "metrics", "risk_free_daily");
        c.metrics.trading_days_per_year = get<int>(tree, "metrics", "trading_days_per_year");
        c.cpm.open_threshold = get<double>(tree, "cpm", "open_threshold");
        c.cpm.stop_threshold = get<double>(tree, "cpm", "stop_threshold");

        c.method = parse_method(tree.at("method").get<std::string>());
        const bool bigru = c.method == Method::Credit || c.method == Method::CreditNoRisk;
        const bool risk = c.method == Method::Credit || c.method == Method::CreditNoBigru;
        a.model.encoder = bigru ? nn::EncoderKind::BiGruAttention : nn::EncoderKind::Feedforward;
        a.reward.mode = risk ? RewardMode::RiskAware : RewardMode::ProfitOnly;

        const json& seed = tree.at("seed");
        if (!seed.is_number_integer() || seed.get<long long>() < 0) fail(ErrorCode::ConfigError, "seed must be a non-negative integer");
        c.seed = seed.get<std::uint64_t>();
        a.seed = c.seed;
        c.workers = tree.at("workers").get<int>();

        std::filesystem::path out(tree.at("output").get<std::string>());
        if (const char* root = std::getenv("SPREADQ_OUTPUT_ROOT"); root && *root && out.is_relative()) {
            c.output = std::filesystem::path(root) / out;
        } else {
            c.output = out.is_absolute() ? out : base_dir / out;
        }
    } catch (const json::exception& e) {
        fail(ErrorCode::ConfigError, std::string("invalid config: ") + e.what());
    }

    if (c.workers < 1) fail(ErrorCode::ConfigError, "workers must be >= 1");
    if (c.env.cost < 0.0) fail(ErrorCode::ConfigError, "env.cost must be >= 0");
    if (c.env.window_days < 2) fail(ErrorCode::ConfigError, "env.window_days must be >= 2");
    if (c.metrics.trading_days_per_year <= 0) fail(ErrorCode::ConfigError, "metrics.trading_days_per_year must be > 0");
    for (double alpha : c.alpha_grid) {
        if (!(alpha >= 0.0)) fail(ErrorCode::ConfigError, "reward.alpha_grid entries must be >= 0");
    }
    c.cpm.validate();
    c.agent.validate();
    if (c.auto_pair && c.universe.size() < 2) fail(ErrorCode::ConfigError, "pair \"auto\" needs a universe of >= 2 symbols");
    if (!c.auto_pair && c.universe.empty()) c.universe = {c.pair_x, c.pair_y};

    json hashed = tree;
    hashed.erase("output");
    hashed.erase("workers");
    c.hash = hex64(fnv1a64(hashed.dump()));
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::MissingFile, "cannot open config " + path.string());
    json tree = json::parse(in, nullptr, false, true);
    if (tree.is_discarded()) fail(ErrorCode::ConfigError, path.string() + " is not valid JSON");
    if (!tree.is_object()) fail(ErrorCode::ConfigError, path.string() + ": config root must be an object");
    for (const auto& o : overrides) apply_override(tree, o);
    return resolve_config(tree, path.parent_path());
}

}  // namespace spreadq
