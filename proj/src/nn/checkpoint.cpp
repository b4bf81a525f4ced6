#include "spreadq/nn/checkpoint.hpp"

#include <fstream>

#include <json.hpp>

#include "spreadq/error.hpp"

namespace spreadq::nn {

using nlohmann::json;

namespace {

constexpr int kVersion = 1;

json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::MissingFile, "cannot open checkpoint " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        fail(ErrorCode::IoError, "checkpoint " + path.string() + " is not valid JSON: " + e.what());
    }
}

ModelConfig config_from(const json& j) {
    ModelConfig cfg;
    cfg.embed_dim = j.at("embed_dim").get<int>();
    cfg.hidden_dim = j.at("hidden_dim").get<int>();
    cfg.head_hidden = j.at("head_hidden").get<int>();
    cfg.encoder = parse_encoder(j.at("encoder").get<std::string>());
    return cfg;
}

void fill(const json& doc, QNetwork& net) {
    if (doc.value("format", "") != "spreadq-qnet" || doc.value("version", 0) != kVersion) {
        fail(ErrorCode::IoError, "unsupported checkpoint format or version");
    }
    const auto& params = doc.at("params");
    const auto& blocks = net.layout().blocks();
    if (params.size() != blocks.size()) fail(ErrorCode::ShapeMismatch, "checkpoint block count differs");
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        const auto& p = params[i];
        const auto& b = blocks[i];
        if (p.at("name").get<std::string>() != b.name || p.at("rows").get<Eigen::Index>() != b.rows ||
            p.at("cols").get<Eigen::Index>() != b.cols) {
            fail(ErrorCode::ShapeMismatch, "checkpoint block " + p.at("name").get<std::string>() +
                                               " does not match expected " + b.name);
        }
        const auto& values = p.at("values");
        if (static_cast<Eigen::Index>(values.size()) != b.size()) {
            fail(ErrorCode::ShapeMismatch, "checkpoint block " + b.name + " has wrong value count");
        }
        for (Eigen::Index k = 0; k < b.size(); ++k) {
            net.params()(b.offset + k) = values[static_cast<std::size_t>(k)].get<double>();
        }
    }
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const QNetwork& net) {
    json doc;
    doc["format"] = "spreadq-qnet";
    doc["version"] = kVersion;
    const auto& cfg = net.config();
    doc["config"] = {{"embed_dim", cfg.embed_dim},
                     {"hidden_dim", cfg.hidden_dim},
                     {"head_hidden", cfg.head_hidden},
                     {"encoder", to_string(cfg.encoder)}};
    json params = json::array();
    for (const auto& b : net.layout().blocks()) {
        std::vector<double> values(net.params().data() + b.offset, net.params().data() + b.offset + b.size());
        params.push_back({{"name", b.name}, {"rows", b.rows}, {"cols", b.cols}, {"values", values}});
    }
    doc["params"] = std::move(params);
    std::ofstream out(path);
    if (!out) fail(ErrorCode::IoError, "cannot write checkpoint " + path.string());
    out << doc.dump() << '\n';
    if (!out) fail(ErrorCode::IoError, "write failed for checkpoint " + path.string());
}

QNetwork load_checkpoint(const std::filesystem::path& path) {
    const json doc = read_json(path);
    QNetwork net(config_from(doc.at("config")));
    fill(doc, net);
    return net;
}

void load_checkpoint_into(const std::filesystem::path& path, QNetwork& net) {
    const json doc = read_json(path);
    if (config_from(doc.at("config")) != net.config()) {
        fail(ErrorCode::ShapeMismatch, "checkpoint model configuration differs from target network");
    }
    fill(doc, net);
}

}  // namespace spreadq::nn
