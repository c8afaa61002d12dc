#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "hydrostart/errors.hpp"
#include "hydrostart/sensor.hpp"

namespace hydrostart {

inline constexpr int kEnsembleSchemaVersion = 1;

inline nlohmann::json ensemble_to_json(const SensorEnsemble& e) {
    nlohmann::json j;
    j["schema_version"] = kEnsembleSchemaVersion;
    j["kind"] = "sensor_ensemble";
    j["config_hash"] = config_hash(e.config);
    j["config"] = {{"epochs", e.config.epochs},
                   {"learning_rate", e.config.learning_rate},
                   {"batch_size", e.config.batch_size},
                   {"beta", e.config.beta},
                   {"adam_beta1", e.config.adam_beta1},
                   {"adam_beta2", e.config.adam_beta2},
                   {"adam_eps", e.config.adam_eps},
                   {"sigma_min", e.config.sigma_min},
                   {"bn_momentum", e.config.bn_momentum},
                   {"bn_eps", e.config.bn_eps},
                   {"seed", e.config.seed}};
    j["normalization"] = {{"in_mean", e.norm.in_mean},
                          {"in_std", e.norm.in_std},
                          {"t_mean", e.norm.t_mean},
                          {"t_std", e.norm.t_std}};
    j["members"] = nlohmann::json::array();
    for (const auto& m : e.members) {
        nlohmann::json jm;
        jm["seed"] = m.seed;
        jm["params"] = m.params;
        jm["run_mean"] = {m.run_mean[0], m.run_mean[1]};
        jm["run_var"] = {m.run_var[0], m.run_var[1]};
        jm["stats_ready"] = m.stats_ready;
        j["members"].push_back(std::move(jm));
    }
    return j;
}

inline SensorEnsemble ensemble_from_json(const nlohmann::json& j) {
    if (!j.contains("schema_version") || j["schema_version"].get<int>() != kEnsembleSchemaVersion)
        throw StateVersionMismatch("ensemble checkpoint schema version mismatch");
    SensorEnsemble e;
    const auto& jc = j.at("config");
    e.config.epochs = jc.at("epochs").get<int>();
    e.config.learning_rate = jc.at("learning_rate").get<double>();
    e.config.batch_size = jc.at("batch_size").get<int>();
    e.config.beta = jc.at("beta").get<double>();
    e.config.adam_beta1 = jc.at("adam_beta1").get<double>();
    e.config.adam_beta2 = jc.at("adam_beta2").get<double>();
    e.config.adam_eps = jc.at("adam_eps").get<double>();
    e.config.sigma_min = jc.at("sigma_min").get<double>();
    e.config.bn_momentum = jc.at("bn_momentum").get<double>();
    e.config.bn_eps = jc.at("bn_eps").get<double>();
    e.config.seed = jc.at("seed").get<uint64_t>();
    const auto& jn = j.at("normalization");
    jn.at("in_mean").get_to(e.norm.in_mean);
    jn.at("in_std").get_to(e.norm.in_std);
    jn.at("t_mean").get_to(e.norm.t_mean);
    jn.at("t_std").get_to(e.norm.t_std);
    for (const auto& jm : j.at("members")) {
        SensorNet m;
        m.seed = jm.at("seed").get<uint64_t>();
        jm.at("params").get_to(m.params);
        if (m.params.size() != static_cast<size_t>(nn::kParamCount))
            throw ValidationError("ensemble checkpoint: wrong parameter count");
        jm.at("run_mean")[0].get_to(m.run_mean[0]);
        jm.at("run_mean")[1].get_to(m.run_mean[1]);
        jm.at("run_var")[0].get_to(m.run_var[0]);
        jm.at("run_var")[1].get_to(m.run_var[1]);
        m.stats_ready = jm.at("stats_ready").get<bool>();
        m.sigma_min = e.config.sigma_min;
        m.bn_eps = e.config.bn_eps;
        m.norm = e.norm;
        e.members.push_back(std::move(m));
    }
    return e;
}

inline void save_ensemble(const SensorEnsemble& e, const std::string& path) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw ValidationError("cannot write ensemble checkpoint '" + path + "'");
        out << ensemble_to_json(e).dump(2) << '\n';
    }
    std::filesystem::rename(tmp, path);
}

inline SensorEnsemble load_ensemble(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open ensemble checkpoint '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& ex) {
        throw ValidationError(std::string("bad ensemble checkpoint: ") + ex.what());
    }
    return ensemble_from_json(j);
}

}  // namespace hydrostart
