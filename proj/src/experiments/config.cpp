#include "equiloc/experiments/config.hpp"

#include "equiloc/error.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace equiloc::experiments {

using nlohmann::json;

namespace {

template <typename T>
void read_if(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

SweepConfig sweep_config_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw DomainError(std::string("config: malformed JSON: ") + e.what());
    }
    try {
        if (!j.is_object()) throw DomainError("config: top level must be an object");
        const std::string mode = j.value("mode", "desk");
        if (mode != "desk" && mode != "paper") throw DomainError("config: mode must be \"desk\" or \"paper\"");
        const bounds::Vary vary = bounds::parse_vary(j.value("vary", "enc-rf"));
        SweepConfig c = mode == "paper" ? SweepConfig::paper(vary) : SweepConfig::desk(vary);

        read_if(j, "values", c.values);
        if (j.contains("fixed")) {
            const json& f = j.at("fixed");
            read_if(f, "s_psi", c.fixed.s_psi);
            read_if(f, "s_phi", c.fixed.s_phi);
            read_if(f, "s_o", c.fixed.s_o);
            read_if(f, "sigma_g", c.fixed.sigma_g);
            read_if(f, "n_sigma", c.fixed.n_sigma);
        }
        read_if(j, "seeds", c.seeds);
        read_if(j, "master_seed", c.master_seed);
        read_if(j, "s_img", c.s_img);
        read_if(j, "min_positions", c.min_positions);
        read_if(j, "s_pad", c.s_pad);
        read_if(j, "channels", c.channels);
        read_if(j, "n_layers", c.n_layers);
        read_if(j, "temperature", c.temperature);
        if (j.contains("train")) {
            const json& t = j.at("train");
            read_if(t, "epochs", c.train.epochs);
            read_if(t, "batch_size", c.train.batch_size);
            read_if(t, "learning_rate", c.train.learning_rate);
            read_if(t, "success_threshold", c.train.success_threshold);
            read_if(t, "eps_px", c.train.eps_px);
        }
        return c;
    } catch (const json::exception& e) {
        throw DomainError(std::string("config: invalid field: ") + e.what());
    }
}

std::string sweep_config_to_json(const SweepConfig& c) {
    json j;
    j["vary"] = bounds::to_string(c.vary);
    j["values"] = c.values;
    j["fixed"] = {{"s_psi", c.fixed.s_psi},
                  {"s_phi", c.fixed.s_phi},
                  {"s_o", c.fixed.s_o},
                  {"sigma_g", c.fixed.sigma_g},
                  {"n_sigma", c.fixed.n_sigma}};
    j["seeds"] = c.seeds;
    j["master_seed"] = c.master_seed;
    j["s_img"] = c.s_img;
    j["min_positions"] = c.min_positions;
    j["s_pad"] = c.s_pad;
    j["channels"] = c.channels;
    j["n_layers"] = c.n_layers;
    j["temperature"] = c.temperature;
    j["train"] = {{"epochs", c.train.epochs},
                  {"batch_size", c.train.batch_size},
                  {"learning_rate", c.train.learning_rate},
                  {"success_threshold", c.train.success_threshold},
                  {"eps_px", c.train.eps_px}};
    return j.dump(2);
}

SweepConfig load_sweep_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path, "cannot open config");
    std::ostringstream ss;
    ss << in.rdbuf();
    return sweep_config_from_json(ss.str());
}

}  // namespace equiloc::experiments
