#include "equiloc/model/checkpoint.hpp"

#include "equiloc/error.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace equiloc::model {

using nlohmann::json;

namespace {

json stack_to_json(const ConvStack& stack) {
    json layers = json::array();
    for (std::size_t i = 0; i < stack.size(); ++i) {
        const Layer& l = stack.layer(i);
        json j;
        j["in_channels"] = l.spec.in_channels;
        j["out_channels"] = l.spec.out_channels;
        j["kernel_size"] = l.spec.kernel_size;
        j["weights"] = std::vector<double>(l.conv.weights.values().begin(), l.conv.weights.values().end());
        j["bias"] = l.conv.bias;
        if (l.bn) {
            j["batchnorm"] = {{"gamma", l.bn->gamma},
                              {"beta", l.bn->beta},
                              {"running_mean", l.bn->running_mean},
                              {"running_var", l.bn->running_var},
                              {"momentum", l.bn->momentum},
                              {"eps", l.bn->eps}};
        }
        layers.push_back(std::move(j));
    }
    return layers;
}

NetworkSpec spec_from_json(const json& layers) {
    NetworkSpec spec;
    for (const auto& j : layers) {
        spec.layers.push_back({j.at("in_channels").get<std::size_t>(), j.at("out_channels").get<std::size_t>(),
                               j.at("kernel_size").get<std::size_t>()});
    }
    return spec;
}

void load_stack(ConvStack& stack, const json& layers) {
    for (std::size_t i = 0; i < stack.size(); ++i) {
        Layer& l = stack.layer(i);
        const json& j = layers.at(i);
        auto w = j.at("weights").get<std::vector<double>>();
        if (w.size() != l.conv.weights.size())
            throw ShapeError("weight count", l.conv.weights.size(), w.size(), "checkpoint layer " + std::to_string(i));
        l.conv.weights = nd::Tensor4(l.spec.weight_shape(), std::move(w));
        l.conv.bias = j.at("bias").get<std::vector<double>>();
        if (l.bn) {
            const json& b = j.at("batchnorm");
            l.bn->gamma = b.at("gamma").get<std::vector<double>>();
            l.bn->beta = b.at("beta").get<std::vector<double>>();
            l.bn->running_mean = b.at("running_mean").get<std::vector<double>>();
            l.bn->running_var = b.at("running_var").get<std::vector<double>>();
            l.bn->momentum = b.at("momentum").get<double>();
            l.bn->eps = b.at("eps").get<double>();
        }
    }
    stack.zero_grad();
}

}  // namespace

std::string checkpoint_to_string(const Autoencoder& model) {
    json doc;
    doc["format"] = "equiloc-checkpoint";
    doc["version"] = kCheckpointVersion;
    doc["height"] = model.height();
    doc["width"] = model.width();
    doc["seed"] = model.seed();
    doc["temperature"] = model.softargmax_config().temperature;
    doc["sigma_g"] = model.render_config().sigma;
    doc["encoder"] = stack_to_json(model.encoder());
    doc["decoder"] = stack_to_json(model.decoder());
    return doc.dump();
}

Autoencoder checkpoint_from_string(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw DomainError(std::string("checkpoint: malformed JSON: ") + e.what());
    }
    try {
        if (doc.at("format") != "equiloc-checkpoint") throw DomainError("checkpoint: unknown format");
        const int version = doc.at("version").get<int>();
        if (version != kCheckpointVersion)
            throw DomainError("checkpoint: unsupported version " + std::to_string(version));
        Autoencoder model(spec_from_json(doc.at("encoder")), spec_from_json(doc.at("decoder")),
                          doc.at("height").get<std::size_t>(), doc.at("width").get<std::size_t>(),
                          {doc.at("temperature").get<double>()}, {doc.at("sigma_g").get<double>()},
                          doc.at("seed").get<std::uint64_t>());
        load_stack(model.encoder(), doc.at("encoder"));
        load_stack(model.decoder(), doc.at("decoder"));
        return model;
    } catch (const json::exception& e) {
        throw DomainError(std::string("checkpoint: missing or invalid field: ") + e.what());
    }
}

void save_checkpoint(const Autoencoder& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError(path, "cannot open checkpoint for writing");
    out << checkpoint_to_string(model);
    if (!out) throw IoError(path, "write failed");
}

Autoencoder load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path, "cannot open checkpoint");
    std::ostringstream ss;
    ss << in.rdbuf();
    return checkpoint_from_string(ss.str());
}

}  // namespace equiloc::model
