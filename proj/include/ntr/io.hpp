#pragma once

#include "ntr/decomposition.hpp"
#include "ntr/tensor.hpp"

#include <json.hpp>

#include <fstream>
#include <stdexcept>
#include <string>

namespace ntr {

using json = nlohmann::json;

inline json to_json(const Tensor& t) {
    return json{{"shape", t.shape().dims()}, {"data", t.data()}, {"nonneg", t.nonneg()}};
}

inline Tensor tensor_from_json(const json& j) {
    if (!j.contains("shape") || !j.contains("data"))
        throw std::runtime_error("tensor JSON: missing \"shape\" or \"data\"");
    Shape shape(j.at("shape").get<std::vector<int>>());
    auto data = j.at("data").get<std::vector<double>>();
    const bool nonneg = j.value("nonneg", false);
    Tensor t(shape, std::move(data), nonneg);
    if (nonneg && !t.entries_nonneg())
        throw std::runtime_error("tensor JSON: nonneg flag set but data has negative entries");
    return t;
}

inline json to_json(const Decomposition& d) {
    json terms = json::array();
    for (const auto& term : d.terms) {
        json factors = json::array();
        for (const auto& f : term.factors)
            factors.push_back(std::vector<double>(f.data(), f.data() + f.size()));
        terms.push_back(json{{"factors", factors}});
    }
    return json{{"shape", d.shape.dims()}, {"mode", to_string(d.mode)}, {"terms", terms}};
}

inline Decomposition decomposition_from_json(const json& j) {
    if (!j.contains("shape") || !j.contains("terms"))
        throw std::runtime_error("decomposition JSON: missing \"shape\" or \"terms\"");
    Shape shape(j.at("shape").get<std::vector<int>>());
    const std::string mode_s = j.value("mode", "nonnegative");
    DecompMode mode;
    if (mode_s == "real")
        mode = DecompMode::real;
    else if (mode_s == "nonnegative")
        mode = DecompMode::nonnegative;
    else
        throw std::runtime_error("decomposition JSON: mode must be \"real\" or \"nonnegative\"");

    Decomposition d{shape, mode, {}};
    for (const auto& jt : j.at("terms")) {
        RankOneTerm term;
        for (const auto& jf : jt.at("factors")) {
            auto v = jf.get<std::vector<double>>();
            term.factors.push_back(Eigen::Map<const Eigen::VectorXd>(v.data(),
                                                                     static_cast<Eigen::Index>(v.size())));
        }
        d.terms.push_back(std::move(term));
    }
    validate(d);
    return d;
}

inline json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    json j;
    in >> j;
    return j;
}

inline Tensor load_tensor(const std::string& path) { return tensor_from_json(load_json_file(path)); }

inline Decomposition load_decomposition(const std::string& path) {
    return decomposition_from_json(load_json_file(path));
}

inline void save_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << j.dump(2) << "\n";
}

} // namespace ntr
