#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "model.hpp"

namespace campbell {

namespace detail {

inline RealMatrix matrix_from_json(const nlohmann::json& j, std::size_t dim, const char* name) {
    auto fail = [&](const std::string& why) { throw invalid_argument(std::string("model file: ") + name + " " + why); };
    if (!j.is_array()) fail("must be an array");
    RealMatrix m(dim, dim);
    if (j.size() == dim * dim && (dim == 0 || !j.front().is_array())) {
        for (std::size_t k = 0; k < dim * dim; ++k) {
            if (!j[k].is_number()) fail("has a non-numeric entry");
            m(k / dim, k % dim) = j[k].get<double>();
        }
        return m;
    }
    if (j.size() != dim) fail("must have 2n rows");
    for (std::size_t i = 0; i < dim; ++i) {
        const auto& row = j[i];
        if (!row.is_array() || row.size() != dim) fail("must have 2n columns in every row");
        for (std::size_t k = 0; k < dim; ++k) {
            if (!row[k].is_number()) fail("has a non-numeric entry");
            m(i, k) = row[k].get<double>();
        }
    }
    return m;
}

inline nlohmann::json matrix_to_json(const RealMatrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace detail

// Missing matrices default to zero, missing scales to 0.
inline RotorModel model_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw invalid_argument("model file: top level must be an object");
    if (!j.contains("omegas") || !j["omegas"].is_array()) throw invalid_argument("model file: omegas array required");
    std::vector<double> omegas;
    for (const auto& v : j["omegas"]) {
        if (!v.is_number()) throw invalid_argument("model file: omegas must be numbers");
        omegas.push_back(v.get<double>());
    }
    RotorModel m = unperturbed_model(omegas);
    if (j.contains("n")) {
        if (!j["n"].is_number_integer() || j["n"].get<long long>() != static_cast<long long>(m.n))
            throw invalid_argument("model file: n does not match the number of omegas");
    }
    const std::size_t dim = 2 * m.n;
    if (j.contains("D")) m.D = detail::matrix_from_json(j["D"], dim, "D");
    if (j.contains("K")) m.K = detail::matrix_from_json(j["K"], dim, "K");
    if (j.contains("N")) m.N = detail::matrix_from_json(j["N"], dim, "N");
    auto scale = [&](const char* key) {
        if (!j.contains(key)) return 0.0;
        if (!j[key].is_number()) throw invalid_argument(std::string("model file: ") + key + " must be a number");
        return j[key].get<double>();
    };
    m.scales = {scale("delta"), scale("kappa"), scale("nu")};
    validate(m);
    return m;
}

inline nlohmann::json model_to_json(const RotorModel& m) {
    nlohmann::json j;
    j["n"] = m.n;
    j["omegas"] = m.omegas;
    j["delta"] = m.scales.delta;
    j["kappa"] = m.scales.kappa;
    j["nu"] = m.scales.nu;
    j["D"] = detail::matrix_to_json(m.D);
    j["K"] = detail::matrix_to_json(m.K);
    j["N"] = detail::matrix_to_json(m.N);
    return j;
}

inline RotorModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw invalid_argument("cannot open model file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw invalid_argument("model file " + path + ": " + e.what());
    }
    return model_from_json(j);
}

inline void save_model(const RotorModel& m, const std::string& path) {
    validate(m);
    std::ofstream out(path);
    if (!out) throw invalid_argument("cannot write model file: " + path);
    out << model_to_json(m).dump(2) << '\n';
    if (!out) throw invalid_argument("write failed: " + path);
}

}  // namespace campbell
