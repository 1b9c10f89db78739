#pragma once

#include <Eigen/Dense>
#include <json.hpp>

#include <stdexcept>

namespace copodual {

using json = nlohmann::ordered_json;

inline json matrix_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

/// Accepts either nested rows [[..],[..]] or a flat row-major array.
inline Eigen::MatrixXd matrix_from_json(const json& j, Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXd m(rows, cols);
    if (!j.is_array()) throw std::invalid_argument("matrix: array expected");
    if (!j.empty() && j.front().is_array()) {
        if (static_cast<Eigen::Index>(j.size()) != rows) {
            throw std::invalid_argument("matrix: row count mismatch");
        }
        for (Eigen::Index i = 0; i < rows; ++i) {
            const auto& row = j[static_cast<size_t>(i)];
            if (static_cast<Eigen::Index>(row.size()) != cols) {
                throw std::invalid_argument("matrix: column count mismatch");
            }
            for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = row[static_cast<size_t>(c)].get<double>();
        }
    } else {
        if (static_cast<Eigen::Index>(j.size()) != rows * cols) {
            throw std::invalid_argument("matrix: size mismatch");
        }
        for (Eigen::Index i = 0; i < rows; ++i) {
            for (Eigen::Index c = 0; c < cols; ++c) {
                m(i, c) = j[static_cast<size_t>(i * cols + c)].get<double>();
            }
        }
    }
    return m;
}

inline json vector_to_json(const Eigen::VectorXd& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

inline Eigen::VectorXd vector_from_json(const json& j) {
    if (!j.is_array()) throw std::invalid_argument("vector: array expected");
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = j[static_cast<size_t>(i)].get<double>();
    return v;
}

} // namespace copodual
