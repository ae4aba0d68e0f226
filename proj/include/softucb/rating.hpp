#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "softucb/csv.hpp"
#include "softucb/env.hpp"
#include "softucb/rng.hpp"

namespace softucb {

// Users-by-items ratings with an observed-entry mask. Masked-out cells hold
// zero and are ignored by every statistic.
struct RatingMatrix {
    Eigen::MatrixXd values;
    Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> mask;

    long rows() const { return values.rows(); }
    long cols() const { return values.cols(); }
    bool observed(long i, long j) const { return mask(i, j) != 0; }
    bool fully_observed() const { return mask.minCoeff() != 0; }
    long observed_count() const { return static_cast<long>(mask.cast<long>().sum()); }
};

// CSV layout: header row, one row per user, missing ratings as empty fields.
inline RatingMatrix read_rating_csv(const std::string& path) {
    const CsvTable table = read_csv(path);
    const long cols = static_cast<long>(table.header.size());
    const long rows = static_cast<long>(table.rows.size());
    if (rows == 0) throw std::runtime_error(path + ": no data rows");

    RatingMatrix matrix;
    matrix.values = Eigen::MatrixXd::Zero(rows, cols);
    matrix.mask.setZero(rows, cols);
    for (long i = 0; i < rows; ++i) {
        const auto& fields = table.rows[i];
        if (static_cast<long>(fields.size()) != cols)
            throw std::runtime_error(path + ": row " + std::to_string(i + 1) + " has " +
                                     std::to_string(fields.size()) + " fields, expected " +
                                     std::to_string(cols));
        for (long j = 0; j < cols; ++j) {
            const std::string& cell = fields[j];
            if (cell.empty()) continue;
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str() || *end != '\0' || !std::isfinite(v))
                throw std::runtime_error(path + ": row " + std::to_string(i + 1) + ", column " +
                                         std::to_string(j + 1) + ": invalid rating '" + cell +
                                         "'");
            matrix.values(i, j) = v;
            matrix.mask(i, j) = 1;
        }
    }
    return matrix;
}

inline void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& matrix,
                             const std::string& column_prefix) {
    std::vector<std::string> header;
    header.reserve(matrix.cols());
    for (long j = 0; j < matrix.cols(); ++j)
        header.push_back(column_prefix + std::to_string(j));
    CsvWriter writer(path, header);
    std::vector<std::string> row(matrix.cols());
    for (long i = 0; i < matrix.rows(); ++i) {
        for (long j = 0; j < matrix.cols(); ++j) row[j] = format_double(matrix(i, j));
        writer.row(row);
    }
}

struct PcaResult {
    Eigen::MatrixXd features;    // rows projected onto the top components
    Eigen::MatrixXd components;  // columns are the principal directions
    Eigen::RowVectorXd column_means;
    Eigen::VectorXd singular_values;

    double captured_variance(int top) const {
        return singular_values.head(top).squaredNorm();
    }
    double total_variance() const { return singular_values.squaredNorm(); }
};

// Column-centered projection onto the top-d right singular directions.
// Sign convention: each component's largest-magnitude coordinate is made
// positive, so the decomposition is deterministic.
inline PcaResult pca_reduce(const Eigen::MatrixXd& data, int target_dim) {
    if (target_dim < 1) throw std::invalid_argument("pca_reduce: target dimension must be >= 1");
    if (target_dim > std::min(data.rows(), data.cols()))
        throw std::invalid_argument("pca_reduce: target dimension exceeds min(rows, cols)");
    if (!data.allFinite()) throw std::invalid_argument("pca_reduce: non-finite input");

    PcaResult out;
    out.column_means = data.colwise().mean();
    const Eigen::MatrixXd centered = data.rowwise() - out.column_means;

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinU | Eigen::ComputeThinV);
    out.singular_values = svd.singularValues();
    Eigen::MatrixXd components = svd.matrixV().leftCols(target_dim);
    for (int k = 0; k < target_dim; ++k) {
        int pivot = 0;
        components.col(k).cwiseAbs().maxCoeff(&pivot);
        if (components(pivot, k) < 0.0) components.col(k) = -components.col(k);
    }
    out.components = std::move(components);
    out.features = centered * out.components;
    return out;
}

inline PcaResult pca_reduce(const RatingMatrix& matrix, int target_dim) {
    if (!matrix.fully_observed())
        throw std::invalid_argument("pca_reduce: matrix has missing entries; impute first");
    return pca_reduce(matrix.values, target_dim);
}

struct ImputeResult {
    Eigen::MatrixXd completed;          // observed cells keep their original values
    std::vector<double> rmse_history;   // observed-entry RMSE after each sweep
};

namespace detail {

inline double observed_rmse(const RatingMatrix& matrix, const Eigen::MatrixXd& user_factors,
                            const Eigen::MatrixXd& item_factors) {
    double sum_sq = 0.0;
    long count = 0;
    for (long i = 0; i < matrix.rows(); ++i) {
        for (long j = 0; j < matrix.cols(); ++j) {
            if (!matrix.observed(i, j)) continue;
            const double err = matrix.values(i, j) - user_factors.row(i).dot(item_factors.row(j));
            sum_sq += err * err;
            ++count;
        }
    }
    return std::sqrt(sum_sq / static_cast<double>(count));
}

}  // namespace detail

// Alternating least squares at the given rank with ridge regularization and
// a fixed sweep count. Seeded initialization keeps the zero-iteration case
// deterministic.
inline ImputeResult factorize_impute(const RatingMatrix& matrix, int rank,
                                     double regularization, int iterations,
                                     std::uint64_t seed) {
    if (rank < 1) throw std::invalid_argument("factorize_impute: rank must be >= 1");
    if (!(regularization >= 0.0))
        throw std::invalid_argument("factorize_impute: regularization must be >= 0");
    if (iterations < 0) throw std::invalid_argument("factorize_impute: iterations must be >= 0");

    const long rows = matrix.rows();
    const long cols = matrix.cols();
    for (long i = 0; i < rows; ++i)
        if (matrix.mask.row(i).maxCoeff() == 0)
            throw std::invalid_argument("factorize_impute: row " + std::to_string(i + 1) +
                                        " has no observed entries");
    for (long j = 0; j < cols; ++j)
        if (matrix.mask.col(j).maxCoeff() == 0)
            throw std::invalid_argument("factorize_impute: column " + std::to_string(j + 1) +
                                        " has no observed entries");

    Rng rng(seed);
    const double init_scale = 0.1 / std::sqrt(static_cast<double>(rank));
    Eigen::MatrixXd user_factors(rows, rank);
    Eigen::MatrixXd item_factors(cols, rank);
    for (long i = 0; i < rows; ++i)
        for (int k = 0; k < rank; ++k) user_factors(i, k) = init_scale * rng.normal();
    for (long j = 0; j < cols; ++j)
        for (int k = 0; k < rank; ++k) item_factors(j, k) = init_scale * rng.normal();

    const Eigen::MatrixXd ridge = regularization * Eigen::MatrixXd::Identity(rank, rank);
    ImputeResult out;
    out.rmse_history.reserve(iterations);

    for (int it = 0; it < iterations; ++it) {
        for (long i = 0; i < rows; ++i) {
            Eigen::MatrixXd normal = ridge;
            Eigen::VectorXd rhs = Eigen::VectorXd::Zero(rank);
            for (long j = 0; j < cols; ++j) {
                if (!matrix.observed(i, j)) continue;
                normal.noalias() +=
                    item_factors.row(j).transpose() * item_factors.row(j);
                rhs.noalias() += item_factors.row(j).transpose() * matrix.values(i, j);
            }
            user_factors.row(i) = normal.ldlt().solve(rhs);
        }
        for (long j = 0; j < cols; ++j) {
            Eigen::MatrixXd normal = ridge;
            Eigen::VectorXd rhs = Eigen::VectorXd::Zero(rank);
            for (long i = 0; i < rows; ++i) {
                if (!matrix.observed(i, j)) continue;
                normal.noalias() +=
                    user_factors.row(i).transpose() * user_factors.row(i);
                rhs.noalias() += user_factors.row(i).transpose() * matrix.values(i, j);
            }
            item_factors.row(j) = normal.ldlt().solve(rhs);
        }
        out.rmse_history.push_back(detail::observed_rmse(matrix, user_factors, item_factors));
    }

    out.completed = user_factors * item_factors.transpose();
    for (long i = 0; i < rows; ++i)
        for (long j = 0; j < cols; ++j)
            if (matrix.observed(i, j)) out.completed(i, j) = matrix.values(i, j);
    return out;
}

// Builds a bandit instance from a completed rating matrix: K sampled users
// become arms, their remaining ratings (top-d principal components,
// unit-normalized) become features, and their rating on the held-out item
// becomes the true mean, min-max rescaled to [0,1] over that column.
inline Environment build_dataset_env(const Eigen::MatrixXd& completed, long held_out_item,
                                     int arm_count, int dim, std::uint64_t seed,
                                     NoiseModel noise = NoiseModel::kGaussian,
                                     double noise_scale = 0.5) {
    if (!completed.allFinite())
        throw std::invalid_argument("build_dataset_env: matrix has non-finite entries");
    if (held_out_item < 0 || held_out_item >= completed.cols())
        throw std::invalid_argument("build_dataset_env: held-out column out of range");
    if (arm_count < 2) throw std::invalid_argument("build_dataset_env: arm_count must be >= 2");
    if (arm_count > completed.rows())
        throw std::invalid_argument("build_dataset_env: arm_count exceeds user count");
    if (completed.cols() < 2)
        throw std::invalid_argument("build_dataset_env: need at least one feature column");

    // Partial Fisher-Yates draw of K distinct users.
    Rng rng(seed);
    std::vector<long> order(completed.rows());
    std::iota(order.begin(), order.end(), 0L);
    for (int i = 0; i < arm_count; ++i) {
        const long j = i + static_cast<long>(rng.uniform_index(order.size() - i));
        std::swap(order[i], order[j]);
    }

    Eigen::MatrixXd raw_features(arm_count, completed.cols() - 1);
    Eigen::VectorXd held_out(arm_count);
    for (int i = 0; i < arm_count; ++i) {
        long dst = 0;
        for (long j = 0; j < completed.cols(); ++j) {
            if (j == held_out_item) continue;
            raw_features(i, dst++) = completed(order[i], j);
        }
        held_out[i] = completed(order[i], held_out_item);
    }

    const PcaResult pca = pca_reduce(raw_features, dim);
    Eigen::MatrixXd features = pca.features;
    for (int i = 0; i < arm_count; ++i) {
        const double norm = features.row(i).norm();
        if (norm > 1e-12) {
            features.row(i) /= norm;
        } else {
            features.row(i).setZero();
            features(i, 0) = 1.0;  // degenerate user; pin to a unit axis
        }
    }

    const double lo = completed.col(held_out_item).minCoeff();
    const double hi = completed.col(held_out_item).maxCoeff();
    Eigen::VectorXd means(arm_count);
    if (hi - lo > 1e-12) {
        means = (held_out.array() - lo) / (hi - lo);
    } else {
        means.setConstant(0.5);  // constant column carries no preference signal
    }

    return make_dataset_environment(std::move(features), std::move(means), noise, noise_scale);
}

}  // namespace softucb
