#include "bcmlr/data_model.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace bcmlr {

int ChangepointVector::segment_of(int i) const {
    int j = 1;
    for (int kappa : kappas) {
        if (i <= kappa) break;
        ++j;
    }
    return j;
}

void ChangepointVector::validate() const {
    if (n < 1) {
        throw std::invalid_argument("ChangepointVector: series length must be positive");
    }
    if (min_seg < 1) {
        throw std::invalid_argument("ChangepointVector: min_seg must be >= 1");
    }
    int prev = 0;
    for (int kappa : kappas) {
        if (kappa < 1 || kappa > n - 1) {
            throw std::invalid_argument("ChangepointVector: kappa out of {1, ..., N-1}");
        }
        if (kappa <= prev) {
            throw std::invalid_argument("ChangepointVector: kappas must be strictly increasing");
        }
        if (kappa - prev < min_seg) {
            throw std::invalid_argument("ChangepointVector: segment shorter than min_seg");
        }
        prev = kappa;
    }
    if (n - prev < min_seg) {
        throw std::invalid_argument("ChangepointVector: final segment shorter than min_seg");
    }
}

SeriesMatrix standardize(const SeriesMatrix& x) {
    const Eigen::Index n = x.rows();
    const Eigen::Index p = x.cols();
    if (n == 0 || p == 0) {
        throw std::invalid_argument("standardize: empty matrix");
    }
    if (n < 2) {
        throw std::invalid_argument("standardize: need at least two rows");
    }
    SeriesMatrix out;
    out.column_names = x.column_names;
    out.values = x.values;
    for (Eigen::Index d = 0; d < p; ++d) {
        auto col = out.values.col(d);
        const double mean = col.mean();
        col.array() -= mean;
        const double sd = std::sqrt(col.squaredNorm() / static_cast<double>(n - 1));
        if (sd < 1e-12) {
            out.constant_columns.push_back(static_cast<int>(d));
        } else {
            col /= sd;
        }
    }
    return out;
}

SeriesMatrix poly2_embed(const SeriesMatrix& x) {
    const Eigen::Index n = x.rows();
    const Eigen::Index p = x.cols();
    if (p < 1) {
        throw std::invalid_argument("poly2_embed: need at least one column");
    }
    const Eigen::Index q = 2 * p + p * (p - 1) / 2;
    SeriesMatrix out;
    out.values.resize(n, q);
    out.values.leftCols(p) = x.values;
    out.values.middleCols(p, p) = x.values.array().square();
    Eigen::Index col = 2 * p;
    for (Eigen::Index a = 0; a < p; ++a) {
        for (Eigen::Index b = a + 1; b < p; ++b) {
            out.values.col(col++) = x.values.col(a).cwiseProduct(x.values.col(b));
        }
    }
    return out;
}

SegmentLabels labels_from_kappa(const ChangepointVector& kappa) {
    kappa.validate();
    const int n = kappa.n;
    const int j_count = kappa.num_segments();
    SegmentLabels labels;
    labels.y = Eigen::MatrixXi::Zero(n, j_count);
    for (int i = 1; i <= n; ++i) {
        labels.y(i - 1, kappa.segment_of(i) - 1) = 1;
    }
    return labels;
}

Eigen::VectorXi class_labels(const ChangepointVector& kappa) {
    kappa.validate();
    Eigen::VectorXi out(kappa.n);
    for (int i = 1; i <= kappa.n; ++i) {
        out[i - 1] = kappa.segment_of(i);
    }
    return out;
}

SeriesMatrix read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("read_csv: cannot open " + path);
    }
    SeriesMatrix out;
    std::vector<std::vector<double>> rows;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) {
            cells.push_back(cell);
        }
        if (first) {
            first = false;
            // header row iff any cell fails to parse as a number
            bool numeric = true;
            for (const auto& c : cells) {
                try {
                    std::size_t pos = 0;
                    (void)std::stod(c, &pos);
                    if (pos != c.size()) numeric = false;
                } catch (...) {
                    numeric = false;
                }
                if (!numeric) break;
            }
            if (!numeric) {
                out.column_names = cells;
                continue;
            }
        }
        std::vector<double> row;
        row.reserve(cells.size());
        for (const auto& c : cells) {
            row.push_back(std::stod(c));
        }
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw std::runtime_error("read_csv: ragged rows in " + path);
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) {
        throw std::runtime_error("read_csv: no data rows in " + path);
    }
    out.values.resize(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows[i].size(); ++j) {
            out.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        }
    }
    return out;
}

void write_csv(const std::string& path, const SeriesMatrix& x) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("write_csv: cannot open " + path);
    }
    out.precision(12);
    if (!x.column_names.empty()) {
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
            if (j > 0) out << ',';
            out << x.column_names[static_cast<std::size_t>(j)];
        }
        out << '\n';
    }
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
            if (j > 0) out << ',';
            out << x.values(i, j);
        }
        out << '\n';
    }
}

}  // namespace bcmlr
