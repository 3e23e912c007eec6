#ifndef BCMLR_DATA_MODEL_HPP_
#define BCMLR_DATA_MODEL_HPP_

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace bcmlr {

// N x p observation matrix; rows are time-ordered observations.
struct SeriesMatrix {
    Eigen::MatrixXd values;
    std::vector<std::string> column_names;  // optional, may be empty
    std::vector<int> constant_columns;      // filled in by standardize()

    Eigen::Index rows() const { return values.rows(); }
    Eigen::Index cols() const { return values.cols(); }
};

// Ordered changepoints kappa_1 < ... < kappa_L, each in {1, ..., N-1}, with
// sentinels kappa_0 = 0 and kappa_{L+1} = N. Segment j is
// {kappa_{j-1}+1, ..., kappa_j}; every segment must have length >= min_seg.
struct ChangepointVector {
    std::vector<int> kappas;
    int n = 0;
    int min_seg = 1;

    int num_segments() const { return static_cast<int>(kappas.size()) + 1; }

    // kappa_j with sentinel handling, j in {0, ..., L+1}
    int boundary(int j) const {
        if (j <= 0) return 0;
        if (j > static_cast<int>(kappas.size())) return n;
        return kappas[j - 1];
    }

    // 1-based segment index of time point i in {1, ..., n}
    int segment_of(int i) const;

    void validate() const;  // throws std::invalid_argument on violation
};

// N x J binary indicator matrix y with y(i, j) = 1 iff kappa_{j-1} < i+1 <= kappa_j.
struct SegmentLabels {
    Eigen::MatrixXi y;
};

// Center each column and scale to sample standard deviation 1 (divisor N-1).
// Constant columns are centered only and reported in constant_columns.
SeriesMatrix standardize(const SeriesMatrix& x);

// Degree-2 polynomial embedding (x_1..x_p, x_1^2..x_p^2, x_1x_2, ..., x_{p-1}x_p);
// output dimension 2p + p(p-1)/2.
SeriesMatrix poly2_embed(const SeriesMatrix& x);

SegmentLabels labels_from_kappa(const ChangepointVector& kappa);

// 1-based class index per row, the inverse view of labels_from_kappa.
Eigen::VectorXi class_labels(const ChangepointVector& kappa);

// CSV I/O: rows = time points, columns = dimensions, optional header row.
SeriesMatrix read_csv(const std::string& path);
void write_csv(const std::string& path, const SeriesMatrix& x);

}  // namespace bcmlr

#endif  // BCMLR_DATA_MODEL_HPP_
