#include "shiftconv/numeric.hpp"
#include "shiftconv/error.hpp"

#include <Eigen/Dense>
#include <charconv>

namespace shiftconv {

double pairwise_sum(const double* v, std::size_t n) {
    if (n <= 16) {
        double s = 0;
        for (std::size_t i = 0; i < n; ++i) s += v[i];
        return s;
    }
    const std::size_t h = n / 2;
    return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::vector<double> least_squares(const std::vector<double>& design, std::size_t rows, std::size_t cols,
                                  const std::vector<double>& rhs) {
    require(rows >= cols && design.size() == rows * cols && rhs.size() == rows, Errc::domain,
            "least squares: not enough rows");
    Eigen::MatrixXd A(rows, cols);
    Eigen::VectorXd b(rows);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) A(i, j) = design[i * cols + j];
        b(i) = rhs[i];
    }
    // column scaling keeps the rank test meaningful for log-polynomial designs
    Eigen::VectorXd scale(cols);
    for (std::size_t j = 0; j < cols; ++j) {
        scale(j) = A.col(j).norm();
        if (scale(j) == 0) fail(Errc::domain, "least squares: zero column");
        A.col(j) /= scale(j);
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    qr.setThreshold(1e-12);
    if (qr.rank() < static_cast<Eigen::Index>(cols)) fail(Errc::domain, "least squares: singular design");
    Eigen::VectorXd x = qr.solve(b);
    std::vector<double> out(cols);
    for (std::size_t j = 0; j < cols; ++j) out[j] = x(j) / scale(j);
    return out;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    require(x.size() == y.size() && x.size() >= 2, Errc::domain, "fit_line: need at least two points");
    std::vector<double> design;
    for (double v : x) {
        design.push_back(1.0);
        design.push_back(v);
    }
    auto c = least_squares(design, x.size(), 2, y);
    return {c[1], c[0]};
}

} // namespace shiftconv
