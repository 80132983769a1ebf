#include "vrszd/directions.hpp"

#include <string>

#include "vrszd/error.hpp"

namespace vrszd {

namespace {

void check_shape(std::size_t d, std::size_t l) {
  if (l == 0 || l > d) {
    throw InvalidArgument("direction count l=" + std::to_string(l) + " must satisfy 1 <= l <= d=" +
                          std::to_string(d));
  }
}

}  // namespace

DirectionSet::DirectionSet(std::size_t dim, std::size_t count, std::vector<double> columns, FrameKind kind)
    : dim_(dim), count_(count), columns_(std::move(columns)), kind_(kind) {
  check_shape(dim, count);
  if (columns_.size() != dim * count) throw InvalidArgument("DirectionSet: storage size mismatch");
}

Matrix DirectionSet::to_matrix() const {
  Matrix m(dim_, count_);
  for (std::size_t j = 0; j < count_; ++j)
    for (std::size_t i = 0; i < dim_; ++i) m(i, j) = columns_[j * dim_ + i];
  return m;
}

DirectionSet sample_haar_frame(std::size_t d, std::size_t l, RandomStream& rng) {
  check_shape(d, l);
  std::vector<double> gaussian(d * l);
  for (double& g : gaussian) g = rng.normal();
  ColumnQr qr = thin_qr_columns(gaussian, d, l);
  for (std::size_t j = 0; j < l; ++j) {
    // R_jj == 0 is a measure-zero event; treat its sign as +1.
    if (qr.r[j * l + j] < 0.0) {
      for (std::size_t i = 0; i < d; ++i) qr.q[j * d + i] = -qr.q[j * d + i];
    }
  }
  return DirectionSet(d, l, std::move(qr.q), FrameKind::HaarFrame);
}

DirectionSet canonical_frame(std::size_t d, std::size_t l) {
  check_shape(d, l);
  std::vector<double> columns(d * l, 0.0);
  for (std::size_t j = 0; j < l; ++j) columns[j * d + j] = 1.0;
  return DirectionSet(d, l, std::move(columns), FrameKind::Canonical);
}

DirectionSet sample_sphere_direction(std::size_t d, RandomStream& rng) {
  check_shape(d, 1);
  std::vector<double> v(d);
  double norm = 0.0;
  do {
    for (double& x : v) x = rng.normal();
    norm = norm2(v);
  } while (norm == 0.0);
  scale(1.0 / norm, v);
  return DirectionSet(d, 1, std::move(v), FrameKind::SingleSphere);
}

}  // namespace vrszd
