#include "dsm/kernels.hpp"

namespace dsm::kernels {

namespace {

bool dominates_ref(const double* a, const double* b, std::size_t dim) {
  for (std::size_t j = 0; j < dim; ++j)
    if (!(a[j] <= b[j])) return false;
  return true;
}

std::size_t dominated_rows_ref(const double* q, const double* rows, std::size_t n,
                               std::size_t dim, std::uint32_t* out) {
  std::size_t hits = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (dominates_ref(q, rows + i * dim, dim)) out[hits++] = static_cast<std::uint32_t>(i);
  return hits;
}

bool in_box_ref(const double* p, const double* lo, const double* hi, std::size_t dim) {
  for (std::size_t j = 0; j < dim; ++j)
    if (!(lo[j] <= p[j] && p[j] <= hi[j])) return false;
  return true;
}

void affine_ref(const double* v, const double* z, double alpha, double beta, double* out,
                std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double scaled = alpha * v[i];
    const double shift = beta * z[i];
    out[i] = scaled + shift;
  }
}

constexpr KernelTable kScalar{Isa::Scalar, "scalar", dominates_ref, dominated_rows_ref, in_box_ref,
                              affine_ref};

}  // namespace

const KernelTable& scalar_kernels() { return kScalar; }

}  // namespace dsm::kernels
