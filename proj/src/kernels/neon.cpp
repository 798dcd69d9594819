#include "dsm/kernels.hpp"

#if defined(__aarch64__)
#include <arm_neon.h>

namespace dsm::kernels {

namespace {

inline bool all_set(uint64x2_t m) { return vgetq_lane_u64(m, 0) && vgetq_lane_u64(m, 1); }

bool dominates_neon(const double* a, const double* b, std::size_t dim) {
  std::size_t j = 0;
  for (; j + 2 <= dim; j += 2)
    if (!all_set(vcleq_f64(vld1q_f64(a + j), vld1q_f64(b + j)))) return false;
  return j == dim || a[j] <= b[j];
}

std::size_t dominated_rows_neon(const double* q, const double* rows, std::size_t n,
                                std::size_t dim, std::uint32_t* out) {
  std::size_t hits = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (dominates_neon(q, rows + i * dim, dim)) out[hits++] = static_cast<std::uint32_t>(i);
  return hits;
}

bool in_box_neon(const double* p, const double* lo, const double* hi, std::size_t dim) {
  std::size_t j = 0;
  for (; j + 2 <= dim; j += 2) {
    const float64x2_t vp = vld1q_f64(p + j);
    if (!all_set(vandq_u64(vcleq_f64(vld1q_f64(lo + j), vp), vcleq_f64(vp, vld1q_f64(hi + j)))))
      return false;
  }
  return j == dim || (lo[j] <= p[j] && p[j] <= hi[j]);
}

void affine_neon(const double* v, const double* z, double alpha, double beta, double* out,
                 std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  const float64x2_t vb = vdupq_n_f64(beta);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t scaled = vmulq_f64(va, vld1q_f64(v + i));
    const float64x2_t shift = vmulq_f64(vb, vld1q_f64(z + i));
    vst1q_f64(out + i, vaddq_f64(scaled, shift));
  }
  for (; i < n; ++i) {
    const double scaled = alpha * v[i];
    const double shift = beta * z[i];
    out[i] = scaled + shift;
  }
}

constexpr KernelTable kNeon{Isa::Neon, "neon", dominates_neon, dominated_rows_neon, in_box_neon,
                            affine_neon};

}  // namespace

const KernelTable* neon_kernels() { return &kNeon; }

}  // namespace dsm::kernels

#else

namespace dsm::kernels {
const KernelTable* neon_kernels() { return nullptr; }
}  // namespace dsm::kernels

#endif
