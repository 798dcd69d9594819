#include "dsm/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>

#define DSM_AVX2 __attribute__((target("avx2")))

namespace dsm::kernels {

namespace {

// Lanes past `count` are filled so that the comparison always holds.
DSM_AVX2 inline __m256i tail_mask(std::size_t count) {
  const __m256i idx = _mm256_setr_epi64x(0, 1, 2, 3);
  return _mm256_cmpgt_epi64(_mm256_set1_epi64x(static_cast<long long>(count)), idx);
}

DSM_AVX2 bool dominates_avx2(const double* a, const double* b, std::size_t dim) {
  std::size_t j = 0;
  for (; j + 4 <= dim; j += 4) {
    const __m256d le = _mm256_cmp_pd(_mm256_loadu_pd(a + j), _mm256_loadu_pd(b + j), _CMP_LE_OQ);
    if (_mm256_movemask_pd(le) != 0xF) return false;
  }
  if (j < dim) {
    const __m256i m = tail_mask(dim - j);
    const __m256d va = _mm256_maskload_pd(a + j, m);
    const __m256d vb = _mm256_maskload_pd(b + j, m);
    const __m256d le = _mm256_cmp_pd(va, vb, _CMP_LE_OQ);
    const int want = (1 << (dim - j)) - 1;
    if ((_mm256_movemask_pd(le) & want) != want) return false;
  }
  return true;
}

DSM_AVX2 std::size_t dominated_rows_avx2(const double* q, const double* rows, std::size_t n,
                                         std::size_t dim, std::uint32_t* out) {
  std::size_t hits = 0;
  if (dim == 4) {
    const __m256d vq = _mm256_loadu_pd(q);
    for (std::size_t i = 0; i < n; ++i) {
      const __m256d le = _mm256_cmp_pd(vq, _mm256_loadu_pd(rows + i * 4), _CMP_LE_OQ);
      out[hits] = static_cast<std::uint32_t>(i);
      hits += _mm256_movemask_pd(le) == 0xF;
    }
    return hits;
  }
  if (dim == 2) {
    // Two rows per register.
    const __m256d vq = _mm256_setr_pd(q[0], q[1], q[0], q[1]);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
      const int m = _mm256_movemask_pd(_mm256_cmp_pd(vq, _mm256_loadu_pd(rows + i * 2), _CMP_LE_OQ));
      out[hits] = static_cast<std::uint32_t>(i);
      hits += (m & 0x3) == 0x3;
      out[hits] = static_cast<std::uint32_t>(i + 1);
      hits += (m & 0xC) == 0xC;
    }
    for (; i < n; ++i)
      if (q[0] <= rows[i * 2] && q[1] <= rows[i * 2 + 1]) out[hits++] = static_cast<std::uint32_t>(i);
    return hits;
  }
  for (std::size_t i = 0; i < n; ++i)
    if (dominates_avx2(q, rows + i * dim, dim)) out[hits++] = static_cast<std::uint32_t>(i);
  return hits;
}

DSM_AVX2 bool in_box_avx2(const double* p, const double* lo, const double* hi, std::size_t dim) {
  std::size_t j = 0;
  for (; j + 4 <= dim; j += 4) {
    const __m256d vp = _mm256_loadu_pd(p + j);
    const __m256d a = _mm256_cmp_pd(_mm256_loadu_pd(lo + j), vp, _CMP_LE_OQ);
    const __m256d b = _mm256_cmp_pd(vp, _mm256_loadu_pd(hi + j), _CMP_LE_OQ);
    if (_mm256_movemask_pd(_mm256_and_pd(a, b)) != 0xF) return false;
  }
  for (; j < dim; ++j)
    if (!(lo[j] <= p[j] && p[j] <= hi[j])) return false;
  return true;
}

DSM_AVX2 void affine_avx2(const double* v, const double* z, double alpha, double beta,
                          double* out, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  const __m256d vb = _mm256_set1_pd(beta);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d scaled = _mm256_mul_pd(va, _mm256_loadu_pd(v + i));
    const __m256d shift = _mm256_mul_pd(vb, _mm256_loadu_pd(z + i));
    _mm256_storeu_pd(out + i, _mm256_add_pd(scaled, shift));
  }
  for (; i < n; ++i) {
    const double scaled = alpha * v[i];
    const double shift = beta * z[i];
    out[i] = scaled + shift;
  }
}

constexpr KernelTable kAvx2{Isa::Avx2, "avx2", dominates_avx2, dominated_rows_avx2, in_box_avx2,
                            affine_avx2};

}  // namespace

const KernelTable* avx2_kernels() {
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? &kAvx2 : nullptr;
}

}  // namespace dsm::kernels

#else

namespace dsm::kernels {
const KernelTable* avx2_kernels() { return nullptr; }
}  // namespace dsm::kernels

#endif
