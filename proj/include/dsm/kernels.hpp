#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

// Data-parallel inner loops of candidate filtering and embedding arithmetic.
// Every kernel has a scalar reference; vector variants must agree with it
// bit for bit, and the active table is chosen once at runtime.
namespace dsm::kernels {

enum class Isa { Scalar, Avx2, Neon };

struct KernelTable {
  Isa isa;
  const char* name;

  // true iff a[j] <= b[j] for every j < dim.
  bool (*dominates)(const double* a, const double* b, std::size_t dim);

  // Writes the ascending indices i of rows (row-major, `dim` wide) that q
  // dominates; returns how many were written.
  std::size_t (*dominated_rows)(const double* q, const double* rows, std::size_t n,
                                std::size_t dim, std::uint32_t* out);

  // true iff lo[j] <= p[j] <= hi[j] for every j < dim.
  bool (*in_box)(const double* p, const double* lo, const double* hi, std::size_t dim);

  // out[i] = alpha * v[i] + beta * z[i], two roundings then one, no fusion.
  void (*affine)(const double* v, const double* z, double alpha, double beta, double* out,
                 std::size_t n);
};

const KernelTable& scalar_kernels();
// Null when the variant was not compiled in or the CPU lacks the extension.
const KernelTable* avx2_kernels();
const KernelTable* neon_kernels();

std::vector<const KernelTable*> available_kernels();

// Best available table; `DSM_KERNELS=scalar|avx2|neon` pins a specific one.
const KernelTable& active();

}  // namespace dsm::kernels
