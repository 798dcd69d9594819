#include <cstdlib>
#include <string_view>

#include "dsm/kernels.hpp"

namespace dsm::kernels {

std::vector<const KernelTable*> available_kernels() {
  std::vector<const KernelTable*> out{&scalar_kernels()};
  if (auto* k = avx2_kernels()) out.push_back(k);
  if (auto* k = neon_kernels()) out.push_back(k);
  return out;
}

namespace {

const KernelTable& select() {
  const auto all = available_kernels();
  if (const char* pin = std::getenv("DSM_KERNELS")) {
    for (const auto* k : all)
      if (std::string_view(pin) == k->name) return *k;
  }
  return *all.back();
}

}  // namespace

const KernelTable& active() {
  static const KernelTable& chosen = select();
  return chosen;
}

}  // namespace dsm::kernels
