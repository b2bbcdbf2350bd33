#include "stdwr/blas_guard.hpp"

#include <dlfcn.h>
#include <unistd.h>

#include <cstdlib>
#include <cstring>
#include <iostream>

namespace stdwr {

void ensure_working_blas(char** argv) {
  if (std::getenv("OPENBLAS_CORETYPE")) return;
  using CoreName = char* (*)();
  auto corename = reinterpret_cast<CoreName>(dlsym(RTLD_DEFAULT, "openblas_get_corename"));
  if (!corename) return;
  const char* name = corename();
  if (!name || strcasecmp(name, "cooperlake") != 0) return;
  setenv("OPENBLAS_CORETYPE", "SkylakeX", 1);
  execv("/proc/self/exe", argv);
  std::cerr << "warning: could not switch BLAS kernels, sparse factorizations may fail\n";
}

}  // namespace stdwr
