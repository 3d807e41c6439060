// linalg.cpp — LAPACK-backed dense symmetric eigenvalues and inertia.
#include "torspec/linalg.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

extern "C" {
void dsyev_(const char* jobz, const char* uplo, const int* n, double* a,
            const int* lda, double* w, double* work, const int* lwork, int* info);
void dsytrf_(const char* uplo, const int* n, double* a, const int* lda,
             int* ipiv, double* work, const int* lwork, int* info);
void dgeev_(const char* jobvl, const char* jobvr, const int* n, double* a,
            const int* lda, double* wr, double* wi, double* vl, const int* ldvl,
            double* vr, const int* ldvr, double* work, const int* lwork, int* info);
void dpotrf_(const char* uplo, const int* n, double* a, const int* lda, int* info);
}

namespace torspec::linalg {

namespace {
[[noreturn]] void lapack_fail(const char* routine, int info) {
  throw std::runtime_error(std::string(routine) + " failed, info=" + std::to_string(info));
}
}  // namespace

std::vector<double> sym_eigenvalues(std::vector<double> a, int n) {
  std::vector<double> w(n);
  int info = 0, lwork = -1;
  double wkopt = 0.0;
  dsyev_("N", "L", &n, a.data(), &n, w.data(), &wkopt, &lwork, &info);
  if (info != 0) lapack_fail("dsyev(query)", info);
  lwork = static_cast<int>(wkopt);
  std::vector<double> work(lwork);
  dsyev_("N", "L", &n, a.data(), &n, w.data(), work.data(), &lwork, &info);
  if (info != 0) lapack_fail("dsyev", info);
  return w;
}

Inertia inertia(std::vector<double>& a, int n, double zero_tol) {
  std::vector<int> ipiv(n);
  int info = 0, lwork = -1;
  double wkopt = 0.0;
  dsytrf_("L", &n, a.data(), &n, ipiv.data(), &wkopt, &lwork, &info);
  if (info != 0) lapack_fail("dsytrf(query)", info);
  lwork = static_cast<int>(wkopt);
  std::vector<double> work(lwork);
  dsytrf_("L", &n, a.data(), &n, ipiv.data(), work.data(), &lwork, &info);
  if (info < 0) lapack_fail("dsytrf", info);
  // info > 0 flags an exactly singular pivot; the parse below records it as zero.
  auto at = [&](int r, int c) { return a[static_cast<std::size_t>(c) * n + r]; };
  Inertia res;
  for (int i = 0; i < n;) {
    if (ipiv[i] > 0) {
      double d = at(i, i);
      if (std::fabs(d) <= zero_tol) ++res.zero;
      else if (d < 0.0) ++res.neg;
      else ++res.pos;
      ++i;
    } else {
      // 2x2 pivot block [[p, q], [q, r]] stored at (i,i), (i+1,i), (i+1,i+1).
      double p = at(i, i), q = at(i + 1, i), r = at(i + 1, i + 1);
      double det = p * r - q * q, tr = p + r;
      if (det < 0.0) { ++res.neg; ++res.pos; }
      else if (det == 0.0) { ++res.zero; (tr < 0.0 ? res.neg : res.pos)++; }
      else if (tr < 0.0) res.neg += 2;
      else res.pos += 2;
      i += 2;
    }
  }
  return res;
}

bool cholesky_spd(std::vector<double>& a, int n) {
  int info = 0;
  dpotrf_("L", &n, a.data(), &n, &info);
  if (info < 0) lapack_fail("dpotrf", info);
  return info == 0;
}

std::vector<std::complex<double>> gen_eigenvalues(std::vector<double> a, int n) {
  std::vector<double> wr(n), wi(n);
  int info = 0, lwork = -1;
  double wkopt = 0.0;
  dgeev_("N", "N", &n, a.data(), &n, wr.data(), wi.data(), nullptr, &n, nullptr,
         &n, &wkopt, &lwork, &info);
  if (info != 0) lapack_fail("dgeev(query)", info);
  lwork = static_cast<int>(wkopt);
  std::vector<double> work(lwork);
  dgeev_("N", "N", &n, a.data(), &n, wr.data(), wi.data(), nullptr, &n, nullptr,
         &n, work.data(), &lwork, &info);
  if (info != 0) lapack_fail("dgeev", info);
  std::vector<std::complex<double>> out(n);
  for (int i = 0; i < n; ++i) out[i] = {wr[i], wi[i]};
  return out;
}

}  // namespace torspec::linalg
