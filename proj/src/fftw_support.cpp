#include "fftw_support.hpp"

#include <map>
#include <mutex>
#include <new>
#include <tuple>

namespace nlchb::detail {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

using Key = std::tuple<int, int, int, int, int>;  // type, n0, n1, kind0, kind1

std::map<Key, fftw_plan>& plan_table() {
  static std::map<Key, fftw_plan> table;
  return table;
}

}  // namespace

RealBuffer::RealBuffer(std::size_t n)
    : data_(static_cast<double*>(fftw_malloc(sizeof(double) * (n ? n : 1)))), n_(n) {
  if (!data_) throw std::bad_alloc();
}

RealBuffer::~RealBuffer() { fftw_free(data_); }

ComplexBuffer::ComplexBuffer(std::size_t n)
    : data_(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n ? n : 1)))), n_(n) {
  if (!data_) throw std::bad_alloc();
}

ComplexBuffer::~ComplexBuffer() { fftw_free(data_); }

fftw_plan r2r_plan(int n0, int n1, fftw_r2r_kind kind0, fftw_r2r_kind kind1) {
  std::lock_guard lock(planner_mutex());
  const Key key{0, n0, n1, static_cast<int>(kind0), static_cast<int>(kind1)};
  auto& table = plan_table();
  if (auto it = table.find(key); it != table.end()) return it->second;
  RealBuffer probe(static_cast<std::size_t>(n0) * n1);
  fftw_plan p = fftw_plan_r2r_2d(n0, n1, probe.data(), probe.data(), kind0, kind1, FFTW_ESTIMATE);
  table.emplace(key, p);
  return p;
}

fftw_plan r2c_plan(int n0, int n1) {
  std::lock_guard lock(planner_mutex());
  const Key key{1, n0, n1, 0, 0};
  auto& table = plan_table();
  if (auto it = table.find(key); it != table.end()) return it->second;
  RealBuffer in(static_cast<std::size_t>(n0) * n1);
  ComplexBuffer out(static_cast<std::size_t>(n0) * (n1 / 2 + 1));
  fftw_plan p = fftw_plan_dft_r2c_2d(n0, n1, in.data(), out.data(), FFTW_ESTIMATE);
  table.emplace(key, p);
  return p;
}

fftw_plan c2r_plan(int n0, int n1) {
  std::lock_guard lock(planner_mutex());
  const Key key{2, n0, n1, 0, 0};
  auto& table = plan_table();
  if (auto it = table.find(key); it != table.end()) return it->second;
  ComplexBuffer in(static_cast<std::size_t>(n0) * (n1 / 2 + 1));
  RealBuffer out(static_cast<std::size_t>(n0) * n1);
  fftw_plan p = fftw_plan_dft_c2r_2d(n0, n1, in.data(), out.data(), FFTW_ESTIMATE);
  table.emplace(key, p);
  return p;
}

}  // namespace nlchb::detail
