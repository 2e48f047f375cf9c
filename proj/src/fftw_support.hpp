#pragma once

// Thin RAII layer over FFTW. Planning is serialized behind one mutex (FFTW's
// planner is not reentrant); execution through the new-array interface is
// thread-safe. All plans use FFTW_ESTIMATE so the chosen algorithm, and hence
// every rounding, is the same from run to run.

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <span>

namespace nlchb::detail {

class RealBuffer {
public:
  explicit RealBuffer(std::size_t n);
  ~RealBuffer();
  RealBuffer(const RealBuffer&) = delete;
  RealBuffer& operator=(const RealBuffer&) = delete;

  double* data() { return data_; }
  std::span<double> span() { return {data_, n_}; }
  std::size_t size() const { return n_; }

private:
  double* data_;
  std::size_t n_;
};

class ComplexBuffer {
public:
  explicit ComplexBuffer(std::size_t n);
  ~ComplexBuffer();
  ComplexBuffer(const ComplexBuffer&) = delete;
  ComplexBuffer& operator=(const ComplexBuffer&) = delete;

  fftw_complex* data() { return data_; }
  std::size_t size() const { return n_; }

private:
  fftw_complex* data_;
  std::size_t n_;
};

/// In-place 2D real-to-real plan over an n0 x n1 row-major array (n1 fastest).
fftw_plan r2r_plan(int n0, int n1, fftw_r2r_kind kind0, fftw_r2r_kind kind1);
/// Out-of-place 2D real-to-complex plan, output n0 x (n1/2+1).
fftw_plan r2c_plan(int n0, int n1);
/// Out-of-place 2D complex-to-real plan (destroys its input).
fftw_plan c2r_plan(int n0, int n1);

}  // namespace nlchb::detail
