// Copyright (c) 2026 The lip2speech Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef L2S_DSP_FFT_H_
#define L2S_DSP_FFT_H_

#include <complex>
#include <vector>

namespace l2s::dsp {

// Real FFT of a fixed size backed by FFTW. Plans are created once per size
// under a lock; execution is thread-safe.
class RealFft {
 public:
  explicit RealFft(int n);

  int size() const { return n_; }
  // in: n reals, out: n/2+1 bins.
  void Forward(const double* in, std::complex<double>* out) const;
  // in: n/2+1 bins, out: n reals. Unnormalized (result scaled by n).
  void Inverse(const std::complex<double>* in, double* out) const;

 private:
  int n_;
  void* forward_;
  void* inverse_;
};

}  // namespace l2s::dsp

#endif  // L2S_DSP_FFT_H_
