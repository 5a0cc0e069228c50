// Copyright 2026 The wmc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef WMC_SPECTRAL_HPP
#define WMC_SPECTRAL_HPP

#include <span>
#include <vector>

#include "wmc/common.hpp"

namespace wmc::spectral {

/// In-place unnormalised forward DFT, X_k = sum_j x_j e^{-2 pi i jk/m}.
void forward(std::span<cplx> data);

/// In-place inverse DFT including the 1/m factor.
void inverse(std::span<cplx> data);

/// Angular wavenumbers in standard FFT order for m points spanning `length`:
/// 2 pi/length * [0, 1, ..., m/2 - 1, -m/2, ..., -1].
std::vector<double> wavenumbers(int m, double length);

/// Applies a one-dimensional transform to every fibre of a row-major tensor along `axis`.
/// `shape` lists the extents; `fn` receives a contiguous copy of each fibre.
template <class Fn>
void for_each_fibre(std::span<cplx> tensor, std::span<const int> shape, int axis, Fn &&fn) {
    std::size_t stride = 1;
    for (std::size_t a = axis + 1; a < shape.size(); ++a) {
        stride *= static_cast<std::size_t>(shape[a]);
    }
    const std::size_t extent = static_cast<std::size_t>(shape[axis]);
    const std::size_t outer = tensor.size() / (stride * extent);
    std::vector<cplx> fibre(extent);
    for (std::size_t o = 0; o < outer; ++o) {
        for (std::size_t s = 0; s < stride; ++s) {
            cplx *base = tensor.data() + o * extent * stride + s;
            for (std::size_t j = 0; j < extent; ++j) {
                fibre[j] = base[j * stride];
            }
            fn(std::span<cplx>(fibre));
            for (std::size_t j = 0; j < extent; ++j) {
                base[j * stride] = fibre[j];
            }
        }
    }
}

}  // namespace wmc::spectral

#endif  // WMC_SPECTRAL_HPP
