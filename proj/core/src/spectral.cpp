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

#include "wmc/spectral.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include <fftw3.h>

namespace wmc::spectral {

namespace {

// FFTW planning is not thread-safe; execution of an existing plan on new arrays is.
class PlanCache {
  public:
    static PlanCache &instance() {
        static PlanCache cache;
        return cache;
    }

    fftw_plan get(int m, int sign) {
        std::lock_guard<std::mutex> lock(mutex_);
        auto key = std::make_pair(m, sign);
        auto it = plans_.find(key);
        if (it != plans_.end()) {
            return it->second;
        }
        auto *buf = static_cast<fftw_complex *>(fftw_malloc(sizeof(fftw_complex) * m));
        fftw_plan plan = fftw_plan_dft_1d(m, buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_free(buf);
        plans_.emplace(key, plan);
        return plan;
    }

    ~PlanCache() {
        for (auto &[key, plan] : plans_) {
            fftw_destroy_plan(plan);
        }
    }

  private:
    std::mutex mutex_;
    std::map<std::pair<int, int>, fftw_plan> plans_;
};

void execute(std::span<cplx> data, int sign) {
    if (data.empty()) {
        return;
    }
    fftw_plan plan = PlanCache::instance().get(static_cast<int>(data.size()), sign);
    auto *ptr = reinterpret_cast<fftw_complex *>(data.data());
    fftw_execute_dft(plan, ptr, ptr);
}

}  // namespace

void forward(std::span<cplx> data) {
    execute(data, FFTW_FORWARD);
}

void inverse(std::span<cplx> data) {
    execute(data, FFTW_BACKWARD);
    const double scale = 1.0 / static_cast<double>(data.size());
    for (auto &x : data) {
        x *= scale;
    }
}

std::vector<double> wavenumbers(int m, double length) {
    std::vector<double> k(m);
    const double dk = 2.0 * std::numbers::pi / length;
    for (int j = 0; j < m; ++j) {
        k[j] = dk * (j < m / 2 ? j : j - m);
    }
    return k;
}

}  // namespace wmc::spectral
