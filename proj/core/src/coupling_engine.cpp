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

#include "wmc/coupling_engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <thread>

#include <Eigen/Eigenvalues>

#include "wmc/spectral.hpp"

namespace wmc {

namespace {

using RowMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

std::vector<int> subset_indices(int n, SubsetMask subset) {
    if ((subset & ~full_mask(n)) != 0) {
        throw ArgumentError("subset refers to pointers beyond the chain length");
    }
    return mask_elements(subset);
}

void check_budget(const Experiment &exp, const std::vector<int> &idx, std::size_t budget) {
    double total = exp.chain().dim();
    for (int k : idx) {
        total *= exp.pointer(k).phi.grid().size();
    }
    if (total > static_cast<double>(budget)) {
        throw SizeError("joint pointer state needs " + std::to_string(static_cast<long long>(total)) +
                        " complex entries, above the budget of " + std::to_string(budget));
    }
}

void left_multiply(const CMatrix &u, std::vector<cplx> &t, int d) {
    const Eigen::Index cols = static_cast<Eigen::Index>(t.size() / d);
    Eigen::Map<RowMatrix> m(t.data(), d, cols);
    RowMatrix tmp = u * m;
    m = tmp;
}

JointPointerState empty_state(const Experiment &exp, const std::vector<int> &idx) {
    JointPointerState st;
    st.subset = idx;
    for (int k : idx) {
        st.grids.push_back(exp.pointer(k).phi.grid());
        st.shape.push_back(exp.pointer(k).phi.grid().size());
    }
    return st;
}

void finish(JointPointerState &st) {
    double measure = 1.0;
    for (const auto &grid : st.grids) {
        measure *= grid.spacing();
    }
    double sum = 0.0;
    for (const cplx &z : st.samples) {
        sum += std::norm(z);
    }
    st.norm2 = measure * sum;
    if (!(st.norm2 >= 1e-16)) {
        throw DegeneratePostselectionError("post-selected pointer state vanishes", std::sqrt(st.norm2));
    }
}

Eigen::RowVectorXcd post_selection_row(const EvolutionChain &chain, int after) {
    Eigen::RowVectorXcd w = chain.psi_f().amplitudes().adjoint();
    for (int j = chain.size() + 1; j > after; --j) {
        w = w * chain.unitary(j).matrix();
    }
    return w;
}

// Builds Psi in the eigenbases of the coupling observables, where every coupled pointer has a
// definite eigenvalue and the system evolution reduces to a d x d problem per eigen-tuple.
JointPointerState diagonal_coupling_run(const Experiment &exp, const std::vector<int> &idx, std::size_t budget,
                                        const std::function<cplx(std::span<const double>)> &amplitude) {
    check_budget(exp, idx, budget);
    JointPointerState st = empty_state(exp, idx);
    const int c = static_cast<int>(idx.size());
    if (c == 0) {
        const std::vector<double> none;
        st.samples = {amplitude(none)};
        finish(st);
        return st;
    }
    std::vector<CouplingPropagator> props;
    std::vector<CVector> phis;
    std::size_t total = 1;
    for (int k : idx) {
        const auto &cfg = exp.pointer(k);
        props.emplace_back(cfg.s, cfg.phi.grid(), true);
        CVector v = cfg.phi.samples();
        props.back().to_eigenbasis(std::span<cplx>(v.data(), v.size()));
        phis.push_back(std::move(v));
        total *= static_cast<std::size_t>(cfg.phi.grid().size());
    }
    st.samples.assign(total, 0.0);
    std::vector<int> w(c, 0);
    std::vector<double> theta(c);
    for (std::size_t flat = 0; flat < total; ++flat) {
        cplx pointer_part = 1.0;
        for (int i = 0; i < c; ++i) {
            theta[i] = exp.pointer(idx[i]).g * props[i].eigenvalues()[w[i]];
            pointer_part *= phis[i][w[i]];
        }
        if (pointer_part != 0.0) {
            st.samples[flat] = amplitude(theta) * pointer_part;
        }
        for (int i = c - 1; i >= 0; --i) {
            if (++w[i] < st.shape[i]) {
                break;
            }
            w[i] = 0;
        }
    }
    for (int i = 0; i < c; ++i) {
        spectral::for_each_fibre(std::span<cplx>(st.samples), st.shape, i,
                                 [&](std::span<cplx> fibre) { props[i].from_eigenbasis(fibre); });
    }
    finish(st);
    return st;
}

struct Eigensystem {
    CMatrix vectors;
    Eigen::VectorXd values;
};

Eigensystem eigensystem(const CMatrix &a) {
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(a);
    return {solver.eigenvectors(), solver.eigenvalues()};
}

CVector apply_exponential(const Eigensystem &es, double theta, const CVector &v) {
    CVector coeffs = es.vectors.adjoint() * v;
    for (Eigen::Index e = 0; e < coeffs.size(); ++e) {
        coeffs[e] *= std::exp(-kI * (theta * es.values[e]));
    }
    return es.vectors * coeffs;
}

void require_identity_between(const EvolutionChain &chain, const char *engine) {
    for (int k = 2; k <= chain.size(); ++k) {
        if (!chain.unitary(k).is_identity(1e-12)) {
            throw ArgumentError(std::string(engine) + " coupling needs identity intermediate unitaries");
        }
    }
}

std::vector<PointerOperator> resolve_readouts(const Experiment &exp, std::span<const PointerOperator> readouts) {
    if (readouts.empty()) {
        std::vector<PointerOperator> out;
        for (const auto &cfg : exp.pointers()) {
            out.emplace_back(cfg.r);
        }
        return out;
    }
    if (static_cast<int>(readouts.size()) != exp.size()) {
        throw ArgumentError("one readout per pointer is required");
    }
    return {readouts.begin(), readouts.end()};
}

}  // namespace

Experiment::Experiment(EvolutionChain chain, std::vector<PointerConfig> pointers, double coupling_limit)
    : chain_(std::move(chain)), pointers_(std::move(pointers)), coupling_limit_(coupling_limit) {
    if (static_cast<int>(pointers_.size()) != chain_.size()) {
        throw ArgumentError("experiment needs exactly one pointer per observable");
    }
    for (const auto &cfg : pointers_) {
        if (!(cfg.g >= 0.0) || cfg.g > coupling_limit_) {
            throw ArgumentError("coupling strength " + std::to_string(cfg.g) + " outside [0, " +
                                std::to_string(coupling_limit_) + "]");
        }
    }
}

Experiment Experiment::with_couplings(const std::vector<double> &g) const {
    if (g.size() != pointers_.size()) {
        throw ArgumentError("one coupling per pointer is required");
    }
    std::vector<PointerConfig> pointers = pointers_;
    for (std::size_t k = 0; k < g.size(); ++k) {
        pointers[k].g = g[k];
    }
    return Experiment(chain_, std::move(pointers), coupling_limit_);
}

Experiment Experiment::scaled(double factor) const {
    std::vector<double> g = couplings();
    for (double &x : g) {
        x *= factor;
    }
    return with_couplings(g);
}

std::vector<double> Experiment::couplings() const {
    std::vector<double> g;
    for (const auto &cfg : pointers_) {
        g.push_back(cfg.g);
    }
    return g;
}

JointPointerState run_exact(const Experiment &exp, SubsetMask subset, std::size_t budget) {
    const EvolutionChain &chain = exp.chain();
    const int n = chain.size();
    const int d = chain.dim();
    const std::vector<int> idx = subset_indices(n, subset);
    check_budget(exp, idx, budget);
    JointPointerState st = empty_state(exp, idx);
    if (idx.empty()) {
        st.samples = {chain.amplitude()};
        finish(st);
        return st;
    }
    const int last = idx.back();
    std::vector<cplx> t(d);
    Eigen::Map<CVector>(t.data(), d) = chain.unitary(1).matrix() * chain.psi_i().amplitudes();
    std::size_t cols = 1;
    for (int k = 1; k <= n; ++k) {
        if (subset & (SubsetMask{1} << (k - 1))) {
            const PointerConfig &cfg = exp.pointer(k);
            const Eigensystem es = eigensystem(chain.observable(k).matrix());
            left_multiply(es.vectors.adjoint(), t, d);
            const CouplingPropagator prop(cfg.s, cfg.phi.grid(), false);
            const std::size_t m = cfg.phi.grid().size();
            std::vector<CVector> shifted;
            for (int e = 0; e < d; ++e) {
                shifted.push_back(prop.apply(cfg.g * es.values[e], cfg.phi.samples()));
            }
            if (k == last) {
                const Eigen::RowVectorXcd c = post_selection_row(chain, k) * es.vectors;
                st.samples.assign(cols * m, 0.0);
                for (int e = 0; e < d; ++e) {
                    if (c[e] == 0.0) {
                        continue;
                    }
                    const cplx *phi_e = shifted[e].data();
                    for (std::size_t x = 0; x < cols; ++x) {
                        const cplx a = c[e] * t[e * cols + x];
                        if (a == 0.0) {
                            continue;
                        }
                        cplx *out = st.samples.data() + x * m;
                        for (std::size_t j = 0; j < m; ++j) {
                            out[j] += a * phi_e[j];
                        }
                    }
                }
                break;
            }
            std::vector<cplx> next(d * cols * m);
            for (int e = 0; e < d; ++e) {
                for (std::size_t x = 0; x < cols; ++x) {
                    const cplx a = t[e * cols + x];
                    cplx *out = next.data() + (e * cols + x) * m;
                    for (std::size_t j = 0; j < m; ++j) {
                        out[j] = a * shifted[e][j];
                    }
                }
            }
            cols *= m;
            t = std::move(next);
            left_multiply(es.vectors, t, d);
        }
        left_multiply(chain.unitary(k + 1).matrix(), t, d);
    }
    finish(st);
    return st;
}

JointPointerState run_simultaneous_exact(const Experiment &exp, SubsetMask subset, std::size_t budget) {
    const EvolutionChain &chain = exp.chain();
    require_identity_between(chain, "simultaneous");
    const std::vector<int> idx = subset_indices(chain.size(), subset);
    const CVector v0 = chain.unitary(1).matrix() * chain.psi_i().amplitudes();
    const Eigen::RowVectorXcd wf = post_selection_row(chain, chain.size());
    const int d = chain.dim();
    return diagonal_coupling_run(exp, idx, budget, [&](std::span<const double> theta) {
        CMatrix h = CMatrix::Zero(d, d);
        for (std::size_t i = 0; i < theta.size(); ++i) {
            h += theta[i] * chain.observable(idx[i]).matrix();
        }
        return cplx(wf * apply_exponential(eigensystem(h), 1.0, v0));
    });
}

JointPointerState run_trotter_simultaneous(const Experiment &exp, int steps, SubsetMask subset, std::size_t budget) {
    const EvolutionChain &chain = exp.chain();
    if (chain.size() != 2) {
        throw ArgumentError("Trotterised coupling is defined for two pointers");
    }
    if (steps < 1) {
        throw ArgumentError("Trotter step count must be positive");
    }
    if (steps > kMaxTrotterSteps) {
        throw SizeError("Trotter step count above " + std::to_string(kMaxTrotterSteps));
    }
    require_identity_between(chain, "Trotterised");
    const std::vector<int> idx = subset_indices(2, subset);
    std::vector<Eigensystem> systems;
    for (int k : idx) {
        systems.push_back(eigensystem(chain.observable(k).matrix()));
    }
    const CVector v0 = chain.unitary(1).matrix() * chain.psi_i().amplitudes();
    const Eigen::RowVectorXcd wf = post_selection_row(chain, 2);
    return diagonal_coupling_run(exp, idx, budget, [&](std::span<const double> theta) {
        CVector v = v0;
        for (int step = 0; step < steps; ++step) {
            for (std::size_t i = 0; i < systems.size(); ++i) {
                v = apply_exponential(systems[i], theta[i] / steps, v);
            }
        }
        return cplx(wf * v);
    });
}

cplx expectation_product_complex(const JointPointerState &state, std::span<const PointerOperator> readouts) {
    if (readouts.size() != state.subset.size()) {
        throw ArgumentError("readouts are not aligned with the coupled pointers");
    }
    std::vector<cplx> work = state.samples;
    double measure = 1.0;
    for (std::size_t i = 0; i < readouts.size(); ++i) {
        const PointerGrid &grid = state.grids[i];
        measure *= grid.spacing();
        spectral::for_each_fibre(std::span<cplx>(work), state.shape, static_cast<int>(i),
                                 [&](std::span<cplx> fibre) { apply_in_place(readouts[i], grid, fibre); });
    }
    cplx num = 0.0;
    for (std::size_t j = 0; j < work.size(); ++j) {
        num += std::conj(state.samples[j]) * work[j];
    }
    return measure * num / state.norm2;
}

double expectation_product(const JointPointerState &state, std::span<const PointerObservable> readouts) {
    std::vector<PointerOperator> ops(readouts.begin(), readouts.end());
    const cplx value = expectation_product_complex(state, ops);
    if (std::abs(value.imag()) > 1e-9 * std::max(1.0, std::abs(value))) {
        throw Error("Hermitian readout product has a non-negligible imaginary part");
    }
    return value.real();
}

double axis_variance(const JointPointerState &state, int axis, const PointerOperator &readout) {
    if (axis < 0 || axis >= static_cast<int>(state.subset.size())) {
        throw ArgumentError("axis outside the coupled pointers");
    }
    std::vector<cplx> work = state.samples;
    const PointerGrid &grid = state.grids[axis];
    spectral::for_each_fibre(std::span<cplx>(work), state.shape, axis,
                             [&](std::span<cplx> fibre) { apply_in_place(readout, grid, fibre); });
    double measure = 1.0;
    for (const auto &g : state.grids) {
        measure *= g.spacing();
    }
    cplx mean = 0.0;
    double second = 0.0;
    for (std::size_t j = 0; j < work.size(); ++j) {
        mean += std::conj(state.samples[j]) * work[j];
        second += std::norm(work[j]);
    }
    mean *= measure / state.norm2;
    second *= measure / state.norm2;
    return second - std::norm(mean);
}

double relative_state_distance(const JointPointerState &state, const JointPointerState &reference) {
    if (state.shape != reference.shape || state.grids != reference.grids) {
        throw ArgumentError("states live on different pointer spaces");
    }
    double diff = 0.0;
    double ref = 0.0;
    for (std::size_t j = 0; j < state.samples.size(); ++j) {
        diff += std::norm(state.samples[j] - reference.samples[j]);
        ref += std::norm(reference.samples[j]);
    }
    return std::sqrt(diff / ref);
}

MomentFunctional pointer_moments(const Experiment &exp, const MomentOptions &options) {
    const int n = exp.size();
    if (n < 1 || n > kMaxPartitionSize) {
        throw SizeError("pointer moments need between 1 and 12 pointers");
    }
    const std::vector<PointerOperator> readouts =
        options.readouts ? resolve_readouts(exp, *options.readouts) : resolve_readouts(exp, {});
    if (options.engine == CouplingEngine::trotter && n != 2) {
        throw ArgumentError("Trotterised coupling is defined for two pointers");
    }
    const SubsetMask count = full_mask(n);
    std::vector<cplx> table(std::size_t{count} + 1, 0.0);
    std::vector<std::exception_ptr> errors(std::size_t{count} + 1);
    auto evaluate = [&](SubsetMask mask) {
        try {
            JointPointerState st;
            switch (options.engine) {
                case CouplingEngine::sequential:
                    st = run_exact(exp, mask, options.budget);
                    break;
                case CouplingEngine::simultaneous:
                    st = run_simultaneous_exact(exp, mask, options.budget);
                    break;
                case CouplingEngine::trotter:
                    st = run_trotter_simultaneous(exp, options.trotter_steps, mask, options.budget);
                    break;
            }
            std::vector<PointerOperator> ops;
            for (int k : st.subset) {
                ops.push_back(readouts[k - 1]);
            }
            table[mask] = expectation_product_complex(st, ops);
        } catch (...) {
            errors[mask] = std::current_exception();
        }
    };
    const int threads = std::clamp(options.threads, 1, static_cast<int>(count));
    if (threads == 1) {
        for (SubsetMask mask = 1; mask <= count; ++mask) {
            evaluate(mask);
        }
    } else {
        std::atomic<SubsetMask> next{1};
        std::vector<std::thread> pool;
        for (int i = 0; i < threads; ++i) {
            pool.emplace_back([&] {
                for (SubsetMask mask = next++; mask <= count; mask = next++) {
                    evaluate(mask);
                }
            });
        }
        for (auto &th : pool) {
            th.join();
        }
    }
    for (const auto &err : errors) {
        if (err) {
            std::rethrow_exception(err);
        }
    }
    return MomentFunctional(n, std::move(table));
}

cplx pointer_cumulant(const Experiment &exp, const MomentOptions &options) {
    return cumulant(pointer_moments(exp, options));
}

SeriesExpansion build_series(const Experiment &exp, SubsetMask subset, int order,
                             std::span<const PointerOperator> readouts) {
    if (order < 0 || order > kSeriesOrderCap) {
        throw SizeError("series order must lie in [0, " + std::to_string(kSeriesOrderCap) + "]");
    }
    const int n = exp.size();
    const std::vector<PointerOperator> r = resolve_readouts(exp, readouts);
    SeriesExpansion series;
    series.order = order;
    series.subset = subset_indices(n, subset);
    std::vector<int> powers(n, 0);
    std::function<void(std::size_t, int)> fill = [&](std::size_t pos, int remaining) {
        if (pos == series.subset.size()) {
            cplx g_factor = 1.0;
            for (int k = 1; k <= n; ++k) {
                g_factor *= std::pow(exp.pointer(k).g, powers[k - 1]);
            }
            series.alpha[powers] = g_factor * power_weak_value(exp.chain(), powers);
            return;
        }
        const int k = series.subset[pos];
        for (int p = 0; p <= remaining; ++p) {
            powers[k - 1] = p;
            fill(pos + 1, remaining - p);
        }
        powers[k - 1] = 0;
    };
    fill(0, order);
    for (int k : series.subset) {
        const PointerConfig &cfg = exp.pointer(k);
        std::vector<std::vector<UVCoefficients>> table(order + 1, std::vector<UVCoefficients>(order + 1));
        for (int l = 0; l <= order; ++l) {
            for (int m = 0; m + l <= order; ++m) {
                table[l][m] = uv_coefficients(cfg.phi, cfg.s, r[k - 1], l, m);
            }
        }
        series.uv.push_back(std::move(table));
    }
    return series;
}

std::vector<cplx> perturbative_orders(const SeriesExpansion &series) {
    const int order = series.order;
    std::vector<cplx> num(order + 1, 0.0);
    std::vector<cplx> den(order + 1, 0.0);
    auto degree = [](const std::vector<int> &i) {
        int s = 0;
        for (int x : i) {
            s += x;
        }
        return s;
    };
    for (const auto &[i, alpha_i] : series.alpha) {
        for (const auto &[j, alpha_j] : series.alpha) {
            const int deg = degree(i) + degree(j);
            if (deg > order) {
                continue;
            }
            cplx u = alpha_i * std::conj(alpha_j);
            cplx v = u;
            for (std::size_t p = 0; p < series.subset.size(); ++p) {
                const int k = series.subset[p] - 1;
                const UVCoefficients &c = series.uv[p][i[k]][j[k]];
                u *= c.u;
                v *= c.v;
            }
            num[deg] += u;
            den[deg] += v;
        }
    }
    std::vector<cplx> ratio(order + 1, 0.0);
    for (int d = 0; d <= order; ++d) {
        cplx acc = num[d];
        for (int j = 1; j <= d; ++j) {
            acc -= den[j] * ratio[d - j];
        }
        ratio[d] = acc / den[0];
    }
    return ratio;
}

cplx run_perturbative(const Experiment &exp, SubsetMask subset, int order, std::span<const PointerOperator> readouts) {
    const std::vector<cplx> orders = perturbative_orders(build_series(exp, subset, order, readouts));
    cplx total = 0.0;
    for (const cplx &c : orders) {
        total += c;
    }
    return total;
}

}  // namespace wmc
