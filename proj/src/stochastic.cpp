#include "kklab/stochastic.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <string>
#include <thread>

#include <boost/random/normal_distribution.hpp>

#include "kklab/errors.hpp"

namespace kklab {

void NoiseModel::validate() const {
    if (!std::isfinite(alpha0)) throw InvalidInput("alpha0 must be finite");
    if (!(sigma2 >= 0.0) || !std::isfinite(sigma2)) throw InvalidInput("sigma2 must be finite and >= 0");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidInput("dt must be finite and > 0");
}

namespace {

std::seed_seq make_seed(std::uint64_t seed, std::uint64_t index) {
    return std::seed_seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                         static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                         0x4b4b3153u};
}

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t index) {
    auto seq = make_seed(seed, index);
    return std::mt19937_64(seq);
}

struct Welford {
    double n = 0.0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        n += 1.0;
        const double d = x - mean;
        mean += d / n;
        m2 += d * (x - mean);
    }

    void merge(const Welford& o) {
        if (o.n == 0.0) return;
        if (n == 0.0) {
            *this = o;
            return;
        }
        const double total = n + o.n;
        const double d = o.mean - mean;
        mean += d * o.n / total;
        m2 += o.m2 + d * d * n * o.n / total;
        n = total;
    }

    double standard_error() const { return n > 1.0 ? std::sqrt(m2 / (n - 1.0) / n) : 0.0; }
};

struct Stepper {
    Convention convention;
    double beta;
    double dt;

    double drift(double k) const { return -0.8 * beta * k * k; }

    double operator()(double k, double da) const {
        if (convention == Convention::Ito) return k + drift(k) * dt + k * da;
        const double pred = k + drift(k) * dt + k * da;
        return k + 0.5 * (drift(k) + drift(pred)) * dt + 0.5 * (k + pred) * da;
    }
};

std::vector<std::size_t> step_indices(std::span<const double> t_grid, double dt) {
    std::vector<std::size_t> idx;
    idx.reserve(t_grid.size());
    for (double t : t_grid) {
        if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidInput("sample times must be finite and >= 0");
        const double r = t / dt;
        const auto n = static_cast<std::size_t>(std::llround(r));
        if (std::abs(r - static_cast<double>(n)) > 1e-9 * std::max(1.0, r))
            throw InvalidInput("sample time " + std::to_string(t) + " is not a multiple of dt");
        idx.push_back(n);
    }
    if (!std::is_sorted(idx.begin(), idx.end())) throw InvalidInput("sample times must be ascending");
    return idx;
}

}  // namespace

NoiseStream::NoiseStream(const NoiseModel& noise, std::uint64_t path_index)
    : engine_(make_engine(noise.seed, path_index)),
      drift_(noise.alpha0 * noise.dt),
      scale_(std::sqrt(2.0 * noise.sigma2 * noise.dt)) {
    noise.validate();
}

double NoiseStream::next() {
    if (scale_ == 0.0) return drift_;
    // Ziggurat sampler; stateless, so every draw depends only on the engine.
    return drift_ + scale_ * boost::random::normal_distribution<double>{}(engine_);
}

std::vector<double> sample_path(const NoiseModel& noise, std::uint64_t path_index, std::size_t n_steps) {
    NoiseStream stream(noise, path_index);
    std::vector<double> out(n_steps);
    for (auto& v : out) v = stream.next();
    return out;
}

SdePath integrate_sde(const NoiseModel& noise, double beta, double k0, std::size_t n_steps,
                      std::uint64_t path_index) {
    noise.validate();
    if (!std::isfinite(k0)) throw InvalidInput("k0 must be finite");
    NoiseStream stream(noise, path_index);
    const Stepper advance{noise.convention, beta, noise.dt};
    SdePath path;
    path.k.reserve(n_steps + 1);
    double k = k0;
    path.k.push_back(k);
    for (std::size_t n = 0; n < n_steps; ++n) {
        const double da = stream.next();
        if (!path.blown_up) {
            const double next = advance(k, da);
            if (!std::isfinite(next) || std::abs(next) > sde_blowup_threshold) {
                path.blown_up = true;
                path.blowup_step = n + 1;
            } else {
                k = next;
            }
        }
        path.k.push_back(k);
    }
    return path;
}

EnsembleStats ensemble_moments(const NoiseModel& noise, double beta, double k0,
                               std::span<const double> t_grid, std::size_t n_paths, unsigned threads) {
    noise.validate();
    if (n_paths < 100) throw InvalidInput("ensemble needs at least 100 paths");
    if (!std::isfinite(k0)) throw InvalidInput("k0 must be finite");
    if (!(beta >= 0.0) || !std::isfinite(beta)) throw InvalidInput("beta must be finite and >= 0");
    const auto idx = step_indices(t_grid, noise.dt);
    const std::size_t n_times = idx.size();
    const std::size_t n_steps = idx.empty() ? 0 : idx.back();
    const std::size_t n_blocks = (n_paths + ensemble_block_size - 1) / ensemble_block_size;

    struct Block {
        std::vector<Welford> k, k2;
        std::vector<std::size_t> survived;
    };
    std::vector<Block> blocks(n_blocks);

    const Stepper advance{noise.convention, beta, noise.dt};
    auto run_block = [&](std::size_t b) {
        Block& out = blocks[b];
        out.k.assign(n_times, {});
        out.k2.assign(n_times, {});
        out.survived.assign(n_times, 0);
        const std::size_t first = b * ensemble_block_size;
        const std::size_t last = std::min(n_paths, first + ensemble_block_size);
        for (std::size_t p = first; p < last; ++p) {
            NoiseStream stream(noise, p);
            double k = k0;
            bool blown = false;
            std::size_t next_sample = 0;
            for (std::size_t n = 0; n <= n_steps; ++n) {
                while (next_sample < n_times && idx[next_sample] == n) {
                    out.k[next_sample].add(k);
                    out.k2[next_sample].add(k * k);
                    if (!blown) ++out.survived[next_sample];
                    ++next_sample;
                }
                if (n == n_steps) break;
                const double da = stream.next();
                if (blown) continue;
                const double next = advance(k, da);
                if (!std::isfinite(next) || std::abs(next) > sde_blowup_threshold) {
                    blown = true;
                } else {
                    k = next;
                }
            }
        }
    };

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n_blocks));
    if (threads <= 1) {
        for (std::size_t b = 0; b < n_blocks; ++b) run_block(b);
    } else {
        std::atomic<std::size_t> next_block{0};
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < threads; ++w)
            pool.emplace_back([&] {
                for (std::size_t b = next_block++; b < n_blocks; b = next_block++) run_block(b);
            });
    }

    // Merge in block order so the result does not depend on scheduling.
    std::vector<Welford> acc_k(n_times), acc_k2(n_times);
    std::vector<std::size_t> survived(n_times, 0);
    for (const auto& blk : blocks)
        for (std::size_t i = 0; i < n_times; ++i) {
            acc_k[i].merge(blk.k[i]);
            acc_k2[i].merge(blk.k2[i]);
            survived[i] += blk.survived[i];
        }

    EnsembleStats stats;
    stats.t_grid.assign(t_grid.begin(), t_grid.end());
    stats.n_paths = n_paths;
    stats.survived = survived;
    stats.survived_paths = n_times ? survived.back() : n_paths;
    for (std::size_t i = 0; i < n_times; ++i) {
        stats.mean_k.push_back(acc_k[i].mean);
        stats.mean_k2.push_back(acc_k2[i].mean);
        stats.se_k.push_back(acc_k[i].standard_error());
        stats.se_k2.push_back(acc_k2[i].standard_error());
    }
    if (n_times && stats.survived_paths == 0)
        throw DegenerateEnsemble("every path blew up before t = " + std::to_string(t_grid.back()));
    return stats;
}

MomentFormula paper_moment_formula(double sigma2, double beta, double k0, double t) {
    if (!(sigma2 >= 0.0)) throw InvalidInput("sigma2 must be >= 0");
    MomentFormula r;
    if (sigma2 == 0.0) {
        const double bracket = 1.0 - 1.6 * beta * k0 * t;
        r.value = k0 * k0 * bracket;
        r.flagged = bracket < 0.0;
        return r;
    }
    const double growth = std::exp(2.0 * sigma2 * t);
    const double bracket = 1.0 - 0.8 * (beta * k0 / sigma2) * std::expm1(2.0 * sigma2 * t);
    r.value = k0 * k0 * growth * bracket;
    r.flagged = bracket < 0.0;
    return r;
}

MomentFormula linearized_moment_formula(double sigma2, double beta, double k0, double t) {
    MomentFormula r;
    r.value = k0 * k0 * (1.0 + 2.0 * (sigma2 - 0.8 * beta * k0) * t);
    r.flagged = sigma2 * t >= 1.0;
    return r;
}

}  // namespace kklab
