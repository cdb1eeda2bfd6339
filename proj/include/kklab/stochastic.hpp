#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace kklab {

enum class Convention { Ito, Stratonovich };

/// Gain alpha(t) = alpha0 + white noise with <xi(t1) xi(t2)> = 2 sigma2 delta(t1 - t2).
struct NoiseModel {
    double alpha0 = 0.0;
    double sigma2 = 0.0;
    Convention convention = Convention::Ito;
    std::uint64_t seed = 0;
    double dt = 1e-3;

    void validate() const;
};

/// Reproducible stream of alpha increments (alpha0 dt + dW, dW ~ N(0, 2 sigma2 dt))
/// for one path. Each (seed, path_index) pair owns an independently seeded
/// engine, so a path does not depend on which thread or in which order it is
/// generated.
class NoiseStream {
public:
    NoiseStream(const NoiseModel& noise, std::uint64_t path_index);

    double next();

private:
    std::mt19937_64 engine_;
    double drift_;
    double scale_;
};

/// First `n_steps` alpha increments of path `path_index`.
std::vector<double> sample_path(const NoiseModel& noise, std::uint64_t path_index, std::size_t n_steps);

struct SdePath {
    std::vector<double> k;  // n_steps + 1 values starting at k0
    bool blown_up = false;
    std::size_t blowup_step = 0;
};

/// Threshold on |k| beyond which a path is frozen and marked blown up.
inline constexpr double sde_blowup_threshold = 1e12;

/// Integrates dk = k dA - (4/5) beta k^2 dt with dA from sample_path.
/// Ito: Euler-Maruyama. Stratonovich: stochastic Heun.
SdePath integrate_sde(const NoiseModel& noise, double beta, double k0, std::size_t n_steps,
                      std::uint64_t path_index = 0);

struct EnsembleStats {
    std::vector<double> t_grid;
    std::vector<double> mean_k;
    std::vector<double> mean_k2;
    std::vector<double> se_k;
    std::vector<double> se_k2;
    std::vector<std::size_t> survived;  // paths not blown up by each time
    std::size_t n_paths = 0;
    std::size_t survived_paths = 0;     // at the final time
};

/// Number of paths per deterministic reduction block.
inline constexpr std::size_t ensemble_block_size = 256;

/// Monte Carlo moments of k at the requested times (each a multiple of dt).
/// Blown-up paths are frozen, not discarded. `threads` = 0 uses the hardware
/// concurrency. Results are identical for any thread count.
EnsembleStats ensemble_moments(const NoiseModel& noise, double beta, double k0,
                               std::span<const double> t_grid, std::size_t n_paths,
                               unsigned threads = 0);

struct MomentFormula {
    double value = 0.0;
    bool flagged = false;  // breakdown (negative bracket) or regime violation
};

/// k0^2 e^{2 s t} [1 - (4/5)(beta k0 / s)(e^{2 s t} - 1)],  s = sigma2.
/// sigma2 = 0 uses the limit k0^2 (1 - (8/5) beta k0 t).
MomentFormula paper_moment_formula(double sigma2, double beta, double k0, double t);

/// k0^2 [1 + 2 (sigma2 - (4/5) beta k0) t]; flagged when sigma2 t >= 1.
MomentFormula linearized_moment_formula(double sigma2, double beta, double k0, double t);

}  // namespace kklab
