#include "varxl/mcs.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace varxl {

void LossMatrix::validate() const
{
    if (losses.rows() < 1 || losses.cols() < 1) throw ValidationError("loss matrix is empty");
    if (static_cast<Index>(model_names.size()) != losses.rows()) {
        throw ValidationError("one model name per loss row is required");
    }
    if (!losses.allFinite() || (losses.array() < 0.0).any()) {
        throw ValidationError("losses must be finite and non-negative");
    }
}

std::vector<std::vector<Vector>> loss_differentials(const LossMatrix& losses)
{
    losses.validate();
    const Index n = losses.losses.rows();
    if (n < 2) throw ValidationError("loss differentials need at least two models");
    std::vector<std::vector<Vector>> d(static_cast<std::size_t>(n), std::vector<Vector>(static_cast<std::size_t>(n)));
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
            d[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                (losses.losses.row(i) - losses.losses.row(j)).transpose();
        }
    }
    return d;
}

std::vector<std::vector<int>> circular_block_indices(int n_periods, int block_length, int n_boot, std::uint64_t seed)
{
    if (n_periods < 1 || block_length < 1 || n_boot < 1) throw ValidationError("invalid bootstrap settings");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> start(0, n_periods - 1);
    std::vector<std::vector<int>> out(static_cast<std::size_t>(n_boot));
    for (auto& idx : out) {
        idx.reserve(static_cast<std::size_t>(n_periods));
        while (static_cast<int>(idx.size()) < n_periods) {
            const int s = start(rng);
            for (int j = 0; j < block_length && static_cast<int>(idx.size()) < n_periods; ++j) {
                idx.push_back((s + j) % n_periods);
            }
        }
    }
    return out;
}

McsResult model_confidence_set(const LossMatrix& losses, const McsOptions& opts)
{
    losses.validate();
    if (!(opts.alpha > 0.0 && opts.alpha < 1.0)) throw ValidationError("MCS level must lie in (0, 1)");
    const int n_periods = static_cast<int>(losses.losses.cols());
    const int block = opts.block_length > 0
                          ? opts.block_length
                          : std::max(1, static_cast<int>(std::floor(std::cbrt(static_cast<double>(n_periods)) + 1e-9)));
    if (n_periods < 2 * block) throw ValidationError("MCS needs at least two bootstrap blocks of periods");

    McsResult out;
    out.block_length = block;
    const Index n_models = losses.losses.rows();
    const auto indices = circular_block_indices(n_periods, block, opts.n_boot, opts.seed);

    // Per-model sample and bootstrap mean losses; differentials of means are
    // differences of these.
    const Vector mean = losses.losses.rowwise().mean();
    Matrix boot(n_models, opts.n_boot);
    for (int b = 0; b < opts.n_boot; ++b) {
        const auto& idx = indices[static_cast<std::size_t>(b)];
        for (Index i = 0; i < n_models; ++i) {
            double s = 0.0;
            for (int t : idx) s += losses.losses(i, t);
            boot(i, b) = s / n_periods;
        }
    }

    std::vector<Index> alive(static_cast<std::size_t>(n_models));
    for (Index i = 0; i < n_models; ++i) alive[static_cast<std::size_t>(i)] = i;
    double running_p = 0.0;
    constexpr double variance_floor = 1e-12;

    while (alive.size() > 1) {
        const std::size_t M = alive.size();
        double stat = 0.0;
        std::vector<double> boot_stat(static_cast<std::size_t>(opts.n_boot), 0.0);
        std::vector<double> row_mean(M, 0.0);
        for (std::size_t a = 0; a < M; ++a) {
            for (std::size_t c = 0; c < M; ++c) {
                if (a == c) continue;
                const Index i = alive[a];
                const Index j = alive[c];
                const double dbar = mean(i) - mean(j);
                row_mean[a] += dbar / static_cast<double>(M - 1);
                if (c < a) continue;
                double var = 0.0;
                for (int b = 0; b < opts.n_boot; ++b) {
                    const double dev = (boot(i, b) - boot(j, b)) - dbar;
                    var += dev * dev;
                }
                var = std::max(var / opts.n_boot, variance_floor);
                const double sd = std::sqrt(var);
                stat = std::max(stat, std::abs(dbar) / sd);
                for (int b = 0; b < opts.n_boot; ++b) {
                    const double dev = std::abs((boot(i, b) - boot(j, b)) - dbar) / sd;
                    auto& bs = boot_stat[static_cast<std::size_t>(b)];
                    bs = std::max(bs, dev);
                }
            }
        }
        int exceed = 0;
        for (double v : boot_stat) exceed += v >= stat ? 1 : 0;
        const double p = static_cast<double>(exceed) / opts.n_boot;
        running_p = std::max(running_p, p);
        if (p >= opts.alpha) {
            out.final_p_value = p;
            break;
        }

        const auto worst_at = static_cast<std::size_t>(std::max_element(row_mean.begin(), row_mean.end()) - row_mean.begin());
        const Index worst = alive[worst_at];
        McsStep step;
        step.statistic = stat;
        step.p_value = running_p;
        std::vector<Index> keep;
        for (std::size_t a = 0; a < M; ++a) {
            const Index i = alive[a];
            if (losses.losses.row(i) == losses.losses.row(worst)) {
                step.eliminated.push_back(losses.model_names[static_cast<std::size_t>(i)]);
            } else {
                keep.push_back(i);
            }
        }
        if (keep.empty()) {
            // Everything tied: nothing distinguishes the remaining models.
            out.final_p_value = 1.0;
            break;
        }
        out.trace.push_back(std::move(step));
        alive = std::move(keep);
    }
    if (alive.size() == 1) out.final_p_value = 1.0;
    for (Index i : alive) out.surviving.push_back(losses.model_names[static_cast<std::size_t>(i)]);
    return out;
}

} // namespace varxl
