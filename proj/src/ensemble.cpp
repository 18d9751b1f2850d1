#include "cavsim/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <stdexcept>
#include <thread>

namespace cavsim {

namespace {
constexpr long kBlock = 16;  // reduction granularity, fixed for determinism
}

EnsembleResult ensemble_mean_density_generic(const TrajectoryFn& run, long trajectories,
                                             std::uint64_t seed0, int workers) {
    if (trajectories < 1)
        throw std::domain_error("ensemble: need at least one trajectory");
    workers = std::max(1, workers);

    const long nblocks = (trajectories + kBlock - 1) / kBlock;
    struct Block {
        std::vector<Mat> sum;
        std::vector<double> t;
        long kept = 0, aborted = 0;
    };
    std::vector<Block> blocks(nblocks);

    std::atomic<long> next{0};
    auto work = [&] {
        for (;;) {
            const long b = next.fetch_add(1);
            if (b >= nblocks) return;
            Block& blk = blocks[b];
            const long lo = b * kBlock;
            const long hi = std::min(trajectories, lo + kBlock);
            for (long k = lo; k < hi; ++k) {
                TrajectoryRecord rec = run(trajectory_seed(seed0, k));
                if (!rec.ok()) {
                    ++blk.aborted;
                    continue;
                }
                if (blk.sum.empty()) {
                    blk.sum.resize(rec.snapshots.size());
                    blk.t.resize(rec.snapshots.size());
                    for (std::size_t i = 0; i < rec.snapshots.size(); ++i) {
                        const int d = rec.snapshots[i].second.dim();
                        blk.sum[i] = Mat::Zero(d, d);
                        blk.t[i] = rec.snapshots[i].first;
                    }
                }
                for (std::size_t i = 0; i < rec.snapshots.size(); ++i) {
                    const Vec& v = rec.snapshots[i].second.amps;
                    blk.sum[i].noalias() += v * v.adjoint();
                }
                ++blk.kept;
            }
        }
    };

    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }

    EnsembleResult res;
    res.total = trajectories;
    long kept = 0;
    std::vector<Mat> acc;
    std::vector<double> tgrid;
    for (const Block& blk : blocks) {
        res.aborted += blk.aborted;
        if (blk.kept == 0) continue;
        if (acc.empty()) {
            acc = blk.sum;
            tgrid = blk.t;
        } else {
            for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += blk.sum[i];
        }
        kept += blk.kept;
    }
    if (res.aborted * 100 > trajectories)
        throw std::runtime_error("ensemble: more than 1% of trajectories aborted");
    if (kept == 0) throw std::runtime_error("ensemble: no surviving trajectories");
    for (std::size_t i = 0; i < acc.size(); ++i)
        res.mean.push_back({tgrid[i], DensityMatrix{acc[i] / double(kept)}});
    return res;
}

std::vector<TrajectoryRecord> run_ensemble(const TrajectoryFn& run, long trajectories,
                                           std::uint64_t seed0, int workers) {
    workers = std::max(1, workers);
    std::vector<TrajectoryRecord> out(trajectories);
    std::atomic<long> next{0};
    auto work = [&] {
        for (;;) {
            const long k = next.fetch_add(1);
            if (k >= trajectories) return;
            out[k] = run(trajectory_seed(seed0, k));
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    return out;
}

}  // namespace cavsim
