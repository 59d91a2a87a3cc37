#ifndef RAINBC_CROSSVAL_HPP
#define RAINBC_CROSSVAL_HPP

#include <optional>
#include <string>
#include <vector>

#include "rainbc/conventional.hpp"
#include "rainbc/markov.hpp"
#include "rainbc/series.hpp"

namespace rainbc::cv {

struct Block {
    Date start;
    Date end;  // inclusive
};

struct BlockScheme {
    std::vector<Block> blocks;

    /// Throws std::invalid_argument unless blocks are ordered and disjoint.
    void validate() const;

    /// 1979-1988, 1989-1998, 1999-2008, 2009-2023.
    static BlockScheme default_blocks();
};

struct FoldResult {
    Block block;
    std::optional<bc::ConvParams> conv;  // loci / qm
    std::optional<bc::McParams> mc;      // mc-loci / mc-qm
    bool failed = false;
    std::vector<std::string> warnings;
};

struct CrossvalResult {
    DailySeries corrected;
    std::vector<FoldResult> folds;
    std::vector<std::string> warnings;
};

/// For each block: calibrate on the other blocks, correct the held-out model
/// segment (recursions start fresh with a Missing carry-in), stitch segments
/// by date. Failed folds stay missing and are flagged, never left raw.
CrossvalResult run_crossval(const DailySeries& obs, const DailySeries& model,
                            bc::Method method, const BlockScheme& blocks,
                            const PeriodScheme& scheme,
                            const bc::CalibrationConfig& cfg, double t_x);

}  // namespace rainbc::cv

#endif
