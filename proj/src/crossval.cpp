#include "rainbc/crossval.hpp"

#include <algorithm>
#include <stdexcept>

namespace rainbc::cv {

void BlockScheme::validate() const {
    if (blocks.empty())
        throw std::invalid_argument("BlockScheme: no blocks");
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        if (blocks[i].end < blocks[i].start)
            throw std::invalid_argument("BlockScheme: block end before start");
        if (i > 0 && !(blocks[i - 1].end < blocks[i].start))
            throw std::invalid_argument(
                "BlockScheme: blocks must be ordered and disjoint");
    }
}

BlockScheme BlockScheme::default_blocks() {
    return BlockScheme{{
        {{1979, 1, 1}, {1988, 12, 31}},
        {{1989, 1, 1}, {1998, 12, 31}},
        {{1999, 1, 1}, {2008, 12, 31}},
        {{2009, 1, 1}, {2023, 12, 31}},
    }};
}

namespace {

// Copy with all days inside [start, end] set to missing.
DailySeries mask_block(const DailySeries& s, const Block& b) {
    DailySeries out = s;
    const std::int64_t s0 = s.start_date().to_days();
    const std::int64_t lo = std::max(b.start.to_days(), s0);
    const std::int64_t hi = std::min(
        b.end.to_days(), s0 + static_cast<std::int64_t>(s.size()) - 1);
    for (std::int64_t d = lo; d <= hi; ++d)
        out.set_missing(static_cast<std::size_t>(d - s0));
    return out;
}

}  // namespace

CrossvalResult run_crossval(const DailySeries& obs, const DailySeries& model,
                            bc::Method method, const BlockScheme& blocks,
                            const PeriodScheme& scheme,
                            const bc::CalibrationConfig& cfg, double t_x) {
    blocks.validate();
    scheme.validate();

    // Output aligned to the model range; days outside every block or in a
    // failed fold stay missing.
    CrossvalResult result{
        DailySeries(model.start_date(),
                    std::vector<std::optional<double>>(model.size())),
        {},
        {}};

    const std::int64_t m0 = model.start_date().to_days();
    for (const auto& block : blocks.blocks) {
        FoldResult fold;
        fold.block = block;
        const std::int64_t lo = std::max(block.start.to_days(), m0);
        const std::int64_t hi =
            std::min(block.end.to_days(),
                     m0 + static_cast<std::int64_t>(model.size()) - 1);
        if (lo > hi) {
            fold.warnings.push_back("block outside the model range; skipped");
            result.folds.push_back(std::move(fold));
            continue;
        }
        const DailySeries obs_cal = mask_block(obs, block);
        const DailySeries model_cal = mask_block(model, block);
        const DailySeries segment = model.slice(
            static_cast<std::size_t>(lo - m0), static_cast<std::size_t>(hi - lo + 1));

        try {
            bc::ApplyResult applied{DailySeries{}, {}};
            switch (method) {
                case bc::Method::Loci: {
                    auto params = bc::calibrate_loci(obs_cal, model_cal, scheme, t_x);
                    applied = bc::apply_loci(segment, params, scheme);
                    fold.conv = std::move(params);
                    break;
                }
                case bc::Method::Qm: {
                    bc::ConvOptions opt;
                    opt.min_fit_n = cfg.min_fit_n;
                    opt.literal_eq4 = cfg.literal_eq4;
                    auto params =
                        bc::calibrate_qm(obs_cal, model_cal, scheme, t_x, opt);
                    applied = bc::apply_qm(segment, params, scheme);
                    fold.conv = std::move(params);
                    break;
                }
                case bc::Method::McLoci:
                case bc::Method::McQm: {
                    auto params =
                        bc::calibrate_mc(obs_cal, model_cal, scheme, t_x, method, cfg);
                    applied = method == bc::Method::McLoci
                                  ? bc::apply_mc_loci(segment, params.thresholds,
                                                      params.amounts, scheme, cfg)
                                  : bc::apply_mc_qm(segment, params.thresholds,
                                                    params.amounts, scheme, cfg);
                    fold.mc = std::move(params);
                    break;
                }
            }
            fold.warnings.insert(fold.warnings.end(), applied.warnings.begin(),
                                 applied.warnings.end());
            for (std::size_t i = 0; i < applied.series.size(); ++i) {
                result.corrected.set(static_cast<std::size_t>(lo - m0) + i,
                                     applied.series.at(i));
            }
        } catch (const std::exception& e) {
            fold.failed = true;
            fold.warnings.push_back(std::string("fold failed: ") + e.what());
            result.warnings.push_back("block " + to_iso(block.start) + ".." +
                                      to_iso(block.end) +
                                      " left uncorrected: " + e.what());
        }
        result.folds.push_back(std::move(fold));
    }
    return result;
}

}  // namespace rainbc::cv
