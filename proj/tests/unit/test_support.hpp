#pragma once

#include "hcran/simulation.hpp"

namespace testing_support {

inline hcran::DrawContext draw(double snr_db, std::uint64_t tag, int i,
                               hcran::CsiKind csi = hcran::CsiKind::Perfect) {
    hcran::SimulationConfig cfg;
    cfg.csi = csi;
    hcran::RandomStream rng(2024, {tag, static_cast<std::uint64_t>(i)});
    return hcran::draw_tti(cfg, cfg.P_max / std::pow(10.0, snr_db / 10.0), rng);
}

inline hcran::RateModel perfect_model(const hcran::DrawContext& d, hcran::LogBase log = hcran::LogBase{}) {
    return hcran::RateModel::perfect(d.channel, d.lsf, d.noise_var, log);
}

}  // namespace testing_support
