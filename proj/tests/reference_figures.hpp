#pragma once

#include <array>

#include "danae/evalkit.hpp"

// Published per-angle figures (mean dev, max dev, RMSE) for the OxIOD and UCS
// experiments, roll/pitch/yaw. UCS yaw was not reported.
namespace reference {

inline constexpr double kOxiodMeanReduction = 63.0;
inline constexpr double kUcsMeanReduction = 55.0;

inline const std::array<danae::Deviation, 3> kOxiodKf{{{0.0661, 0.2929, 0.0815},
                                                       {0.0483, 0.2134, 0.0600},
                                                       {1.9518, 9.0145, 2.4000}}};
inline const std::array<danae::Deviation, 3> kOxiodDanae{{{0.0224, 0.1382, 0.0282},
                                                          {0.0157, 0.1082, 0.0196},
                                                          {0.7392, 5.7907, 1.3194}}};

inline const std::array<danae::Deviation, 3> kUcsKf{{{0.0326, 0.1476, 0.0410}, {0.0328, 0.1751, 0.0412}, {}}};
inline const std::array<danae::Deviation, 3> kUcsDanae{{{0.0139, 0.0671, 0.0177}, {0.0147, 0.0769, 0.0190}, {}}};
inline constexpr std::array<bool, 3> kUcsIncluded{true, true, false};

}  // namespace reference
