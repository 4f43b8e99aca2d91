// Must not compile: the calibration stage accepts Model-Eval scores only.
// With POSITIVE_CONTROL defined it must compile.

#include "infodensity/calibrate/calibrate.hpp"

using namespace infodensity::calibrate;

int leakage_probe() {
#ifdef POSITIVE_CONTROL
    ModelScores scores;
#else
    HumanScoreTable scores;
#endif
    FeatureTable features;
    const auto result = calibrate(features, scores);
    return static_cast<int>(result.benchmarks.size());
}
