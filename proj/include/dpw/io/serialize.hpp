#pragma once

#include <json.hpp>

#include "dpw/lab/convergence.hpp"
#include "dpw/lab/gaps.hpp"
#include "dpw/linalg/spectrum.hpp"
#include "dpw/solvable1d/floquet.hpp"

namespace dpw::io {

using Json = nlohmann::ordered_json;

Json to_json(const linalg::Spectrum& spec);
linalg::Spectrum spectrum_from_json(const Json& j);

Json to_json(const solvable1d::BandStructure& bands);
solvable1d::BandStructure bands_from_json(const Json& j);

/// Summary of a convergence study: limit spectrum, cutoff, per-mode fits
/// and the Hausdorff flags. Non-finite numbers become null.
Json summary_json(const lab::StudyResult& result);

/// Gap counts, both band structures and the per-gap deviations.
Json summary_json(const lab::GapReport& report, double rel_tol = 0.2);

}  // namespace dpw::io
