#include "dpw/io/serialize.hpp"

#include <cmath>

#include "dpw/solvable1d/floquet.hpp"

namespace dpw::io {

namespace {

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json numbers(const std::vector<double>& v) {
    Json a = Json::array();
    for (double x : v) a.push_back(number(x));
    return a;
}

std::vector<double> numbers_from(const Json& j) {
    std::vector<double> out;
    for (const auto& x : j) out.push_back(x.is_null() ? std::nan("") : x.get<double>());
    return out;
}

Json intervals(const std::vector<solvable1d::Interval>& v) {
    Json a = Json::array();
    for (const auto& i : v) a.push_back(Json::array({i.lo, i.hi}));
    return a;
}

std::vector<solvable1d::Interval> intervals_from(const Json& j) {
    std::vector<solvable1d::Interval> out;
    for (const auto& i : j) out.push_back({i.at(0).get<double>(), i.at(1).get<double>()});
    return out;
}

}  // namespace

Json to_json(const linalg::Spectrum& spec) {
    Json j;
    j["values"] = numbers(spec.values);
    j["residuals"] = numbers(spec.residuals);
    j["tol"] = spec.tol;
    j["converged"] = spec.converged;
    return j;
}

linalg::Spectrum spectrum_from_json(const Json& j) {
    linalg::Spectrum s;
    s.values = numbers_from(j.at("values"));
    s.residuals = numbers_from(j.at("residuals"));
    s.tol = j.at("tol").get<double>();
    s.converged = j.at("converged").get<bool>();
    return s;
}

Json to_json(const solvable1d::BandStructure& bands) {
    Json j;
    j["lambda_max"] = bands.lambda_max;
    j["bands"] = intervals(bands.bands);
    j["gaps"] = intervals(bands.gaps);
    return j;
}

solvable1d::BandStructure bands_from_json(const Json& j) {
    solvable1d::BandStructure b;
    b.lambda_max = j.at("lambda_max").get<double>();
    b.bands = intervals_from(j.at("bands"));
    b.gaps = intervals_from(j.at("gaps"));
    return b;
}

Json summary_json(const lab::StudyResult& result) {
    Json j;
    j["limit"] = numbers(result.limit);
    j["beta"] = number(result.beta);
    j["cutoff"] = result.cutoff;
    Json rows = Json::array();
    for (const auto& r : result.rows) {
        Json row;
        row["eps"] = r.eps;
        row["feasible"] = r.feasible;
        if (!r.feasible) row["reason"] = r.infeasible_reason;
        row["mesh_limited"] = r.mesh_limited;
        rows.push_back(row);
    }
    j["rows"] = rows;
    Json used = Json::array();
    for (std::size_t i : result.used_rows) used.push_back(result.rows[i].eps);
    j["used_eps"] = used;
    Json modes = Json::array();
    for (const auto& m : result.modes) {
        Json mode;
        mode["k"] = m.k;
        mode["exact"] = m.exact;
        mode["monotone"] = m.monotone;
        mode["slope"] = number(m.slope);
        mode["r2"] = number(m.r2);
        mode["c_fit"] = number(m.c_fit);
        mode["residual_factor"] = number(m.residual_factor);
        modes.push_back(mode);
    }
    j["modes"] = modes;
    j["hausdorff_monotone"] = result.hausdorff_monotone;
    j["hausdorff_bounded"] = result.hausdorff_bounded;
    return j;
}

Json summary_json(const lab::GapReport& report, double rel_tol) {
    Json j;
    j["d"] = report.d;
    j["beta"] = number(report.beta);
    j["waveguide"] = to_json(report.waveguide);
    j["kp"] = to_json(report.kp);
    j["gaps_waveguide"] = solvable1d::count_gaps(report.waveguide);
    j["gaps_kp"] = solvable1d::count_gaps(report.kp);
    Json matches = Json::array();
    for (const auto& m : report.matches) {
        Json g;
        g["waveguide"] = Json::array({m.waveguide.lo, m.waveguide.hi});
        if (m.kp) {
            g["kp"] = Json::array({m.kp->lo, m.kp->hi});
            g["deviation"] = m.deviation();
        } else {
            g["kp"] = nullptr;
        }
        matches.push_back(g);
    }
    j["matches"] = matches;
    j["rel_tol"] = rel_tol;
    j["matched_within_tol"] = report.matched_within(rel_tol);
    return j;
}

}  // namespace dpw::io
