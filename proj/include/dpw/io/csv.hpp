#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "dpw/lab/convergence.hpp"
#include "dpw/lab/gaps.hpp"
#include "dpw/linalg/spectrum.hpp"
#include "dpw/solvable1d/floquet.hpp"

namespace dpw::io {

/// Shortest decimal that reads back to the same double; "nan", "inf", "-inf"
/// for non-finite values.
std::string format_number(double v);

/// Header "k,lambda,residual", k from 1.
void write_spectrum_csv(std::ostream& os, const linalg::Spectrum& spec);

/// Header "kind,index,lo,hi"; bands first, then gaps, index from 1 per kind.
void write_bands_csv(std::ostream& os, const solvable1d::BandStructure& bands);

struct CapacityRow {
    double d = 0.0;
    double r = 0.0;
    int mesh_level = 0;
    double cap_energy = 0.0;
    double cap_flux = 0.0;
    double cap_asymptotic = 0.0;
    double rel_gap = 0.0;
};

/// Header "d,r,mesh_level,cap_energy,cap_flux,cap_asymptotic,rel_gap".
void write_capacity_csv(std::ostream& os, const std::vector<CapacityRow>& rows);

/// One row per eps. Header
/// "eps,d,gamma_eps,feasible,mesh_limited,nodes,rate,dist_out,dist_in,dist_h"
/// followed by lambda_k, limit_k, mesh_error_k, lambda_diff_k, diff_k and
/// diff_nearest_k for k = 1..m. Numeric fields of infeasible rows are empty.
void write_study_csv(std::ostream& os, const lab::StudyResult& result);

/// Header "index,wg_lo,wg_hi,kp_lo,kp_hi,rel_lo,rel_hi"; KP fields are empty
/// for unmatched gaps.
void write_gaps_csv(std::ostream& os, const lab::GapReport& report);

/// Minimal reader for the files above: header names and rows of fields.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Column index by name; ContractError when missing.
    std::size_t column(const std::string& name) const;
};
CsvTable read_csv(std::istream& is);

}  // namespace dpw::io
