#include "dpw/io/csv.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>

#include "dpw/error.hpp"

namespace dpw::io {

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0) return "0";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void write_spectrum_csv(std::ostream& os, const linalg::Spectrum& spec) {
    os << "k,lambda,residual\n";
    for (std::size_t k = 0; k < spec.values.size(); ++k) {
        const double res = k < spec.residuals.size() ? spec.residuals[k] : 0.0;
        os << k + 1 << ',' << format_number(spec.values[k]) << ',' << format_number(res) << '\n';
    }
}

void write_bands_csv(std::ostream& os, const solvable1d::BandStructure& bands) {
    os << "kind,index,lo,hi\n";
    for (std::size_t i = 0; i < bands.bands.size(); ++i)
        os << "band," << i + 1 << ',' << format_number(bands.bands[i].lo) << ',' << format_number(bands.bands[i].hi)
           << '\n';
    for (std::size_t i = 0; i < bands.gaps.size(); ++i)
        os << "gap," << i + 1 << ',' << format_number(bands.gaps[i].lo) << ',' << format_number(bands.gaps[i].hi)
           << '\n';
}

void write_capacity_csv(std::ostream& os, const std::vector<CapacityRow>& rows) {
    os << "d,r,mesh_level,cap_energy,cap_flux,cap_asymptotic,rel_gap\n";
    for (const auto& r : rows)
        os << format_number(r.d) << ',' << format_number(r.r) << ',' << r.mesh_level << ','
           << format_number(r.cap_energy) << ',' << format_number(r.cap_flux) << ','
           << format_number(r.cap_asymptotic) << ',' << format_number(r.rel_gap) << '\n';
}

void write_study_csv(std::ostream& os, const lab::StudyResult& result) {
    const std::size_t m = result.limit.size();
    os << "eps,d,gamma_eps,feasible,mesh_limited,nodes,rate,dist_out,dist_in,dist_h";
    for (const char* name : {"lambda", "limit", "mesh_error", "lambda_diff", "diff", "diff_nearest"})
        for (std::size_t k = 1; k <= m; ++k) os << ',' << name << '_' << k;
    os << '\n';
    for (const auto& row : result.rows) {
        os << format_number(row.eps) << ',';
        if (!row.feasible) {
            os << ",,0,,";
            for (std::size_t c = 0; c < 4 + 6 * m; ++c) os << ',';
            os << '\n';
            continue;
        }
        os << format_number(row.d) << ',' << format_number(row.gamma_eps) << ",1," << (row.mesh_limited ? 1 : 0)
           << ',' << row.nodes << ',' << format_number(row.rate) << ',' << format_number(row.dist_out) << ','
           << format_number(row.dist_in) << ',' << format_number(row.dist_h);
        for (const auto* v : {&row.lambda, &result.limit, &row.mesh_error, &row.lambda_diff, &row.diff,
                              &row.diff_nearest})
            for (std::size_t k = 0; k < m; ++k) os << ',' << format_number((*v)[k]);
        os << '\n';
    }
}

void write_gaps_csv(std::ostream& os, const lab::GapReport& report) {
    os << "index,wg_lo,wg_hi,kp_lo,kp_hi,rel_lo,rel_hi\n";
    for (std::size_t i = 0; i < report.matches.size(); ++i) {
        const auto& g = report.matches[i];
        os << i + 1 << ',' << format_number(g.waveguide.lo) << ',' << format_number(g.waveguide.hi) << ',';
        if (g.kp)
            os << format_number(g.kp->lo) << ',' << format_number(g.kp->hi) << ',' << format_number(g.rel_lo) << ','
               << format_number(g.rel_hi);
        else
            os << ",,,";
        os << '\n';
    }
}

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out(1);
    for (char ch : line) {
        if (ch == ',')
            out.emplace_back();
        else if (ch != '\r')
            out.back() += ch;
    }
    return out;
}

}  // namespace

std::size_t CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    throw ContractError("CsvTable: no column '" + name + "'");
}

CsvTable read_csv(std::istream& is) {
    CsvTable t;
    std::string line;
    if (!std::getline(is, line)) throw ContractError("read_csv: missing header");
    t.header = split(line);
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        auto fields = split(line);
        if (fields.size() != t.header.size()) throw ContractError("read_csv: row width differs from the header");
        t.rows.push_back(std::move(fields));
    }
    return t;
}

}  // namespace dpw::io
