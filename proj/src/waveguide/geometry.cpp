#include "dpw/waveguide/geometry.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "dpw/error.hpp"

namespace dpw::waveguide {

double WaveguideGeometry::lambda_S() const {
    const double w = s_b - s_a;
    return std::numbers::pi * std::numbers::pi / (w * w);
}

void WaveguideGeometry::validate_structure() const {
    auto fail = [](const std::string& what) { throw ContractError("waveguide geometry: " + what); };
    if (!(L_minus < 0.0) || !(L_plus > 0.0) || !std::isfinite(L_minus) || !std::isfinite(L_plus)) {
        fail("need finite L_minus < 0 < L_plus");
    }
    if (!(eps > 0.0 && eps < 1.0)) fail("eps must lie in (0, 1)");
    if (!(s_a < 0.0 && s_b > 0.0)) fail("cross-section needs s_a < 0 < s_b");
    if (!(d >= 0.0) || !std::isfinite(d)) fail("d must be finite and >= 0");
    if (!(r > 0.0)) fail("r must be positive");
    const double w = window_half();
    if (w > eps * std::min(-s_a, s_b) * (1 + 1e-12)) {
        std::ostringstream os;
        os << "window half-width d r = " << w << " exceeds the cross-section [" << x_min() << ", " << x_max() << "]";
        fail(os.str());
    }
}

void WaveguideGeometry::check_paper_conditions() const {
    if (d > eps) {
        std::ostringstream os;
        os << "d = " << d << " > eps = " << eps << " violates d_eps <= eps";
        throw InfeasibleError("d_eps <= eps", os.str());
    }
    if (!(-r > s_a && r < s_b)) {
        std::ostringstream os;
        os << "[-r, r] = [" << -r << ", " << r << "] is not inside S = (" << s_a << ", " << s_b
           << "), violating closure of the window ball inside S";
        throw InfeasibleError("[-r, r] inside S", os.str());
    }
}

}  // namespace dpw::waveguide
