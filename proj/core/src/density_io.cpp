#include "abc/density_io.hpp"

#include <cmath>
#include <ostream>
#include <string>

#include "abc/format.hpp"

namespace abc {

void write_density_csv(std::ostream& out, const DensityEstimate& estimate) {
    const std::size_t p = estimate.grid.dim();
    for (std::size_t a = 0; a < p; ++a) out << "theta_" << a << ',';
    out << "g_hat\r\n";
    std::vector<double> point(p);
    for (std::size_t g = 0; g < estimate.values.size(); ++g) {
        estimate.grid.point(g, point);
        for (double x : point) out << format_double(x) << ',';
        out << format_double(estimate.values[g]) << "\r\n";
    }
}

nlohmann::ordered_json density_sidecar(const DensityEstimate& estimate) {
    const DensityMeta& meta = estimate.meta;
    nlohmann::ordered_json j;
    j["N"] = meta.n;
    j["k"] = meta.k;
    j["h"] = meta.h;
    if (std::isfinite(meta.radius_next)) {
        j["d_k_plus_1"] = meta.radius_next;
    } else {
        j["d_k_plus_1"] = nullptr;
    }
    j["kernel"] = std::string(to_string(meta.kernel));
    j["s0"] = meta.s0;
    j["seed"] = meta.seed;
    j["grid"] = {{"lower", estimate.grid.lower},
                 {"upper", estimate.grid.upper},
                 {"points", estimate.grid.points}};
    return j;
}

}  // namespace abc
