#include "capprice/model/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "capprice/common/csv.hpp"
#include "capprice/common/numfmt.hpp"

namespace capprice::model {

namespace {

// std distributions are implementation-defined; map raw bits ourselves so
// profiles are identical across standard libraries.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double bump(double hour, double centre, double width) {
    const double d = (hour - centre) / width;
    return std::exp(-0.5 * d * d);
}

double round_to(double v, double step) { return std::round(v / step) * step; }

}  // namespace

Profiles synth_profiles(std::uint64_t seed, int members, int horizon, const ProfileShape& shape) {
    if (members < 1 || horizon < 1) throw std::invalid_argument("members and horizon must be >= 1");
    std::mt19937_64 rng(seed);
    Profiles out;
    out.demand_kw.assign(static_cast<std::size_t>(members), std::vector<double>(static_cast<std::size_t>(horizon)));
    out.pv_kw = out.demand_kw;
    for (int i = 0; i < members; ++i) {
        const double scale = 0.7 + 0.6 * unit(rng);
        const double shift = (unit(rng) - 0.5) * 1.5;
        const bool pv = std::find(shape.pv_owners.begin(), shape.pv_owners.end(), i) != shape.pv_owners.end();
        const double pv_scale = 0.8 + 0.4 * unit(rng);
        for (int t = 0; t < horizon; ++t) {
            const double hour = (t + 0.5) * 24.0 / horizon;
            const double shape_kw = shape.base_kw + shape.morning_peak_kw * bump(hour, 8.0 + shift, 1.5) +
                                    shape.evening_peak_kw * bump(hour, 19.0 + shift, 2.0);
            const double noise = 1.0 + shape.noise * (2.0 * unit(rng) - 1.0);
            const auto ti = static_cast<std::size_t>(t);
            auto& d = out.demand_kw[static_cast<std::size_t>(i)][ti];
            d = round_to(std::max(0.0, scale * shape_kw * noise), 1e-3);
            if (pv && hour > 6.0 && hour < 18.0) {
                const double sun = std::sin(std::numbers::pi * (hour - 6.0) / 12.0);
                out.pv_kw[static_cast<std::size_t>(i)][ti] = round_to(shape.pv_peak_kw * pv_scale * sun * sun, 1e-3);
            }
        }
    }
    return out;
}

void write_profiles_csv(const Profiles& p, const std::filesystem::path& path) {
    CsvWriter w(path, {"prosumer_id", "t", "demand_kw", "pv_kw"});
    for (std::size_t i = 0; i < p.demand_kw.size(); ++i)
        for (std::size_t t = 0; t < p.demand_kw[i].size(); ++t)
            w.row({std::to_string(i), std::to_string(t + 1), fmt_num(p.demand_kw[i][t]), fmt_num(p.pv_kw[i][t])});
}

}  // namespace capprice::model
