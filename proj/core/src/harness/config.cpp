#include "capprice/harness/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "capprice/common/error.hpp"
#include "capprice/common/numfmt.hpp"
#include "capprice/scenario/baselines.hpp"

namespace capprice::harness {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

struct Parser {
    std::string file;
    int line = 0;
    std::string key;

    [[noreturn]] void fail(const std::string& msg) const { throw InputError(file, line, key, msg); }

    double number(const std::string& v) const {
        double out = 0.0;
        const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
        if (r.ec != std::errc{} || r.ptr != v.data() + v.size()) fail("expected a number, got '" + v + "'");
        return out;
    }

    long integer(const std::string& v) const {
        long out = 0;
        const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
        if (r.ec != std::errc{} || r.ptr != v.data() + v.size()) fail("expected an integer, got '" + v + "'");
        return out;
    }

    std::vector<double> grid(const std::string& v) const {
        std::vector<double> out;
        std::stringstream in(v);
        std::string item;
        while (std::getline(in, item, ',')) out.push_back(number(trim(item)));
        if (out.empty()) fail("empty grid");
        return out;
    }
};

std::string grid_text(const std::vector<double>& g) {
    std::string out;
    for (std::size_t k = 0; k < g.size(); ++k) out += (k ? "," : "") + fmt_num(g[k]);
    return out;
}

}  // namespace

HarnessConfig parse_config_text(const std::string& text, const std::filesystem::path& origin) {
    HarnessConfig c;
    c.source = origin;
    const auto base = origin.has_parent_path() ? origin.parent_path() : std::filesystem::path(".");
    Parser p{origin.string(), 0, {}};
    bool has_instance = false;
    std::filesystem::path overrides[4];
    std::stringstream in(text);
    std::string raw;
    while (std::getline(in, raw)) {
        ++p.line;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        p.key.clear();
        if (eq == std::string::npos) p.fail("expected key = value");
        p.key = trim(line.substr(0, eq));
        const std::string v = trim(line.substr(eq + 1));
        if (v.empty()) p.fail("missing value");
        auto& pc = c.pricing;
        if (p.key == "instance") {
            c.files = model::InstanceFiles::in_directory(base / v);
            has_instance = true;
        } else if (p.key == "network") overrides[0] = base / v;
        else if (p.key == "profiles") overrides[1] = base / v;
        else if (p.key == "contract") overrides[2] = base / v;
        else if (p.key == "prices") overrides[3] = base / v;
        else if (p.key == "variation") {
            c.variation = p.number(v);
            c.has_variation = true;
            if (c.variation < 0.0 || c.variation > 1.0) p.fail("variation factor outside [0,1]");
        } else if (p.key == "beta") {
            c.beta = p.number(v);
            c.has_beta = true;
            if (c.beta < 0.0 || c.beta > 1.0) p.fail("discount outside [0,1]");
        } else if (p.key == "mode") {
            try {
                pc.mode = model::parse_distribution_mode(v);
            } catch (const std::invalid_argument& e) {
                p.fail(e.what());
            }
        } else if (p.key == "gamma") pc.gamma = p.number(v);
        else if (p.key == "rho") pc.rho = p.number(v);
        else if (p.key == "backend") {
            try {
                pc.backend = model::parse_backend(v);
            } catch (const std::invalid_argument& e) {
                p.fail(e.what());
            }
        } else if (p.key == "external_command") pc.external_command = v;
        else if (p.key == "cone_segments") {
            pc.cone_segments = static_cast<int>(p.integer(v));
            if (pc.cone_segments < 4) p.fail("cone polygon needs at least 4 segments");
        } else if (p.key == "node_limit") pc.node_limit = p.integer(v);
        else if (p.key == "time_limit_seconds") pc.time_limit_seconds = p.number(v);
        else if (p.key == "feasibility_tol") pc.feasibility_tol = p.number(v);
        else if (p.key == "gap_tol") pc.gap_tol = p.number(v);
        else if (p.key == "beta_grid") c.beta_grid = p.grid(v);
        else if (p.key == "variation_grid") c.variation_grid = p.grid(v);
        else if (p.key == "v_floor") c.v_floor = p.number(v);
        else if (p.key == "seed") c.seed = static_cast<unsigned long>(p.integer(v));
        else p.fail("unknown key");
    }
    p.line = 0;
    p.key.clear();
    if (!has_instance && (overrides[0].empty() || overrides[1].empty() || overrides[2].empty() || overrides[3].empty()))
        p.fail("no instance directory and not all four instance files given");
    if (!overrides[0].empty()) c.files.network = overrides[0];
    if (!overrides[1].empty()) c.files.profiles = overrides[1];
    if (!overrides[2].empty()) c.files.contract = overrides[2];
    if (!overrides[3].empty()) c.files.prices = overrides[3];
    return c;
}

HarnessConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError(path.string(), 0, "", "cannot open config file");
    std::stringstream text;
    text << in.rdbuf();
    return parse_config_text(text.str(), path);
}

model::Instance load_case(const HarnessConfig& c) {
    model::Instance inst = model::load_instance(c.files, c.pricing);
    if (c.has_variation)
        inst.contract.p_cap_kw =
            scenario::gen_capacity_curve(inst.prices.spot, inst.community_residual(), c.variation);
    if (c.has_beta) inst.contract.beta.assign(static_cast<std::size_t>(inst.horizon()), c.beta);
    return inst;
}

std::string format_config(const HarnessConfig& c) {
    std::ostringstream out;
    const auto& pc = c.pricing;
    out << "network = " << c.files.network.string() << "\n"
        << "profiles = " << c.files.profiles.string() << "\n"
        << "contract = " << c.files.contract.string() << "\n"
        << "prices = " << c.files.prices.string() << "\n";
    if (c.has_variation) out << "variation = " << fmt_num(c.variation) << "\n";
    if (c.has_beta) out << "beta = " << fmt_num(c.beta) << "\n";
    out << "mode = " << model::to_string(pc.mode) << "\n"
        << "gamma = " << fmt_num(pc.gamma) << "\n"
        << "rho = " << fmt_num(pc.rho) << "\n"
        << "backend = " << model::to_string(pc.backend) << "\n";
    if (!pc.external_command.empty()) out << "external_command = " << pc.external_command << "\n";
    out << "cone_segments = " << pc.cone_segments << "\n"
        << "node_limit = " << pc.node_limit << "\n"
        << "time_limit_seconds = " << fmt_num(pc.time_limit_seconds) << "\n"
        << "feasibility_tol = " << fmt_num(pc.feasibility_tol) << "\n"
        << "gap_tol = " << fmt_num(pc.gap_tol) << "\n"
        << "beta_grid = " << grid_text(c.beta_grid) << "\n"
        << "variation_grid = " << grid_text(c.variation_grid) << "\n"
        << "v_floor = " << fmt_num(c.v_floor) << "\n"
        << "seed = " << c.seed << "\n";
    return out.str();
}

}  // namespace capprice::harness
