#include "capprice/model/io.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include <json.hpp>

#include "capprice/common/csv.hpp"
#include "capprice/common/error.hpp"
#include "capprice/common/numfmt.hpp"
#include "capprice/model/validate.hpp"

namespace capprice::model {

using nlohmann::json;

namespace {

// Line number of each object directly inside the array under `key`.
std::vector<int> array_item_lines(const std::string& text, const std::string& key) {
    std::vector<int> lines;
    const auto k = text.find("\"" + key + "\"");
    if (k == std::string::npos) return lines;
    const auto open = text.find('[', k);
    if (open == std::string::npos) return lines;
    int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(open), '\n'));
    int depth = 0;
    bool in_string = false;
    for (std::size_t i = open; i < text.size(); ++i) {
        const char ch = text[i];
        if (ch == '\n') ++line;
        if (in_string) {
            if (ch == '\\') ++i;
            else if (ch == '"') in_string = false;
            continue;
        }
        if (ch == '"') in_string = true;
        else if (ch == '[' || ch == '{') {
            if (ch == '{' && depth == 1) lines.push_back(line);
            ++depth;
        } else if (ch == ']' || ch == '}') {
            if (--depth == 0) break;
        }
    }
    return lines;
}

struct JsonSource {
    std::string file;
    std::vector<int> node_lines;
    std::vector<int> prosumer_lines;

    [[noreturn]] void fail(int line, const std::string& field, const std::string& msg) const {
        throw InputError(file, line, field, msg);
    }
};

double get_number(const json& obj, const char* key, const JsonSource& src, int line,
                  const std::string& prefix, std::optional<double> fallback = std::nullopt) {
    const auto it = obj.find(key);
    if (it == obj.end()) {
        if (fallback) return *fallback;
        src.fail(line, prefix + key, "missing field");
    }
    if (!it->is_number()) src.fail(line, prefix + key, "expected a number");
    return it->get<double>();
}

int get_int(const json& obj, const char* key, const JsonSource& src, int line, const std::string& prefix) {
    const auto it = obj.find(key);
    if (it == obj.end()) src.fail(line, prefix + key, "missing field");
    if (!it->is_number_integer()) src.fail(line, prefix + key, "expected an integer");
    return it->get<int>();
}

void load_network(const std::filesystem::path& path, Instance& inst) {
    std::ifstream in(path);
    if (!in) throw InputError(path.string(), 0, "", "cannot open file");
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        const auto upto = std::min<std::size_t>(e.byte, text.size());
        const int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(upto), '\n'));
        throw InputError(path.string(), line, "", std::string("invalid JSON: ") + e.what());
    }
    JsonSource src{path.string(), array_item_lines(text, "nodes"), array_item_lines(text, "prosumers")};
    if (!doc.is_object()) src.fail(1, "", "expected a JSON object");

    NetworkModel& net = inst.network;
    net.s_base_kva = get_number(doc, "s_base_kva", src, 1, "");
    net.v_base_kv = get_number(doc, "v_base_kv", src, 1, "");
    net.u_min = get_number(doc, "u_min", src, 1, "");
    net.u_max = get_number(doc, "u_max", src, 1, "");
    net.p_grid_kw = get_number(doc, "p_grid_kw", src, 1, "");
    net.q_grid_kvar = get_number(doc, "q_grid_kvar", src, 1, "");

    const auto nodes = doc.find("nodes");
    if (nodes == doc.end() || !nodes->is_array() || nodes->empty())
        src.fail(1, "nodes", "expected a nonempty array");
    const int n = static_cast<int>(nodes->size());
    std::vector<std::optional<NetworkNode>> slots(static_cast<std::size_t>(n));
    std::vector<int> line_of(static_cast<std::size_t>(n), 0);
    for (int k = 0; k < n; ++k) {
        const json& item = (*nodes)[static_cast<std::size_t>(k)];
        const int line = k < static_cast<int>(src.node_lines.size()) ? src.node_lines[static_cast<std::size_t>(k)] : 0;
        const std::string prefix = "nodes[" + std::to_string(k) + "].";
        if (!item.is_object()) src.fail(line, prefix, "expected an object");
        NetworkNode node;
        node.id = get_int(item, "id", src, line, prefix);
        if (node.id < 0 || node.id >= n) src.fail(line, prefix + "id", "node ids must be 0..N-1");
        if (slots[static_cast<std::size_t>(node.id)]) src.fail(line, prefix + "id", "duplicate node id");
        const auto parent = item.find("parent");
        if (parent == item.end() || parent->is_null()) {
            node.parent = -1;
        } else {
            if (!parent->is_number_integer()) src.fail(line, prefix + "parent", "expected an integer");
            node.parent = parent->get<int>();
        }
        if (node.id == 0 && node.parent != -1) src.fail(line, prefix + "parent", "node 0 is the root");
        if (node.id != 0) {
            if (node.parent < 0 || node.parent >= n)
                src.fail(line, prefix + "parent", "dangling parent " + std::to_string(node.parent));
            if (node.parent == node.id) src.fail(line, prefix + "parent", "node is its own parent");
        }
        node.r_pu = get_number(item, "r_pu", src, line, prefix, node.id == 0 ? std::optional(0.0) : std::nullopt);
        node.x_pu = get_number(item, "x_pu", src, line, prefix, node.id == 0 ? std::optional(0.0) : std::nullopt);
        node.s_sq_max_pu = get_number(item, "s_sq_max_pu", src, line, prefix,
                                      node.id == 0 ? std::optional(1.0) : std::nullopt);
        line_of[static_cast<std::size_t>(node.id)] = line;
        slots[static_cast<std::size_t>(node.id)] = node;
    }
    net.nodes.clear();
    for (auto& s : slots) net.nodes.push_back(*s);
    // Every parent chain has to reach node 0 within N steps.
    for (int k = 1; k < n; ++k) {
        int p = k;
        int steps = 0;
        while (p != 0 && steps <= n) {
            p = net.nodes[static_cast<std::size_t>(p)].parent;
            ++steps;
        }
        if (p != 0)
            src.fail(line_of[static_cast<std::size_t>(k)],
                     "nodes[" + std::to_string(k) + "].parent",
                     "cyclic network: node " + std::to_string(k) + " never reaches node 0");
    }

    inst.prosumers.clear();
    const auto pros = doc.find("prosumers");
    if (pros == doc.end()) {
        for (int k = 0; k < n; ++k) {
            ProsumerAssets p;
            p.id = k;
            p.node = k;
            inst.prosumers.push_back(p);
        }
    } else {
        if (!pros->is_array()) src.fail(1, "prosumers", "expected an array");
        std::set<int> ids;
        for (std::size_t k = 0; k < pros->size(); ++k) {
            const json& item = (*pros)[k];
            const int line = k < src.prosumer_lines.size() ? src.prosumer_lines[k] : 0;
            const std::string prefix = "prosumers[" + std::to_string(k) + "].";
            if (!item.is_object()) src.fail(line, prefix, "expected an object");
            ProsumerAssets p;
            p.id = get_int(item, "id", src, line, prefix);
            if (!ids.insert(p.id).second) src.fail(line, prefix + "id", "duplicate prosumer id");
            p.node = get_int(item, "node", src, line, prefix);
            if (p.node < 0 || p.node >= n)
                src.fail(line, prefix + "node", "dangling node reference " + std::to_string(p.node));
            p.p_bat_kw = get_number(item, "p_bat_kw", src, line, prefix, 0.0);
            p.e_bat_kwh = get_number(item, "e_bat_kwh", src, line, prefix, 0.0);
            p.eta_ch = get_number(item, "eta_ch", src, line, prefix, 1.0);
            p.eta_dis = get_number(item, "eta_dis", src, line, prefix, 1.0);
            p.sigma = get_number(item, "sigma", src, line, prefix, 0.0);
            inst.prosumers.push_back(p);
        }
        if (inst.prosumers.empty()) src.fail(1, "prosumers", "no prosumers listed");
    }
}

std::vector<double> load_prices(const std::filesystem::path& path) {
    CsvReader csv(path);
    csv.expect_header({"t", "lambda_spot"});
    std::vector<double> spot;
    while (csv.next()) {
        if (csv.fields().size() != 2) csv.fail("", "expected 2 columns");
        const int t = csv.integer(0, "t");
        if (t != static_cast<int>(spot.size()) + 1) csv.fail("t", "periods must run 1..T in order");
        spot.push_back(csv.number(1, "lambda_spot"));
    }
    if (spot.empty()) csv.fail("t", "no periods");
    return spot;
}

void load_contract(const std::filesystem::path& path, int T, DsoContract& c) {
    CsvReader csv(path);
    csv.expect_header({"t", "p_cap_kw", "alpha_dkk_per_kwh", "beta", "y_im", "y_ex"});
    bool have_shed = false;
    int expected = 1;
    while (csv.next()) {
        const auto& f = csv.fields();
        if (!f.empty() && f[0] == "alpha_shed") {
            if (f.size() != 2) csv.fail("alpha_shed", "expected 'alpha_shed,<value>'");
            if (have_shed) csv.fail("alpha_shed", "repeated");
            c.alpha_shed = csv.number(1, "alpha_shed");
            have_shed = true;
            continue;
        }
        if (f.size() != 6) csv.fail("", "expected 6 columns");
        const int t = csv.integer(0, "t");
        if (t != expected) csv.fail("t", "periods must run 1..T in order");
        if (t > T) csv.fail("t", "horizon-length mismatch: prices have " + std::to_string(T) + " periods");
        ++expected;
        c.p_cap_kw.push_back(csv.number(1, "p_cap_kw"));
        c.alpha_dso.push_back(csv.number(2, "alpha_dkk_per_kwh"));
        c.beta.push_back(csv.number(3, "beta"));
        c.y_im.push_back(csv.number(4, "y_im"));
        c.y_ex.push_back(csv.number(5, "y_ex"));
    }
    if (static_cast<int>(c.p_cap_kw.size()) != T)
        throw InputError(path.string(), 0, "t",
                         "horizon-length mismatch: " + std::to_string(c.p_cap_kw.size()) +
                             " periods, prices have " + std::to_string(T));
    if (!have_shed) throw InputError(path.string(), 0, "alpha_shed", "missing alpha_shed line");
}

void load_profiles(const std::filesystem::path& path, int T, std::vector<ProsumerAssets>& pros) {
    CsvReader csv(path);
    csv.expect_header({"prosumer_id", "t", "demand_kw", "pv_kw"});
    std::map<int, std::size_t> index;
    for (std::size_t i = 0; i < pros.size(); ++i) {
        index[pros[i].id] = i;
        pros[i].demand_kw.assign(static_cast<std::size_t>(T), 0.0);
        pros[i].pv_kw.assign(static_cast<std::size_t>(T), 0.0);
    }
    std::vector<std::vector<bool>> seen(pros.size(), std::vector<bool>(static_cast<std::size_t>(T), false));
    while (csv.next()) {
        if (csv.fields().size() != 4) csv.fail("", "expected 4 columns");
        const int id = csv.integer(0, "prosumer_id");
        const auto it = index.find(id);
        if (it == index.end()) csv.fail("prosumer_id", "unknown prosumer " + std::to_string(id));
        const int t = csv.integer(1, "t");
        if (t < 1 || t > T)
            csv.fail("t", "horizon-length mismatch: t=" + std::to_string(t) + " outside 1.." + std::to_string(T));
        const auto ts = static_cast<std::size_t>(t - 1);
        if (seen[it->second][ts]) csv.fail("t", "duplicate row");
        seen[it->second][ts] = true;
        pros[it->second].demand_kw[ts] = csv.number(2, "demand_kw");
        pros[it->second].pv_kw[ts] = csv.number(3, "pv_kw");
    }
    for (std::size_t i = 0; i < pros.size(); ++i)
        for (int t = 0; t < T; ++t)
            if (!seen[i][static_cast<std::size_t>(t)])
                throw InputError(path.string(), 0, "t",
                                 "horizon-length mismatch: prosumer " + std::to_string(pros[i].id) +
                                     " has no row for t=" + std::to_string(t + 1));
}

}  // namespace

InstanceFiles InstanceFiles::in_directory(const std::filesystem::path& dir) {
    return {dir / "network.json", dir / "profiles.csv", dir / "contract.csv", dir / "prices.csv"};
}

Instance load_instance(const InstanceFiles& files, const PricingConfig& config) {
    Instance inst;
    inst.config = config;
    load_network(files.network, inst);
    inst.prices.spot = load_prices(files.prices);
    const int T = inst.horizon();
    load_contract(files.contract, T, inst.contract);
    load_profiles(files.profiles, T, inst.prosumers);
    finalize(inst.network, inst.prosumers);

    const auto diags = validate_instance(inst);
    if (!diags.empty()) {
        const Diagnostic& d = diags.front();
        std::string file;
        if (d.part == "network") file = files.network.string();
        else if (d.part == "profiles") file = files.profiles.string();
        else if (d.part == "contract") file = files.contract.string();
        else if (d.part == "prices") file = files.prices.string();
        else file = "config";
        throw InputError(file, 0, d.invariant, d.message);
    }
    return inst;
}

void write_instance(const Instance& inst, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    const InstanceFiles files = InstanceFiles::in_directory(dir);

    json doc = json::object();
    doc["s_base_kva"] = inst.network.s_base_kva;
    doc["v_base_kv"] = inst.network.v_base_kv;
    doc["u_min"] = inst.network.u_min;
    doc["u_max"] = inst.network.u_max;
    doc["p_grid_kw"] = inst.network.p_grid_kw;
    doc["q_grid_kvar"] = inst.network.q_grid_kvar;
    json nodes = json::array();
    for (const NetworkNode& n : inst.network.nodes) {
        json item = json::object();
        item["id"] = n.id;
        item["parent"] = n.parent < 0 ? json(nullptr) : json(n.parent);
        item["r_pu"] = n.r_pu;
        item["x_pu"] = n.x_pu;
        item["s_sq_max_pu"] = n.s_sq_max_pu;
        nodes.push_back(item);
    }
    doc["nodes"] = nodes;
    json pros = json::array();
    for (const ProsumerAssets& p : inst.prosumers) {
        json item = json::object();
        item["id"] = p.id;
        item["node"] = p.node;
        item["p_bat_kw"] = p.p_bat_kw;
        item["e_bat_kwh"] = p.e_bat_kwh;
        item["eta_ch"] = p.eta_ch;
        item["eta_dis"] = p.eta_dis;
        item["sigma"] = p.sigma;
        pros.push_back(item);
    }
    doc["prosumers"] = pros;
    {
        std::ofstream out(files.network, std::ios::binary);
        if (!out) throw InputError(files.network.string(), 0, "", "cannot open for writing");
        out << doc.dump(2) << '\n';
    }

    const auto T = static_cast<std::size_t>(inst.horizon());
    {
        CsvWriter w(files.profiles, {"prosumer_id", "t", "demand_kw", "pv_kw"});
        for (const ProsumerAssets& p : inst.prosumers)
            for (std::size_t t = 0; t < T; ++t)
                w.row({std::to_string(p.id), std::to_string(t + 1), fmt_num(p.demand_kw[t]), fmt_num(p.pv_kw[t])});
    }
    {
        const DsoContract& c = inst.contract;
        CsvWriter w(files.contract, {"t", "p_cap_kw", "alpha_dkk_per_kwh", "beta", "y_im", "y_ex"});
        for (std::size_t t = 0; t < T; ++t)
            w.row({std::to_string(t + 1), fmt_num(c.p_cap_kw[t]), fmt_num(c.alpha_dso[t]), fmt_num(c.beta[t]),
                   fmt_num(c.y_im[t]), fmt_num(c.y_ex[t])});
        w.row({"alpha_shed", fmt_num(c.alpha_shed)});
    }
    {
        CsvWriter w(files.prices, {"t", "lambda_spot"});
        for (std::size_t t = 0; t < T; ++t) w.row({std::to_string(t + 1), fmt_num(inst.prices.spot[t])});
    }
}

}  // namespace capprice::model
