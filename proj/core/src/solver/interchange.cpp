#include "capprice/solver/interchange.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "capprice/common/error.hpp"

namespace capprice::solver {

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

const char* sense_code(Sense s) {
    switch (s) {
        case Sense::Eq: return "E";
        case Sense::Le: return "L";
        case Sense::Ge: return "G";
    }
    return "E";
}

std::string tag_out(const std::string& tag) { return tag.empty() ? "-" : tag; }
std::string tag_in(const std::string& tag) { return tag == "-" ? std::string{} : tag; }

void check_name(const std::string& name) {
    if (name.empty() || name.find_first_of(" \t\r\n") != std::string::npos)
        throw std::invalid_argument("name not serializable: '" + name + "'");
}

void write_terms(std::ostream& out, const ModelIR& ir, const std::vector<Term>& terms) {
    out << ' ' << terms.size();
    for (const Term& t : terms) out << ' ' << ir.var(t.var).name << ' ' << num(t.coef);
}

class Reader {
public:
    Reader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

    bool next_line() {
        while (std::getline(in_, line_)) {
            ++line_no_;
            if (!line_.empty() && line_.back() == '\r') line_.pop_back();
            if (line_.find_first_not_of(" \t") == std::string::npos) continue;
            fields_.clear();
            pos_ = 0;
            std::istringstream ss(line_);
            std::string f;
            while (ss >> f) fields_.push_back(f);
            return true;
        }
        return false;
    }

    void require_line(const std::string& what) {
        if (!next_line()) fail(what, "unexpected end of file");
    }

    bool done() const { return pos_ >= fields_.size(); }

    std::string word(const std::string& what) {
        if (pos_ >= fields_.size()) fail(what, "missing field");
        return fields_[pos_++];
    }

    void keyword(const std::string& kw) {
        const std::string w = word(kw);
        if (w != kw) fail(kw, "expected '" + kw + "', found '" + w + "'");
    }

    double number(const std::string& what) {
        const std::string w = word(what);
        double v = 0.0;
        const char* first = w.data();
        const char* last = w.data() + w.size();
        if (!w.empty() && *first == '+') ++first;
        auto [p, ec] = std::from_chars(first, last, v);
        if (ec != std::errc{} || p != last) fail(what, "not a number: '" + w + "'");
        return v;
    }

    long count(const std::string& what) {
        const double v = number(what);
        if (v < 0 || v != static_cast<double>(static_cast<long>(v))) fail(what, "bad count");
        return static_cast<long>(v);
    }

    [[noreturn]] void fail(const std::string& field, const std::string& msg) const {
        throw InputError(source_, line_no_, field, msg);
    }

private:
    std::istream& in_;
    std::string source_;
    std::string line_;
    std::vector<std::string> fields_;
    std::size_t pos_ = 0;
    int line_no_ = 0;
};

int lookup(Reader& r, const ModelIR& ir, const std::string& what) {
    const std::string name = r.word(what);
    const int j = ir.find_var(name);
    if (j < 0) r.fail(what, "unknown variable '" + name + "'");
    return j;
}

std::vector<Term> read_terms(Reader& r, const ModelIR& ir) {
    const long k = r.count("term count");
    std::vector<Term> terms;
    terms.reserve(static_cast<std::size_t>(k));
    for (long i = 0; i < k; ++i) {
        const int j = lookup(r, ir, "term variable");
        terms.push_back({j, r.number("term coefficient")});
    }
    return terms;
}

}  // namespace

void write_interchange(const ModelIR& ir, std::ostream& out) {
    out << "CAPPRICE-IR 1\n";
    out << "VARS " << ir.num_vars() << '\n';
    for (const Variable& v : ir.vars()) {
        check_name(v.name);
        out << v.name << ' ' << num(v.lb) << ' ' << num(v.ub) << '\n';
    }
    out << "ROWS " << ir.num_rows() << '\n';
    for (const LinearRow& r : ir.rows()) {
        check_name(r.name);
        out << r.name << ' ' << sense_code(r.sense) << ' ' << num(r.rhs) << ' ' << tag_out(r.tag);
        write_terms(out, ir, r.terms);
        out << '\n';
    }
    out << "CONES " << ir.cones().size() << '\n';
    for (const ConeRow& c : ir.cones()) {
        check_name(c.name);
        out << c.name << ' ' << num(c.bound) << ' ' << tag_out(c.tag);
        write_terms(out, ir, c.terms);
        out << '\n';
    }
    out << "SOS1 " << ir.sos1().size() << '\n';
    for (const Sos1Set& s : ir.sos1()) {
        check_name(s.name);
        out << s.name << ' ' << s.members.size();
        for (int j : s.members) out << ' ' << ir.var(j).name;
        out << '\n';
    }
    std::size_t nonzero = 0;
    for (const Variable& v : ir.vars()) nonzero += v.cost != 0.0;
    out << "OBJ " << num(ir.objective_constant()) << ' ' << nonzero << '\n';
    for (const Variable& v : ir.vars())
        if (v.cost != 0.0) out << v.name << ' ' << num(v.cost) << '\n';
    out << "QUAD " << ir.quads().size() << '\n';
    for (const QuadLink& q : ir.quads()) {
        check_name(q.name);
        out << q.name << ' ' << ir.var(q.epigraph).name << ' ' << num(q.weight) << ' '
            << num(q.constant) << ' ' << num(q.lo) << ' ' << num(q.hi) << ' '
            << (q.grid == QuadLink::Grid::Uniform ? 'U' : 'G') << ' ' << tag_out(q.tag);
        write_terms(out, ir, q.terms);
        out << '\n';
    }
    out << "END\n";
}

void write_interchange(const ModelIR& ir, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw InputError(path.string(), 0, "", "cannot open for writing");
    write_interchange(ir, out);
}

ModelIR read_interchange(std::istream& in) {
    Reader r(in, "interchange");
    ModelIR ir;
    r.require_line("header");
    r.keyword("CAPPRICE-IR");
    if (r.count("version") != 1) r.fail("version", "unsupported version");

    r.require_line("VARS");
    r.keyword("VARS");
    const long nv = r.count("VARS");
    for (long i = 0; i < nv; ++i) {
        r.require_line("variable");
        const std::string name = r.word("variable name");
        const double lb = r.number("lb");
        const double ub = r.number("ub");
        if (ir.find_var(name) >= 0) r.fail("variable name", "duplicate '" + name + "'");
        if (lb > ub) r.fail("lb", "lower bound above upper bound");
        ir.add_var(name, lb, ub);
    }

    r.require_line("ROWS");
    r.keyword("ROWS");
    const long nr = r.count("ROWS");
    for (long i = 0; i < nr; ++i) {
        r.require_line("row");
        const std::string name = r.word("row name");
        const std::string s = r.word("sense");
        Sense sense = Sense::Eq;
        if (s == "L") sense = Sense::Le;
        else if (s == "G") sense = Sense::Ge;
        else if (s != "E") r.fail("sense", "expected E, L or G");
        const double rhs = r.number("rhs");
        const std::string tag = tag_in(r.word("tag"));
        ir.add_row(name, sense, read_terms(r, ir), rhs, tag);
    }

    r.require_line("CONES");
    r.keyword("CONES");
    const long nc = r.count("CONES");
    for (long i = 0; i < nc; ++i) {
        r.require_line("cone");
        const std::string name = r.word("cone name");
        const double bound = r.number("bound");
        const std::string tag = tag_in(r.word("tag"));
        ir.add_cone(name, read_terms(r, ir), bound, tag);
    }

    r.require_line("SOS1");
    r.keyword("SOS1");
    const long ns = r.count("SOS1");
    for (long i = 0; i < ns; ++i) {
        r.require_line("sos1");
        const std::string name = r.word("set name");
        const long k = r.count("member count");
        std::vector<int> members;
        for (long m = 0; m < k; ++m) members.push_back(lookup(r, ir, "member"));
        ir.add_sos1(name, members);
    }

    r.require_line("OBJ");
    r.keyword("OBJ");
    ir.set_objective_constant(r.number("objective constant"));
    const long no = r.count("OBJ");
    for (long i = 0; i < no; ++i) {
        r.require_line("objective term");
        const int j = lookup(r, ir, "objective variable");
        ir.add_cost(j, r.number("objective coefficient"));
    }

    r.require_line("QUAD");
    r.keyword("QUAD");
    const long nq = r.count("QUAD");
    for (long i = 0; i < nq; ++i) {
        r.require_line("quad");
        QuadLink q;
        q.name = r.word("quad name");
        q.epigraph = lookup(r, ir, "epigraph");
        q.weight = r.number("weight");
        q.constant = r.number("constant");
        q.lo = r.number("lo");
        q.hi = r.number("hi");
        const std::string g = r.word("grid");
        if (g == "G") q.grid = QuadLink::Grid::Geometric;
        else if (g != "U") r.fail("grid", "expected U or G");
        q.tag = tag_in(r.word("tag"));
        q.terms = read_terms(r, ir);
        ir.add_quad(std::move(q));
    }

    r.require_line("END");
    r.keyword("END");
    return ir;
}

ModelIR read_interchange(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError(path.string(), 0, "", "cannot open file");
    return read_interchange(in);
}

void write_solution(const ModelIR& ir, const SolveResult& result, std::ostream& out) {
    out << "STATUS " << to_string(result.status) << '\n';
    if (!result.has_solution()) return;
    for (int j = 0; j < ir.num_vars(); ++j)
        out << ir.var(j).name << ' ' << num(result.x[static_cast<std::size_t>(j)]) << '\n';
}

void write_solution(const ModelIR& ir, const SolveResult& result,
                    const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw InputError(path.string(), 0, "", "cannot open for writing");
    write_solution(ir, result, out);
}

SolveResult read_solution(const ModelIR& ir, std::istream& in) {
    Reader r(in, "solution");
    SolveResult out;
    r.require_line("STATUS");
    r.keyword("STATUS");
    const std::string status = r.word("status");
    if (status == "optimal") out.status = SolveStatus::Optimal;
    else if (status == "feasible-bound-gap") out.status = SolveStatus::FeasibleGap;
    else if (status == "infeasible") out.status = SolveStatus::Infeasible;
    else if (status == "limit") out.status = SolveStatus::Limit;
    else r.fail("status", "unknown status '" + status + "'");

    std::vector<double> x(static_cast<std::size_t>(ir.num_vars()), 0.0);
    std::vector<bool> seen(x.size(), false);
    std::size_t count = 0;
    while (r.next_line()) {
        const int j = lookup(r, ir, "variable");
        if (seen[static_cast<std::size_t>(j)]) r.fail("variable", "repeated '" + ir.var(j).name + "'");
        x[static_cast<std::size_t>(j)] = r.number("value");
        seen[static_cast<std::size_t>(j)] = true;
        ++count;
    }
    if (count == 0) return out;
    for (std::size_t j = 0; j < seen.size(); ++j)
        if (!seen[j]) r.fail("variable", "missing variable '" + ir.var(static_cast<int>(j)).name + "'");
    out.x = std::move(x);
    out.objective = ir.objective_value(out.x);
    out.bound = out.status == SolveStatus::Optimal ? out.objective : -kInf;
    out.gap = out.status == SolveStatus::Optimal ? 0.0 : kInf;
    return out;
}

SolveResult read_solution(const ModelIR& ir, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError(path.string(), 0, "", "cannot open file");
    return read_solution(ir, in);
}

SolveResult solve_external(const ModelIR& ir, const std::string& command_template,
                           const std::filesystem::path& work_dir) {
    std::filesystem::create_directories(work_dir);
    const auto model = work_dir / "model.ir";
    const auto solution = work_dir / "model.sol";
    std::filesystem::remove(solution);
    write_interchange(ir, model);
    std::string cmd = command_template;
    auto substitute = [&](const std::string& key, const std::string& value) {
        for (auto p = cmd.find(key); p != std::string::npos; p = cmd.find(key, p + value.size()))
            cmd.replace(p, key.size(), value);
    };
    substitute("{model}", model.string());
    substitute("{solution}", solution.string());
    const int rc = std::system(cmd.c_str());
    if (rc != 0) throw SolverError("external solver exited with status " + std::to_string(rc));
    return read_solution(ir, solution);
}

}  // namespace capprice::solver
