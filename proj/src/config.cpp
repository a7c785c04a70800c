#include "semicert/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <set>
#include <sstream>

namespace semicert {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(trim(item));
    return out;
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

class KeyValues {
public:
    using Map = std::map<std::pair<std::string, std::string>, std::string>;

    KeyValues(Map entries, std::vector<std::string>& errors)
        : entries_(std::move(entries)), errors_(errors) {}

    std::optional<std::string> raw(const std::string& section, const std::string& key) {
        auto it = entries_.find({section, key});
        if (it == entries_.end()) return std::nullopt;
        used_.insert({section, key});
        return it->second;
    }

    double number(const std::string& section, const std::string& key, double fallback) {
        auto v = raw(section, key);
        if (!v) return fallback;
        try {
            std::size_t pos = 0;
            const double d = std::stod(*v, &pos);
            if (pos != v->size()) throw std::invalid_argument("");
            return d;
        } catch (...) {
            errors_.push_back("[" + section + "] " + key + ": not a number: '" + *v + "'");
            return fallback;
        }
    }

    int integer(const std::string& section, const std::string& key, int fallback) {
        auto v = raw(section, key);
        if (!v) return fallback;
        try {
            std::size_t pos = 0;
            const int i = std::stoi(*v, &pos);
            if (pos != v->size()) throw std::invalid_argument("");
            return i;
        } catch (...) {
            errors_.push_back("[" + section + "] " + key + ": not an integer: '" + *v + "'");
            return fallback;
        }
    }

    void report_unused() {
        for (const auto& [kv, value] : entries_)
            if (!used_.contains(kv))
                errors_.push_back("[" + kv.first + "] " + kv.second + ": unknown key");
    }

private:
    Map entries_;
    std::set<std::pair<std::string, std::string>> used_;
    std::vector<std::string>& errors_;
};

}  // namespace

ParseResult parse_config_text(const std::string& text) {
    ParseResult result;
    auto& errors = result.errors;

    KeyValues::Map entries;
    std::string section;
    std::stringstream stream(text);
    std::string line;
    int lineno = 0;
    while (std::getline(stream, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                errors.push_back("line " + std::to_string(lineno) + ": malformed section header");
                continue;
            }
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            errors.push_back("line " + std::to_string(lineno) + ": expected key = value");
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty()) {
            errors.push_back("line " + std::to_string(lineno) + ": key outside any section");
            continue;
        }
        entries[{section, key}] = value;
    }

    KeyValues kv(std::move(entries), errors);
    RunConfig cfg;

    // [domain]
    cfg.domain.dim = kv.integer("domain", "dim", 1);
    if (cfg.domain.dim < 1 || cfg.domain.dim > 3)
        errors.push_back("[domain] dim must be 1, 2 or 3");
    auto parse_list = [&](const std::string& key, auto convert, auto& out, auto fallback) {
        auto v = kv.raw("domain", key);
        if (!v) return;
        out.clear();
        for (const auto& item : split(*v, ',')) {
            try {
                out.push_back(convert(item));
            } catch (...) {
                errors.push_back("[domain] " + key + ": bad entry '" + item + "'");
                out.push_back(fallback);
            }
        }
    };
    parse_list("lengths", [](const std::string& s) { return std::stod(s); }, cfg.domain.lengths, 1.0);
    parse_list("cells", [](const std::string& s) { return std::stoi(s); }, cfg.domain.cells, 2);
    const auto dim = static_cast<std::size_t>(std::clamp(cfg.domain.dim, 1, 3));
    if (cfg.domain.lengths.size() == 1 && dim > 1)
        cfg.domain.lengths.assign(dim, cfg.domain.lengths[0]);
    if (cfg.domain.cells.size() == 1 && dim > 1) cfg.domain.cells.assign(dim, cfg.domain.cells[0]);
    if (cfg.domain.lengths.size() != dim)
        errors.push_back("[domain] lengths: expected " + std::to_string(dim) + " entries");
    if (cfg.domain.cells.size() != dim)
        errors.push_back("[domain] cells: expected " + std::to_string(dim) + " entries");
    for (double L : cfg.domain.lengths)
        if (!(L > 0.0) || !std::isfinite(L)) errors.push_back("[domain] lengths must be positive");
    for (int n : cfg.domain.cells)
        if (n < 2) errors.push_back("[domain] cells: need at least 2 cells per axis");

    // [equation]
    cfg.k = kv.number("equation", "k", 1.0);
    if (!(cfg.k > 0.0)) errors.push_back("[equation] k must be positive");

    // [nonlinearity]
    if (auto builtin = kv.raw("nonlinearity", "builtin")) {
        cfg.nonlinearity.kind = NonlinearitySpec::Kind::builtin;
        cfg.nonlinearity.builtin_label = *builtin;
        if (!find_builtin(*builtin))
            errors.push_back("[nonlinearity] unknown builtin '" + *builtin + "'");
    } else if (auto kind = kv.raw("nonlinearity", "kind"); kind && *kind == "piecewise") {
        cfg.nonlinearity.kind = NonlinearitySpec::Kind::piecewise;
        cfg.nonlinearity.a = kv.number("nonlinearity", "a", 0.0);
        if (cfg.nonlinearity.a < 0.0) errors.push_back("[nonlinearity] a must be nonnegative");
        if (auto table = kv.raw("nonlinearity", "table")) {
            for (const auto& entry : split(*table, ',')) {
                const auto parts = split(entry, ':');
                if (parts.size() != 2) {
                    errors.push_back("[nonlinearity] table: malformed entry '" + entry + "'");
                    continue;
                }
                try {
                    cfg.nonlinearity.table.push_back({std::stod(parts[0]), std::stod(parts[1])});
                } catch (...) {
                    errors.push_back("[nonlinearity] table: bad numbers in '" + entry + "'");
                }
            }
        }
        if (auto disc = kv.raw("nonlinearity", "discontinuities"); disc && !disc->empty()) {
            for (const auto& entry : split(*disc, ',')) {
                const auto parts = split(entry, ':');
                if (parts.size() != 3) {
                    errors.push_back("[nonlinearity] discontinuities: malformed entry '" + entry + "'");
                    continue;
                }
                try {
                    cfg.nonlinearity.discontinuities.push_back(
                        {std::stod(parts[0]), std::stod(parts[1]), std::stod(parts[2])});
                } catch (...) {
                    errors.push_back("[nonlinearity] discontinuities: bad numbers in '" + entry + "'");
                }
            }
        }
        if (cfg.nonlinearity.table.size() < 2)
            errors.push_back("[nonlinearity] table needs at least two breakpoints");
        else {
            auto sorted = cfg.nonlinearity.table;
            std::sort(sorted.begin(), sorted.end(),
                      [](const auto& p, const auto& q) { return p.u < q.u; });
            for (std::size_t i = 1; i < sorted.size(); ++i)
                if (!(sorted[i].u > sorted[i - 1].u)) {
                    errors.push_back("[nonlinearity] table breakpoints must be strictly increasing");
                    break;
                }
            const double a = std::max(cfg.nonlinearity.a, 0.0);
            if (sorted.front().u > -a || sorted.back().u < a)
                errors.push_back("[nonlinearity] table must cover [-a, a]");
        }
        for (const auto& d : cfg.nonlinearity.discontinuities)
            if (std::abs(d.point) > cfg.nonlinearity.a)
                errors.push_back("[nonlinearity] discontinuity at " + fmt_double(d.point) +
                                 " lies outside [-a, a]");
    } else {
        errors.push_back("[nonlinearity] needs either 'builtin = <label>' or 'kind = piecewise'");
    }
    kv.raw("nonlinearity", "kind");  // legitimate alongside builtin

    // [solver]
    cfg.solver.theta = kv.number("solver", "theta", cfg.solver.theta);
    if (!(cfg.solver.theta > 0.0) || cfg.solver.theta > 1.0)
        errors.push_back("[solver] theta must lie in (0, 1]");
    cfg.solver.anderson_depth = kv.integer("solver", "anderson_depth", cfg.solver.anderson_depth);
    if (cfg.solver.anderson_depth < 0) errors.push_back("[solver] anderson_depth must be >= 0");
    cfg.solver.tol_update = kv.number("solver", "tol_update", cfg.solver.tol_update);
    cfg.solver.tol_residual = kv.number("solver", "tol_residual", cfg.solver.tol_residual);
    if (!(cfg.solver.tol_update > 0.0) || !(cfg.solver.tol_residual > 0.0))
        errors.push_back("[solver] tolerances must be positive");
    cfg.solver.max_iter = kv.integer("solver", "max_iter", cfg.solver.max_iter);
    if (cfg.solver.max_iter < 1) errors.push_back("[solver] max_iter must be >= 1");
    if (auto initial = kv.raw("solver", "initial")) {
        if (*initial == "zero") {
            cfg.solver.initial = SolverSpec::Initial::zero;
        } else if (initial->starts_with("constant:")) {
            cfg.solver.initial = SolverSpec::Initial::constant;
            try {
                cfg.solver.initial_constant = std::stod(initial->substr(9));
            } catch (...) {
                errors.push_back("[solver] initial: bad constant in '" + *initial + "'");
            }
        } else {
            errors.push_back("[solver] initial must be 'zero' or 'constant:<value>'");
        }
    }

    // [output]
    if (auto v = kv.raw("output", "solution_csv")) cfg.output.solution_csv = *v;
    if (auto v = kv.raw("output", "report_json")) cfg.output.report_json = *v;

    // [certificates]
    cfg.certificates.tol_residual =
        kv.number("certificates", "tol_residual", cfg.certificates.tol_residual);
    cfg.certificates.tol_apriori =
        kv.number("certificates", "tol_apriori", cfg.certificates.tol_apriori);
    if (auto v = kv.raw("certificates", "tol_amp"); v && *v != "auto") {
        try {
            cfg.certificates.tol_amp = std::stod(*v);
        } catch (...) {
            errors.push_back("[certificates] tol_amp must be 'auto' or a number");
        }
    }
    cfg.certificates.kernel_slack =
        kv.number("certificates", "kernel_slack", cfg.certificates.kernel_slack);
    cfg.certificates.kernel_sources =
        kv.integer("certificates", "kernel_sources", cfg.certificates.kernel_sources);
    cfg.certificates.sign_u_max = kv.number("certificates", "sign_u_max", cfg.certificates.sign_u_max);
    cfg.certificates.sign_samples =
        kv.integer("certificates", "sign_samples", cfg.certificates.sign_samples);
    if (!(cfg.certificates.tol_residual > 0.0) || !(cfg.certificates.tol_apriori > 0.0))
        errors.push_back("[certificates] tolerances must be positive");
    if (cfg.certificates.kernel_slack < 0.0)
        errors.push_back("[certificates] kernel_slack must be nonnegative");
    if (cfg.certificates.kernel_sources < 1)
        errors.push_back("[certificates] kernel_sources must be >= 1");
    if (cfg.certificates.sign_samples < 100)
        errors.push_back("[certificates] sign_samples must be >= 100");

    kv.report_unused();

    if (errors.empty()) result.config = std::move(cfg);
    return result;
}

ParseResult parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) return {std::nullopt, {"cannot open config file: " + path}};
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str());
}

std::string write_config(const RunConfig& cfg) {
    std::ostringstream out;
    out << "[domain]\n";
    out << "dim = " << cfg.domain.dim << "\n";
    out << "lengths = ";
    for (std::size_t i = 0; i < cfg.domain.lengths.size(); ++i)
        out << (i ? ", " : "") << fmt_double(cfg.domain.lengths[i]);
    out << "\ncells = ";
    for (std::size_t i = 0; i < cfg.domain.cells.size(); ++i)
        out << (i ? ", " : "") << cfg.domain.cells[i];
    out << "\n\n[equation]\nk = " << fmt_double(cfg.k) << "\n";

    out << "\n[nonlinearity]\n";
    if (cfg.nonlinearity.kind == NonlinearitySpec::Kind::builtin) {
        out << "builtin = " << cfg.nonlinearity.builtin_label << "\n";
    } else {
        out << "kind = piecewise\n";
        out << "a = " << fmt_double(cfg.nonlinearity.a) << "\n";
        out << "table = ";
        for (std::size_t i = 0; i < cfg.nonlinearity.table.size(); ++i)
            out << (i ? ", " : "") << fmt_double(cfg.nonlinearity.table[i].u) << ":"
                << fmt_double(cfg.nonlinearity.table[i].f);
        out << "\n";
        if (!cfg.nonlinearity.discontinuities.empty()) {
            out << "discontinuities = ";
            for (std::size_t i = 0; i < cfg.nonlinearity.discontinuities.size(); ++i) {
                const auto& d = cfg.nonlinearity.discontinuities[i];
                out << (i ? ", " : "") << fmt_double(d.point) << ":" << fmt_double(d.left_limit)
                    << ":" << fmt_double(d.right_limit);
            }
            out << "\n";
        }
    }

    out << "\n[solver]\n";
    out << "theta = " << fmt_double(cfg.solver.theta) << "\n";
    out << "anderson_depth = " << cfg.solver.anderson_depth << "\n";
    out << "tol_update = " << fmt_double(cfg.solver.tol_update) << "\n";
    out << "tol_residual = " << fmt_double(cfg.solver.tol_residual) << "\n";
    out << "max_iter = " << cfg.solver.max_iter << "\n";
    if (cfg.solver.initial == SolverSpec::Initial::zero)
        out << "initial = zero\n";
    else
        out << "initial = constant:" << fmt_double(cfg.solver.initial_constant) << "\n";

    out << "\n[output]\n";
    out << "solution_csv = " << cfg.output.solution_csv << "\n";
    out << "report_json = " << cfg.output.report_json << "\n";

    out << "\n[certificates]\n";
    out << "tol_residual = " << fmt_double(cfg.certificates.tol_residual) << "\n";
    out << "tol_apriori = " << fmt_double(cfg.certificates.tol_apriori) << "\n";
    out << "tol_amp = "
        << (cfg.certificates.tol_amp ? fmt_double(*cfg.certificates.tol_amp) : std::string("auto"))
        << "\n";
    out << "kernel_slack = " << fmt_double(cfg.certificates.kernel_slack) << "\n";
    out << "kernel_sources = " << cfg.certificates.kernel_sources << "\n";
    out << "sign_u_max = " << fmt_double(cfg.certificates.sign_u_max) << "\n";
    out << "sign_samples = " << cfg.certificates.sign_samples << "\n";
    return out.str();
}

BoxDomain make_domain(const DomainSpec& spec) { return {spec.lengths, spec.cells}; }

Nonlinearity make_nonlinearity(const NonlinearitySpec& spec) {
    if (spec.kind == NonlinearitySpec::Kind::builtin) {
        auto f = find_builtin(spec.builtin_label);
        if (!f) throw std::invalid_argument("unknown builtin nonlinearity: " + spec.builtin_label);
        return *f;
    }

    // Augmented breakpoints: (u, value from the left, value from the right).
    struct Node {
        double u, left, right;
    };
    auto nodes = std::make_shared<std::vector<Node>>();
    for (const auto& p : spec.table) nodes->push_back({p.u, p.f, p.f});
    for (const auto& d : spec.discontinuities) {
        bool replaced = false;
        for (auto& n : *nodes)
            if (n.u == d.point) {
                n.left = d.left_limit;
                n.right = d.right_limit;
                replaced = true;
            }
        if (!replaced) nodes->push_back({d.point, d.left_limit, d.right_limit});
    }
    std::sort(nodes->begin(), nodes->end(), [](const Node& p, const Node& q) { return p.u < q.u; });

    Nonlinearity f;
    f.threshold_a = spec.a;
    f.label = "piecewise";
    for (const auto& d : spec.discontinuities)
        f.discontinuities.push_back({d.point, d.left_limit, d.right_limit});
    f.rule = [nodes](double u) {
        const auto& ns = *nodes;
        if (u <= ns.front().u) {  // linear extension of the first segment
            const auto& p = ns[0];
            const auto& q = ns[1];
            return p.left + (u - p.u) * (q.left - p.right) / (q.u - p.u);
        }
        if (u >= ns.back().u) {
            const auto& p = ns[ns.size() - 2];
            const auto& q = ns.back();
            return q.right + (u - q.u) * (q.left - p.right) / (q.u - p.u);
        }
        std::size_t lo = 0, hi = ns.size() - 1;
        while (hi - lo > 1) {
            const std::size_t mid = (lo + hi) / 2;
            (ns[mid].u <= u ? lo : hi) = mid;
        }
        if (u == ns[lo].u) return 0.5 * (ns[lo].left + ns[lo].right);
        const double t = (u - ns[lo].u) / (ns[hi].u - ns[lo].u);
        return (1.0 - t) * ns[lo].right + t * ns[hi].left;
    };
    return f;
}

SolverOptions make_solver_options(const SolverSpec& spec, const BoxDomain& domain) {
    SolverOptions opts;
    opts.theta = spec.theta;
    opts.anderson_depth = spec.anderson_depth;
    opts.tol_update = spec.tol_update;
    opts.tol_residual = spec.tol_residual;
    opts.max_iter = spec.max_iter;
    if (spec.initial == SolverSpec::Initial::constant)
        opts.initial_guess = GridField(domain, spec.initial_constant);
    return opts;
}

}  // namespace semicert
