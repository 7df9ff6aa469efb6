#include "thinlayer/serialize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace thinlayer {

namespace {

void append_escaped(std::string& out, const std::string& s) {
    out += '"';
    for (char c : s) {
        switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\r': out += "\\r"; break;
        case '\t': out += "\\t"; break;
        default:
            if (static_cast<unsigned char>(c) < 0x20) {
                char buf[8];
                std::snprintf(buf, sizeof buf, "\\u%04x", c);
                out += buf;
            } else {
                out += c;
            }
        }
    }
    out += '"';
}

std::string csv_num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return double17(v);
}

} // namespace

Json::Json(bool b) : type_(Type::boolean), bool_(b) {}
Json::Json(int v) : type_(Type::int64), int_(v) {}
Json::Json(long long v) : type_(Type::int64), int_(v) {}
Json::Json(unsigned long long v) : type_(Type::uint64), uint_(v) {}
Json::Json(double v) : type_(Type::f64), num_(v) {}
Json::Json(const char* s) : type_(Type::string), str_(s) {}
Json::Json(std::string s) : type_(Type::string), str_(std::move(s)) {}

Json Json::object() {
    Json j;
    j.type_ = Type::object;
    return j;
}

Json Json::array() {
    Json j;
    j.type_ = Type::array;
    return j;
}

Json& Json::set(const std::string& key, Json v) {
    for (auto& kv : obj_)
        if (kv.first == key) {
            kv.second = std::move(v);
            return *this;
        }
    obj_.emplace_back(key, std::move(v));
    return *this;
}

Json& Json::push(Json v) {
    arr_.push_back(std::move(v));
    return *this;
}

void Json::write(std::string& out, int indent, int depth, bool sorted) const {
    auto newline = [&](int d) {
        if (indent <= 0) return;
        out += '\n';
        out.append(static_cast<std::size_t>(indent) * d, ' ');
    };
    switch (type_) {
    case Type::null: out += "null"; break;
    case Type::boolean: out += bool_ ? "true" : "false"; break;
    case Type::int64: out += std::to_string(int_); break;
    case Type::uint64: out += std::to_string(uint_); break;
    case Type::f64:
        out += std::isfinite(num_) ? double17(num_) : "null";
        break;
    case Type::string: append_escaped(out, str_); break;
    case Type::array: {
        if (arr_.empty()) {
            out += "[]";
            break;
        }
        out += '[';
        for (std::size_t i = 0; i < arr_.size(); ++i) {
            if (i) out += ',';
            newline(depth + 1);
            arr_[i].write(out, indent, depth + 1, sorted);
        }
        newline(depth);
        out += ']';
        break;
    }
    case Type::object: {
        if (obj_.empty()) {
            out += "{}";
            break;
        }
        std::vector<const std::pair<std::string, Json>*> items;
        items.reserve(obj_.size());
        for (const auto& kv : obj_) items.push_back(&kv);
        if (sorted)
            std::sort(items.begin(), items.end(),
                      [](const auto* x, const auto* y) { return x->first < y->first; });
        out += '{';
        for (std::size_t i = 0; i < items.size(); ++i) {
            if (i) out += ',';
            newline(depth + 1);
            append_escaped(out, items[i]->first);
            out += indent > 0 ? ": " : ":";
            items[i]->second.write(out, indent, depth + 1, sorted);
        }
        newline(depth);
        out += '}';
        break;
    }
    }
}

std::string Json::dump(int indent) const {
    std::string out;
    write(out, indent, 0, false);
    out += '\n';
    return out;
}

std::string Json::canonical() const {
    std::string out;
    write(out, 0, 0, true);
    return out;
}

std::string double17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex16(std::uint64_t v) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

const char* kind_name(PotentialKind kind) {
    switch (kind) {
    case PotentialKind::en: return "en";
    case PotentialKind::ee: return "ee";
    case PotentialKind::coulomb2d: return "coulomb2d";
    }
    return "unknown";
}

Json to_json(const ConstantSet& cs) {
    Json j = Json::object();
    j.set("kato", cs.kato)
        .set("c1", cs.c1)
        .set("c2", cs.c2)
        .set("c3", cs.c3)
        .set("mu", cs.mu)
        .set("e_low", cs.e_low);
    return j;
}

Json to_json(const ThresholdSet& ts) {
    Json j = Json::object();
    j.set("a0", ts.a0).set("a1", ts.a1).set("a2", ts.a2).set("a3", ts.a3).set("d", ts.d);
    return j;
}

Json to_json(const TabulatedPotential& pot) {
    Json j = Json::object();
    j.set("kind", kind_name(pot.kind))
        .set("a", pot.a)
        .set("tail_coeff", pot.tail_coeff)
        .set("n", static_cast<long long>(pot.nodes.size()));
    return j;
}

Json to_json(const EigenResult& res) {
    Json ev = Json::array();
    for (double v : res.eigenvalues) ev.push(v);
    Json rs = Json::array();
    for (double v : res.residuals) rs.push(v);
    Json grid = Json::object();
    grid.set("rho_max", res.grid.rho_max)
        .set("n_nodes", res.grid.n_nodes)
        .set("spacing", res.grid.spacing == RadialGrid::Spacing::graded ? "graded" : "uniform")
        .set("m", res.grid.m)
        .set("core", res.grid.core);
    Json j = Json::object();
    j.set("eigenvalues", std::move(ev))
        .set("residuals", std::move(rs))
        .set("edge", res.edge)
        .set("potential_kind", res.potential_kind)
        .set("grid", std::move(grid));
    return j;
}

Json to_json(const ConvergenceReport& rep) {
    Json entries = Json::array();
    for (const auto& e : rep.entries) {
        Json je = Json::object();
        je.set("a", e.a)
            .set("eigenvalue", e.eigenvalue)
            .set("reference", e.reference)
            .set("error", e.error);
        entries.push(std::move(je));
    }
    Json gaps = Json::array();
    for (double g : rep.gaps) gaps.push(g);
    Json raw = Json::array();
    for (double r : rep.raw_levels) raw.push(r);
    Json errors = Json::array();
    for (const auto& s : rep.entry_errors) errors.push(s);

    Json fit = Json::object();
    fit.set("c", rep.fitted_c).set("quality", rep.fit_quality);
    Json fit2 = Json::object();
    fit2.set("c1", rep.fitted_c1).set("c2", rep.fitted_c2).set("quality", rep.fit2_quality);

    Json j = Json::object();
    j.set("entries", std::move(entries))
        .set("gaps", std::move(gaps))
        .set("raw_levels", std::move(raw))
        .set("fit_alog", std::move(fit))
        .set("fit_alog2", std::move(fit2))
        .set("monotone", rep.monotone)
        .set("partial", rep.partial)
        .set("entry_errors", std::move(errors));
    return j;
}

Json to_json(const FeshbachReport& rep) {
    Json blocks = Json::array();
    for (double b : rep.block_residuals) blocks.push(b);
    Json j = Json::object();
    j.set("xi", rep.xi)
        .set("block_residuals", std::move(blocks))
        .set("w_norm", rep.w_norm)
        .set("r_bot_norm", rep.r_bot_norm);
    return j;
}

Json to_json(const CIResult& res) {
    Json j = Json::object();
    j.set("ground_energy", res.ground_energy)
        .set("symmetry",
             res.symmetry == CISymmetry::fermionic ? "fermionic" : "distinguishable")
        .set("basis_size", res.basis_size)
        .set("interaction_tolerance", res.interaction_tolerance);
    return j;
}

Json to_json(const LocalizeResult& res) {
    Json win = Json::object();
    win.set("K", res.window.K)
        .set("proj_bound", res.window.proj_bound)
        .set("valid", res.window.valid);
    Json j = Json::object();
    j.set("lo", res.lo)
        .set("hi", res.hi)
        .set("count_inside", res.count_inside)
        .set("certified", res.certified)
        .set("window", std::move(win))
        .set("diagnostics", res.diagnostics);
    return j;
}

std::string to_csv(const TabulatedPotential& pot) {
    std::string out = "rho,value\n";
    for (std::size_t i = 0; i < pot.nodes.size(); ++i) {
        out += csv_num(pot.nodes[i]);
        out += ',';
        out += csv_num(pot.values[i]);
        out += '\n';
    }
    return out;
}

std::string to_csv(const EigenResult& res) {
    std::string out = "index,eigenvalue,residual\n";
    for (std::size_t i = 0; i < res.eigenvalues.size(); ++i) {
        out += std::to_string(i);
        out += ',';
        out += csv_num(res.eigenvalues[i]);
        out += ',';
        out += csv_num(i < res.residuals.size() ? res.residuals[i] : 0.0);
        out += '\n';
    }
    return out;
}

std::string to_csv(const ConvergenceReport& rep) {
    bool fitted = rep.fitted_c1 != 0.0 || rep.fitted_c2 != 0.0 || rep.fit2_quality != 0.0;
    std::string out = "a,lambda,reference,error,model_error\n";
    for (const auto& e : rep.entries) {
        double model_error = std::nan("");
        if (fitted) {
            double model = rep.fitted_c1 * e.a * std::abs(std::log(e.a)) + rep.fitted_c2 * e.a;
            model_error = e.error - model;
        }
        out += csv_num(e.a);
        out += ',';
        out += csv_num(e.eigenvalue);
        out += ',';
        out += csv_num(e.reference);
        out += ',';
        out += csv_num(e.error);
        out += ',';
        out += csv_num(model_error);
        out += '\n';
    }
    return out;
}

std::string to_csv(const std::vector<double>& levels) {
    std::string out = "n,level\n";
    for (std::size_t i = 0; i < levels.size(); ++i) {
        out += std::to_string(i + 1);
        out += ',';
        out += csv_num(levels[i]);
        out += '\n';
    }
    return out;
}

std::string coord_text(const RadialOperator& op) {
    std::string out;
    auto line = [&](std::size_t r, std::size_t c, double v) {
        out += std::to_string(r);
        out += ' ';
        out += std::to_string(c);
        out += ' ';
        out += csv_num(v);
        out += '\n';
    };
    for (std::size_t i = 0; i < op.diag.size(); ++i) line(i, i, op.diag[i]);
    for (std::size_t i = 0; i < op.offdiag.size(); ++i) {
        line(i, i + 1, op.offdiag[i]);
        line(i + 1, i, op.offdiag[i]);
    }
    return out;
}

} // namespace thinlayer
