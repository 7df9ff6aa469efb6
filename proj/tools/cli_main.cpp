// thinlayer batch front end: one JSON config in, deterministic JSON/CSV
// artifacts out. Exit 0 on success, 2 for config problems, 3 when a
// computation reports a failure; errors are printed as JSON on stdout.

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "thinlayer/constants.hpp"
#include "thinlayer/convergence.hpp"
#include "thinlayer/errors.hpp"
#include "thinlayer/layer.hpp"
#include "thinlayer/potentials.hpp"
#include "thinlayer/radial.hpp"
#include "thinlayer/serialize.hpp"
#include "thinlayer/two_electron.hpp"

namespace fs = std::filesystem;
using njson = nlohmann::json;
using namespace thinlayer;

namespace {

constexpr const char* kVersion = "thinlayer 0.1.0";

const char* error_name(const std::exception& e) {
    if (dynamic_cast<const ConfigInvalid*>(&e)) return "ConfigInvalid";
    if (dynamic_cast<const InvalidWidth*>(&e)) return "InvalidWidth";
    if (dynamic_cast<const InvalidGrid*>(&e)) return "InvalidGrid";
    if (dynamic_cast<const QuadratureFailure*>(&e)) return "QuadratureFailure";
    if (dynamic_cast<const NoRootInRange*>(&e)) return "NoRootInRange";
    if (dynamic_cast<const ConvergenceFailure*>(&e)) return "ConvergenceFailure";
    if (dynamic_cast<const InsufficientBoundStates*>(&e)) return "InsufficientBoundStates";
    if (dynamic_cast<const SingularShift*>(&e)) return "SingularShift";
    if (dynamic_cast<const DegenerateFit*>(&e)) return "DegenerateFit";
    if (dynamic_cast<const SingularOverlap*>(&e)) return "SingularOverlap";
    return "RuntimeError";
}

// Typed access to the "params" object. Every getter validates, records the
// normalized value (defaults included) for hashing and echoing, and marks
// the key as consumed; finish() rejects leftovers.
class Params {
  public:
    explicit Params(const njson& in) : in_(in), norm_(Json::object()) {}

    double number(const std::string& key, double def, double lo, double hi,
                  bool lo_open = true, bool hi_open = true) {
        double v = def;
        if (const njson* p = fetch(key)) {
            if (!p->is_number())
                throw ConfigInvalid("parameter '" + key + "' must be a number");
            v = p->get<double>();
        }
        bool ok = (lo_open ? v > lo : v >= lo) && (hi_open ? v < hi : v <= hi);
        if (!ok)
            throw ConfigInvalid("parameter '" + key + "' outside " +
                                (lo_open ? "(" : "[") + double17(lo) + ", " + double17(hi) +
                                (hi_open ? ")" : "]"));
        norm_.set(key, v);
        return v;
    }

    int integer(const std::string& key, int def, int lo, int hi) {
        long long v = def;
        if (const njson* p = fetch(key)) {
            if (!p->is_number_integer())
                throw ConfigInvalid("parameter '" + key + "' must be an integer");
            v = p->get<long long>();
        }
        if (v < lo || v > hi)
            throw ConfigInvalid("parameter '" + key + "' outside [" + std::to_string(lo) +
                                ", " + std::to_string(hi) + "]");
        norm_.set(key, static_cast<long long>(v));
        return static_cast<int>(v);
    }

    std::string choice(const std::string& key, const std::string& def,
                       const std::vector<std::string>& allowed) {
        std::string v = def;
        if (const njson* p = fetch(key)) {
            if (!p->is_string())
                throw ConfigInvalid("parameter '" + key + "' must be a string");
            v = p->get<std::string>();
        }
        if (std::find(allowed.begin(), allowed.end(), v) == allowed.end()) {
            std::string opts;
            for (const auto& s : allowed) opts += (opts.empty() ? "" : ", ") + s;
            throw ConfigInvalid("parameter '" + key + "' must be one of: " + opts);
        }
        norm_.set(key, v);
        return v;
    }

    std::vector<double> number_list(const std::string& key, std::vector<double> def,
                                    std::size_t min_len, std::size_t max_len, double lo,
                                    double hi) {
        std::vector<double> v = std::move(def);
        if (const njson* p = fetch(key)) {
            if (!p->is_array())
                throw ConfigInvalid("parameter '" + key + "' must be an array of numbers");
            v.clear();
            for (const auto& e : *p) {
                if (!e.is_number())
                    throw ConfigInvalid("parameter '" + key + "' must be an array of numbers");
                v.push_back(e.get<double>());
            }
        }
        if (v.size() < min_len || v.size() > max_len)
            throw ConfigInvalid("parameter '" + key + "' needs between " +
                                std::to_string(min_len) + " and " + std::to_string(max_len) +
                                " entries");
        Json arr = Json::array();
        for (double x : v) {
            if (!(x > lo) || !(x < hi))
                throw ConfigInvalid("entries of '" + key + "' must lie in (" + double17(lo) +
                                    ", " + double17(hi) + ")");
            arr.push(x);
        }
        norm_.set(key, std::move(arr));
        return v;
    }

    void finish() const {
        for (auto it = in_.begin(); it != in_.end(); ++it)
            if (!seen_.count(it.key()))
                throw ConfigInvalid("unknown parameter '" + it.key() + "'");
    }

    const Json& normalized() const { return norm_; }

  private:
    const njson* fetch(const std::string& key) {
        seen_.insert(key);
        auto it = in_.find(key);
        return it == in_.end() ? nullptr : &*it;
    }

    const njson& in_;
    Json norm_;
    std::set<std::string> seen_;
};

struct RunOutput {
    Json result;
    std::string csv;  // empty when the command has no tabular artifact
};

RadialGrid make_grid(double a, int m, int n_rho, double rho_max) {
    RadialGrid g;
    g.rho_max = rho_max;
    g.n_nodes = n_rho;
    g.spacing = RadialGrid::Spacing::graded;
    g.m = m;
    g.core = std::max(a / 4.0, 1e-4);
    return g;
}

RunOutput run_constants(Params& p) {
    double a = p.number("a", 0.1, 0.0, 1.0);
    double Z = p.number("Z", 1.0, 0.0, 1e6);
    int N = p.integer("N", 1, 1, 1000);
    double d = p.number("d", 0.05, 0.0, 1e6);
    p.finish();
    LayerConfig cfg{a, Z, N};
    check_config(cfg);
    RunOutput out;
    out.result = to_json(constant_set(cfg));
    out.result.set("thresholds", to_json(thresholds(cfg, d)));
    return out;
}

RunOutput run_potentials(Params& p) {
    std::string kind_s = p.choice("kind", "en", {"en", "ee", "coulomb2d"});
    double a = p.number("a", 0.1, 0.0, 1.0);
    double rho_min = p.number("rho_min", 1e-3, 0.0, 1e6);
    double rho_max = p.number("rho_max", 10.0, rho_min, 1e9);
    int n = p.integer("n", 200, 2, 100000);
    std::string spacing = p.choice("spacing", "log", {"log", "linear"});
    p.finish();

    PotentialKind kind = kind_s == "en"   ? PotentialKind::en
                         : kind_s == "ee" ? PotentialKind::ee
                                          : PotentialKind::coulomb2d;
    std::vector<double> nodes(n);
    for (int i = 0; i < n; ++i) {
        double s = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
        nodes[i] = spacing == "log" ? rho_min * std::pow(rho_max / rho_min, s)
                                    : rho_min + (rho_max - rho_min) * s;
    }
    TabulatedPotential pot = tabulate(kind, a, std::move(nodes));
    RunOutput out;
    out.result = to_json(pot);
    out.result.set("spacing", spacing);
    out.csv = to_csv(pot);
    return out;
}

RunOutput run_spectrum2d(Params& p) {
    double Z = p.number("Z", 1.0, 0.0, 1e6);
    int k = p.integer("k", 3, 1, 50);
    p.finish();
    std::vector<double> levels = hydrogen2d_levels(Z, k);
    Json arr = Json::array();
    for (double v : levels) arr.push(v);
    RunOutput out;
    out.result = Json::object();
    out.result.set("Z", Z).set("k", k).set("levels", std::move(arr));
    out.csv = to_csv(levels);
    return out;
}

RunOutput run_spectrum_layer(Params& p) {
    double a = p.number("a", 0.1, 0.0, 0.5, true, false);
    double Z = p.number("Z", 1.0, 0.0, 1e6);
    int k = p.integer("k", 2, 1, 12);
    int m = p.integer("m", 0, 0, 8);
    int n_rho = p.integer("n_rho", 200, 16, 2000);
    double rho_max = p.number("rho_max", 30.0, 0.0, 1e6);
    int n_z = p.integer("n_z", 48, 8, 400);
    p.finish();

    CylGrid grid{make_grid(a, m, n_rho, rho_max), n_z};
    EigenResult res = solve_layer_n1(a, Z, grid, k);
    RunOutput out;
    out.result = to_json(res);
    out.csv = to_csv(res);
    return out;
}

RunOutput run_converge(Params& p) {
    std::string kind = p.choice("kind", "eff", {"eff", "layer"});
    double Z = p.number("Z", 1.0, 0.0, 1e6);
    std::vector<double> widths =
        p.number_list("widths", {0.2, 0.1, 0.05, 0.02}, 4, 16, 0.0, 0.5);
    p.finish();

    ConvergenceReport rep = kind == "eff" ? sweep_eff(widths, Z) : sweep_layer(widths, Z);
    RunOutput out;
    out.result = to_json(rep);
    out.csv = to_csv(rep);
    return out;
}

RunOutput run_localize(Params& p) {
    double a = p.number("a", 0.05, 0.0, 0.5);
    double Z = p.number("Z", 1.0, 0.0, 1e6);
    double lambda_2d = p.number("lambda_2d", -1.0, -1e6, 0.0);
    double d = p.number("d", 0.3, 0.0, 1e6);
    int multiplicity = p.integer("multiplicity", 1, 1, 16);
    int m_max = p.integer("m_max", 2, 0, 4);
    int k = p.integer("k", 2, 1, 8);
    int n_rho = p.integer("n_rho", 200, 16, 2000);
    double rho_max = p.number("rho_max", 30.0, 0.0, 1e6);
    int n_z = p.integer("n_z", 48, 8, 400);
    p.finish();

    // merged point spectrum across the angular sectors; +-m levels enter twice
    EigenResult merged;
    bool have_edge = false;
    for (int m = 0; m <= m_max; ++m) {
        CylGrid grid{make_grid(a, m, n_rho, rho_max), n_z};
        EigenResult res;
        int got = 0;
        for (int want = k; want >= 1; --want) {
            try {
                res = solve_layer_n1(a, Z, grid, want);
                got = want;
                break;
            } catch (const InsufficientBoundStates&) {
            }
        }
        if (got == 0) continue;
        if (!have_edge) {
            merged = res;
            merged.eigenvalues.clear();
            merged.residuals.clear();
            merged.vectors.clear();
            have_edge = true;
        }
        for (int j = 0; j < got; ++j) {
            int copies = m == 0 ? 1 : 2;
            for (int c = 0; c < copies; ++c) {
                merged.eigenvalues.push_back(res.eigenvalues[j]);
                merged.residuals.push_back(res.residuals[j]);
            }
        }
    }
    if (!have_edge || merged.eigenvalues.empty())
        throw InsufficientBoundStates("no layer levels found in sectors |m| <= " +
                                      std::to_string(m_max));
    std::vector<std::pair<double, double>> zip;
    for (std::size_t i = 0; i < merged.eigenvalues.size(); ++i)
        zip.emplace_back(merged.eigenvalues[i], merged.residuals[i]);
    std::sort(zip.begin(), zip.end());
    for (std::size_t i = 0; i < zip.size(); ++i) {
        merged.eigenvalues[i] = zip[i].first;
        merged.residuals[i] = zip[i].second;
    }

    LayerConfig cfg{a, Z, 1};
    LocalizeResult lr = localize(lambda_2d, d, a, cfg, merged, multiplicity);

    Json spectrum = Json::object();
    Json evs = Json::array();
    for (double v : merged.eigenvalues) evs.push(v);
    spectrum.set("edge", merged.edge)
        .set("n_levels", static_cast<long long>(merged.eigenvalues.size()))
        .set("eigenvalues", std::move(evs));

    RunOutput out;
    out.result = to_json(lr);
    out.result.set("spectrum", std::move(spectrum));
    return out;
}

RunOutput run_two_electron(Params& p) {
    double a = p.number("a", 0.1, 0.0, 1.0);
    double Z = p.number("Z", 2.0, 0.0, 1e6);
    int n_orb = p.integer("n_orb", 6, 2, 12);
    int m_max = p.integer("m_max", 2, 0, 5);
    std::string sym_s = p.choice("symmetry", "fermionic", {"fermionic", "distinguishable"});
    double scale = p.number("interaction_scale", 1.0, 0.0, 1e3, false, false);
    p.finish();

    OrbitalBasis basis = build_orbital_basis(a, Z, n_orb, m_max);
    CISymmetry sym =
        sym_s == "fermionic" ? CISymmetry::fermionic : CISymmetry::distinguishable;
    CIResult ci = ci_ground_state(basis, sym, scale);
    ConstantSet cs = constant_set({a, Z, 2});

    Json orbs = Json::array();
    for (const auto& o : basis.orbitals) {
        Json jo = Json::object();
        jo.set("m", o.m).set("index", o.index).set("energy", o.energy);
        orbs.push(std::move(jo));
    }
    RunOutput out;
    out.result = to_json(ci);
    out.result.set("orbitals", std::move(orbs))
        .set("e_low", cs.e_low)
        .set("mu_plus_1", cs.mu + 1.0)
        .set("bounds_satisfied",
             ci.ground_energy >= cs.e_low && ci.ground_energy >= cs.mu + 1.0);
    return out;
}

std::string timestamp_utc() {
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_file_or_throw(const fs::path& path, const std::string& bytes) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    f.flush();
    if (!f)
        throw ConfigInvalid("output directory is not writable: " + path.parent_path().string());
}

int run(const std::string& config_path, const std::string& output_flag, bool seed_flag_given,
        unsigned long long seed_flag, bool verbose) {
    // ---- config file ----
    std::ifstream in(config_path, std::ios::binary);
    if (!in) throw ConfigInvalid("cannot read config file: " + config_path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    njson cfg;
    try {
        cfg = njson::parse(text);
    } catch (const njson::parse_error& e) {
        throw ConfigInvalid(std::string("config is not valid JSON: ") + e.what());
    }
    if (!cfg.is_object()) throw ConfigInvalid("config root must be a JSON object");
    for (auto it = cfg.begin(); it != cfg.end(); ++it) {
        std::string k = it.key();
        if (k != "command" && k != "params" && k != "seed" && k != "output_dir")
            throw ConfigInvalid("unknown config key '" + k + "'");
    }
    if (!cfg.contains("command") || !cfg["command"].is_string())
        throw ConfigInvalid("config needs a string 'command'");
    std::string command = cfg["command"].get<std::string>();

    njson params_in = njson::object();
    if (cfg.contains("params")) {
        if (!cfg["params"].is_object()) throw ConfigInvalid("'params' must be an object");
        params_in = cfg["params"];
    }

    unsigned long long seed = 0;
    if (cfg.contains("seed")) {
        if (!cfg["seed"].is_number_unsigned())
            throw ConfigInvalid("'seed' must be a nonnegative integer");
        seed = cfg["seed"].get<unsigned long long>();
    }
    if (seed_flag_given) seed = seed_flag;

    std::string output_dir = ".";
    if (cfg.contains("output_dir")) {
        if (!cfg["output_dir"].is_string()) throw ConfigInvalid("'output_dir' must be a string");
        output_dir = cfg["output_dir"].get<std::string>();
    }
    if (!output_flag.empty()) output_dir = output_flag;

    // ---- dispatch ----
    Params p(params_in);
    RunOutput out;
    try {
        if (command == "constants") out = run_constants(p);
        else if (command == "potentials") out = run_potentials(p);
        else if (command == "spectrum2d") out = run_spectrum2d(p);
        else if (command == "spectrum-layer") out = run_spectrum_layer(p);
        else if (command == "converge") out = run_converge(p);
        else if (command == "localize") out = run_localize(p);
        else if (command == "two-electron") out = run_two_electron(p);
        else throw ConfigInvalid("unknown command '" + command + "'");
    } catch (const ConfigInvalid&) {
        throw;
    } catch (const std::runtime_error& e) {
        throw ComputationFailed(error_name(e), e.what());
    }

    // ---- artifact assembly ----
    Json hash_root = Json::object();
    hash_root.set("command", command).set("params", p.normalized()).set("seed", seed);
    std::string config_hash = hex16(fnv1a64(hash_root.canonical()));

    Json artifact = Json::object();
    artifact.set("command", command)
        .set("version", kVersion)
        .set("config_hash", config_hash)
        .set("seed", seed)
        .set("generated_at", timestamp_utc())
        .set("params", p.normalized())
        .set("result", out.result);

    fs::path dir(output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigInvalid("cannot create output directory: " + output_dir);

    std::string stem = command + "-" + config_hash;
    std::vector<std::pair<fs::path, std::string>> files;
    files.emplace_back(dir / (stem + ".json"), artifact.dump(2));
    if (!out.csv.empty()) files.emplace_back(dir / (stem + ".csv"), out.csv);

    // stage everything, then rename: a failure never leaves partial artifacts
    std::vector<fs::path> staged;
    for (const auto& [path, bytes] : files) {
        fs::path tmp = path;
        tmp += ".tmp";
        try {
            write_file_or_throw(tmp, bytes);
        } catch (...) {
            for (const auto& s : staged) fs::remove(s, ec);
            fs::remove(tmp, ec);
            throw;
        }
        staged.push_back(tmp);
    }
    for (std::size_t i = 0; i < files.size(); ++i) fs::rename(staged[i], files[i].first);

    Json summary = Json::object();
    Json paths = Json::array();
    for (const auto& [path, bytes] : files) paths.push(path.string());
    summary.set("status", "ok")
        .set("command", command)
        .set("config_hash", config_hash)
        .set("artifacts", std::move(paths));
    std::cout << summary.dump(0);

    if (verbose)
        std::cerr << "wrote " << files.size() << " artifact(s) for " << command << " as "
                  << stem << ".*\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"thinlayer batch runner"};
    app.set_version_flag("--version", kVersion);
    std::string config_path, output_dir;
    unsigned long long seed = 0;
    bool verbose = false;
    auto* copt = app.add_option("--config", config_path, "path to the JSON run config");
    copt->required();
    app.add_option("--output", output_dir, "artifact directory (overrides config)");
    auto* sopt = app.add_option("--seed", seed, "sampling seed (overrides config)");
    app.add_flag("--verbose", verbose, "progress notes on stderr");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        Json err = Json::object();
        Json body = Json::object();
        body.set("type", "ConfigInvalid").set("message", std::string(e.what()));
        err.set("error", std::move(body));
        std::cout << err.dump(0);
        return 2;
    }

    try {
        return run(config_path, output_dir, sopt->count() > 0, seed, verbose);
    } catch (const ConfigInvalid& e) {
        Json err = Json::object();
        Json body = Json::object();
        body.set("type", "ConfigInvalid").set("message", std::string(e.what()));
        err.set("error", std::move(body));
        std::cout << err.dump(0);
        return 2;
    } catch (const ComputationFailed& e) {
        Json err = Json::object();
        Json body = Json::object();
        body.set("type", "ComputationFailed")
            .set("module_error", e.module_error_type)
            .set("message", std::string(e.what()));
        err.set("error", std::move(body));
        std::cout << err.dump(0);
        return 3;
    } catch (const std::exception& e) {
        Json err = Json::object();
        Json body = Json::object();
        body.set("type", "ComputationFailed")
            .set("module_error", error_name(e))
            .set("message", std::string(e.what()));
        err.set("error", std::move(body));
        std::cout << err.dump(0);
        return 3;
    }
}
