#pragma once

#include <CLI11.hpp>
#include <algorithm>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "trotterlab/io.h"

namespace cli {

using trotterlab::Json;

// Bad user input; `field` names the offending config key or flag.
struct ConfigError : std::runtime_error {
    std::string field;
    ConfigError(std::string f, const std::string &msg) : std::runtime_error(msg), field(std::move(f)) {}
};

template <class T>
struct is_vector : std::false_type {};
template <class T>
struct is_vector<std::vector<T>> : std::true_type {};

inline std::string normalize_key(std::string k) {
    for (auto &ch : k)
        if (ch == '_') ch = '-';
    return k;
}

// Flags of one subcommand, also settable from a JSON config file. Flags given
// on the command line win over the file.
class Options {
   public:
    explicit Options(CLI::App *app) : app_(app) {
        app_->add_option("--config", config_path_, "JSON config file (flags win)");
    }

    template <class T>
    CLI::Option *add(const std::string &name, T &var, const std::string &desc) {
        CLI::Option *opt = app_->add_option("--" + name, var, desc);
        if constexpr (is_vector<T>::value) opt->delimiter(',');
        bind(name, opt, [&var, name](const Json &j) { var = j.get<T>(); }, [&var] { return Json(var); });
        return opt;
    }

    CLI::Option *flag(const std::string &name, bool &var, const std::string &desc) {
        CLI::Option *opt = app_->add_flag("--" + name, var, desc);
        bind(name, opt, [&var](const Json &j) { var = j.get<bool>(); }, [&var] { return Json(var); });
        return opt;
    }

    // Call after parsing.
    void apply_config() {
        if (config_path_.empty()) return;
        Json cfg;
        try {
            cfg = Json::parse(trotterlab::read_text(config_path_));
        } catch (const Json::parse_error &e) {
            throw ConfigError("config", std::string("malformed JSON: ") + e.what());
        } catch (const std::runtime_error &e) {
            throw ConfigError("config", e.what());
        }
        if (!cfg.is_object()) throw ConfigError("config", "expected a JSON object");
        for (auto it = cfg.begin(); it != cfg.end(); ++it) {
            const std::string key = normalize_key(it.key());
            auto b = std::find_if(bindings_.begin(), bindings_.end(), [&](const Binding &x) { return x.name == key; });
            if (b == bindings_.end()) throw ConfigError(it.key(), "unknown field");
            if (b->opt->count() > 0) continue;
            try {
                b->from_json(it.value());
            } catch (const Json::exception &e) {
                throw ConfigError(it.key(), std::string("wrong type: ") + e.what());
            }
        }
    }

    Json resolved() const {
        Json j = Json::object();
        for (const auto &b : bindings_) j[b.name] = b.to_json();
        return j;
    }

    bool given(const std::string &name) const {
        for (const auto &b : bindings_)
            if (b.name == name) return b.opt->count() > 0 || b.from_config;
        return false;
    }

   private:
    struct Binding {
        std::string name;
        CLI::Option *opt;
        std::function<void(const Json &)> from_json;
        std::function<Json()> to_json;
        bool from_config = false;
    };

    void bind(const std::string &name, CLI::Option *opt, std::function<void(const Json &)> set,
              std::function<Json()> get) {
        bindings_.push_back({name, opt, nullptr, std::move(get)});
        auto idx = bindings_.size() - 1;
        bindings_[idx].from_json = [this, idx, set = std::move(set)](const Json &j) {
            set(j);
            bindings_[idx].from_config = true;
        };
    }

    CLI::App *app_;
    std::string config_path_;
    std::vector<Binding> bindings_;
};

// Molecule selection shared by most subcommands.
struct MoleculeArgs {
    std::string family;
    int n = 0;
    std::string lattice;  // lattice.json
    std::string ham;      // ham.json
    std::string layout = "interleaved";
    std::string shift = "auto";
    double tau = 2.4, u = 11.13, alpha = 0.6117;

    void add_to(Options &o) {
        o.add("family", family, "acene | rhombene | triangulene");
        o.add("n", n, "molecule size");
        o.add("lattice", lattice, "lattice JSON from the lattice subcommand");
        o.add("ham", ham, "Hamiltonian JSON from the hamiltonian subcommand");
        o.add("layout", layout, "qubit layout: interleaved | blocked");
        o.add("shift", shift, "symmetry shift: auto | none");
        o.add("tau", tau, "hopping (eV)");
        o.add("u", u, "on-site repulsion (eV)");
        o.add("alpha", alpha, "Ohno parameter (1/Angstrom^2)");
    }
};

trotterlab::MolecularSystem resolve_system(const MoleculeArgs &m, const Options &o);
trotterlab::SectorSpec parse_sector(const std::string &text, int n_sites, trotterlab::SpinLayout layout);
std::string cache_dir();  // TROTTERLAB_CACHE or ""

// Envelope written by every subcommand.
Json envelope(const std::string &command, const Json &config);
void emit(const Json &out, const std::string &path);

struct ReproduceArgs {
    std::string target;
    bool slow = false;
    int jobs = 1;
    int64_t samples = 10000;
    uint64_t seed = 1;
    std::string molecule;
    std::string csv;
    double gamma = 1.35;       // fig7 power law for the worst-case constant
    double anchor_w = 334.71;  // W_SO at the anchor molecule
    int anchor_sites = 14;
};

// Comparison report; sets `failed` when any row fails.
Json reproduce(const ReproduceArgs &args, bool &failed);

}  // namespace cli
