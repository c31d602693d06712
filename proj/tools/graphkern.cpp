// graphkern: command-line front end for the graph kernel library.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "graphkern/graphkern.hpp"

namespace fs = std::filesystem;
using namespace graphkern;
using nlohmann::ordered_json;

namespace {

struct RunConfig {
    std::optional<fs::path> dataset;
    std::string name;
    std::vector<std::string> kernels{"gh"};
    std::vector<int> s_grid{0, 1, 2, 3, 4, 5};
    std::optional<double> lambda;
    std::string node_kernel = "auto";
    int h = default_wl_iterations;
    std::vector<double> noise_x;
    std::size_t attachments = 1;
    std::string label_policy = "uniform";
    bool degree_labels_first = false;
    bool fixed_noise = false;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    std::string out;
    std::size_t max_paths = default_max_paths;
    std::size_t reps = 10;
    std::size_t outer_folds = 10;
    std::size_t inner_folds = 10;
    std::vector<double> c_grid = default_c_grid();
    bool timing = false;
    bool unnormalized = false;
    fs::path graph_file;
    std::string root;
    // which flags were given explicitly
    bool has_s = false;
    bool has_h = false;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::ofstream open_output(const fs::path& path) {
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError("cannot write " + path.string());
    }
    return out;
}

void write_json(const ordered_json& j, const fs::path& path) {
    auto out = open_output(path);
    out << j.dump(2) << '\n';
}

fs::path with_suffix(const std::string& prefix, const char* suffix) {
    return fs::path(prefix + suffix);
}

void require_out(const RunConfig& cfg) {
    if (cfg.out.empty()) {
        throw ConfigError("--out is required for this command");
    }
}

void check_kernel_flags(const RunConfig& cfg) {
    for (const auto& k : cfg.kernels) {
        if (k != "gh" && k != "wl") {
            throw ConfigError("unknown kernel '" + k + "' (expected gh or wl)");
        }
    }
    const bool any_gh = std::find(cfg.kernels.begin(), cfg.kernels.end(), "gh") != cfg.kernels.end();
    const bool any_wl = std::find(cfg.kernels.begin(), cfg.kernels.end(), "wl") != cfg.kernels.end();
    if (cfg.has_s && !any_gh) {
        throw ConfigError("--s applies to --kernel gh only");
    }
    if (cfg.has_h && !any_wl) {
        throw ConfigError("--h applies to --kernel wl only");
    }
    if (cfg.h < 0) {
        throw ConfigError("--h must be non-negative");
    }
    for (const int s : cfg.s_grid) {
        if (s < 0) {
            throw ConfigError("--s values must be non-negative");
        }
    }
    if (cfg.s_grid.empty()) {
        throw ConfigError("--s needs at least one value");
    }
}

NodeKernelSpec resolve_node_kernel(const RunConfig& cfg, const Dataset& d) {
    NodeKernelSpec spec = default_node_kernel(d);
    if (cfg.node_kernel == "dirac") {
        spec = NodeKernelSpec::dirac();
    } else if (cfg.node_kernel == "gaussian") {
        spec = NodeKernelSpec::gaussian(spec.bandwidth);
    } else if (cfg.node_kernel == "product") {
        spec = NodeKernelSpec::product(spec.bandwidth);
    } else if (cfg.node_kernel != "auto") {
        throw ConfigError("unknown node kernel '" + cfg.node_kernel + "'");
    }
    if (cfg.lambda) {
        if (!spec.needs_attributes()) {
            throw ConfigError("--lambda only applies to the gaussian and product node kernels");
        }
        spec.bandwidth = *cfg.lambda;
    }
    return spec;
}

Dataset load(const RunConfig& cfg, bool require_class_labels) {
    if (cfg.name.empty()) {
        throw ConfigError("--name is required");
    }
    const auto dir = resolve_dataset_dir(cfg.dataset, cfg.name);
    TuLoadOptions options;
    options.require_class_labels = require_class_labels;
    return load_tu_dataset(dir, cfg.name, options);
}

/// Noise injection followed by label recomputation. Unlabelled datasets get
/// degree labels after the noise (so added edges change degrees), unless
/// --degree-labels-first asks for the labels to be fixed beforehand.
Dataset prepare(const Dataset& loaded, const RunConfig& cfg, double x, std::uint64_t noise_seed) {
    const bool unlabeled = !loaded.all_labeled();
    Dataset d = loaded;
    if (unlabeled && cfg.degree_labels_first) {
        d = with_degree_labels_if_unlabeled(std::move(d));
    }
    NoiseConfig noise;
    noise.fraction = x;
    noise.seed = noise_seed;
    noise.attachments = cfg.attachments;
    if (cfg.label_policy == "uniform") {
        noise.label_policy = NoiseLabelPolicy::uniform_alphabet;
    } else if (cfg.label_policy == "copy-anchor") {
        noise.label_policy = NoiseLabelPolicy::copy_anchor;
    } else {
        throw ConfigError("unknown label policy '" + cfg.label_policy + "'");
    }
    if (const auto warning = noise_config_warning(noise)) {
        std::cerr << "warning: " << *warning << '\n';
    }
    d = inject_noise(d, noise, resolve_threads(cfg.threads));
    if (unlabeled && !cfg.degree_labels_first) {
        d = with_degree_labels_if_unlabeled(std::move(d));
    }
    return d;
}

std::string param_text(const std::string& kernel, const RunConfig& cfg) {
    if (kernel == "wl") {
        return "h=" + std::to_string(cfg.h);
    }
    std::string text = "s=";
    for (std::size_t i = 0; i < cfg.s_grid.size(); ++i) {
        text += (i ? "," : "") + std::to_string(cfg.s_grid[i]);
    }
    return text;
}

std::map<int, GramMatrix> grams_for(const Dataset& d, const std::string& kernel, const RunConfig& cfg) {
    const auto threads = resolve_threads(cfg.threads);
    std::map<int, GramMatrix> grams;
    if (kernel == "wl") {
        grams.emplace(cfg.h, normalize(gram(d, WlParams{cfg.h}, threads)));
        return grams;
    }
    const auto spec = resolve_node_kernel(cfg, d);
    for (const int s : cfg.s_grid) {
        if (!grams.count(s)) {
            grams.emplace(s, normalize(gram(d, GraphHopperParams{static_cast<std::size_t>(s), spec}, threads)));
        }
    }
    return grams;
}

CvProtocol protocol_for(const std::string& kernel, const RunConfig& cfg, std::uint64_t seed, std::size_t reps) {
    CvProtocol p;
    p.outer_folds = cfg.outer_folds;
    p.inner_folds = cfg.inner_folds;
    p.repetitions = reps;
    p.c_grid = cfg.c_grid;
    p.seed = seed;
    if (kernel == "wl") {
        p.param_grid = {cfg.h};
    } else {
        p.param_grid = cfg.s_grid;
    }
    return p;
}

ordered_json protocol_json(const RunConfig& cfg) {
    ordered_json j;
    j["outer_folds"] = cfg.outer_folds;
    j["inner_folds"] = cfg.inner_folds;
    j["repetitions"] = cfg.reps;
    j["c_grid"] = cfg.c_grid;
    j["seed"] = cfg.seed;
    j["rng"] = rng_name;
    return j;
}

/// One row per repetition plus an aggregate row.
std::vector<AccuracyRow> accuracy_rows(const std::string& dataset, const std::string& kernel, const std::string& param,
                                       double x, const CvResult& r, std::optional<double> runtime) {
    std::vector<AccuracyRow> rows;
    for (std::size_t i = 0; i < r.repetition_accuracy.size(); ++i) {
        rows.push_back({dataset, kernel, param, x, std::to_string(i), r.repetition_accuracy[i], 0.0, std::nullopt});
    }
    rows.push_back({dataset, kernel, param, x, "all", r.mean_accuracy, r.std_accuracy, runtime});
    return rows;
}

void report_nonconvergence(const CvResult& r) {
    if (r.nonconverged_fits > 0) {
        std::cerr << "warning: " << r.nonconverged_fits
                  << " SVM fits stopped at the iteration cap before reaching the tolerance\n";
    }
}

int cmd_info(const RunConfig& cfg) {
    const auto d = load(cfg, false);
    const auto stats = dataset_stats(d);
    std::ostringstream table;
    table << std::fixed;
    table.precision(2);
    table << "dataset          " << cfg.name << '\n'
          << "graphs           " << stats.graph_count << '\n'
          << "classes          " << (d.meta.has_class_labels ? std::to_string(stats.class_count) : "NA") << '\n'
          << "mean |V|         " << stats.mean_nodes << '\n'
          << "mean |E|         " << stats.mean_edges << '\n';
    table.precision(4);
    table << "mean density     " << stats.mean_density << '\n'
          << "node labels      " << (stats.discrete_labels ? "yes" : "no") << '\n'
          << "node attributes  " << (stats.attribute_dim > 0 ? "yes (dim " + std::to_string(stats.attribute_dim) + ")"
                                                             : std::string("no"))
          << '\n';
    std::cout << table.str();
    if (!cfg.out.empty()) {
        ordered_json j;
        j["dataset"] = cfg.name;
        j["graphs"] = stats.graph_count;
        if (d.meta.has_class_labels) {
            j["classes"] = stats.class_count;
        } else {
            j["classes"] = nullptr;
        }
        j["mean_nodes"] = stats.mean_nodes;
        j["mean_edges"] = stats.mean_edges;
        j["mean_density"] = stats.mean_density;
        j["node_labels"] = stats.discrete_labels;
        j["attribute_dim"] = stats.attribute_dim;
        write_json(j, cfg.out);
    }
    return 0;
}

int cmd_gram(const RunConfig& cfg) {
    require_out(cfg);
    check_kernel_flags(cfg);
    if (cfg.kernels.size() != 1) {
        throw ConfigError("gram takes exactly one --kernel");
    }
    if (cfg.kernels.front() == "gh" && cfg.s_grid.size() != 1) {
        throw ConfigError("gram takes exactly one --s value");
    }
    if (cfg.noise_x.size() > 1) {
        throw ConfigError("gram takes at most one --noise-x value");
    }
    const auto start = Clock::now();
    const double x = cfg.noise_x.empty() ? 0.0 : cfg.noise_x.front();
    const auto d = prepare(load(cfg, false), cfg, x, cfg.seed);
    const auto threads = resolve_threads(cfg.threads);
    KernelChoice choice = WlParams{cfg.h};
    if (cfg.kernels.front() == "gh") {
        choice = GraphHopperParams{static_cast<std::size_t>(cfg.s_grid.front()), resolve_node_kernel(cfg, d)};
    }
    auto m = gram(d, choice, threads);
    if (!cfg.unnormalized) {
        m = normalize(m);
    }
    m.provenance.dataset = cfg.name;
    write_gram_csv(m, with_suffix(cfg.out, ".csv"));
    auto sidecar = to_json(m.provenance, m.normalized, m.size());
    if (cfg.timing) {
        sidecar["runtime_seconds"] = seconds_since(start);
    }
    write_json(sidecar, with_suffix(cfg.out, ".json"));
    std::cout << "wrote " << cfg.out << ".csv (" << m.size() << " x " << m.size() << ")\n";
    return 0;
}

int cmd_classify(const RunConfig& cfg) {
    check_kernel_flags(cfg);
    if (cfg.kernels.size() != 1) {
        throw ConfigError("classify takes exactly one --kernel");
    }
    const auto& kernel = cfg.kernels.front();
    const auto start = Clock::now();
    const auto d = prepare(load(cfg, true), cfg, 0.0, cfg.seed);
    const auto grams = grams_for(d, kernel, cfg);
    const auto result =
        nested_cv(grams, d.class_labels, protocol_for(kernel, cfg, cfg.seed, cfg.reps), resolve_threads(cfg.threads));
    report_nonconvergence(result);
    const std::optional<double> runtime = cfg.timing ? std::optional(seconds_since(start)) : std::nullopt;

    std::cout << cfg.name << ' ' << kernel << ' ' << param_text(kernel, cfg) << ": accuracy "
              << format_real(result.mean_accuracy) << " +- " << format_real(result.std_accuracy) << '\n';
    if (!cfg.out.empty()) {
        ordered_json j;
        j["command"] = "classify";
        j["dataset"] = cfg.name;
        j["kernel"] = kernel;
        j["param"] = param_text(kernel, cfg);
        j["noise_x"] = 0.0;
        j["protocol"] = protocol_json(cfg);
        j["result"] = to_json(result);
        if (runtime) {
            j["runtime_seconds"] = *runtime;
        }
        write_json(j, with_suffix(cfg.out, ".json"));
        write_accuracy_csv(accuracy_rows(cfg.name, kernel, param_text(kernel, cfg), 0.0, result, runtime),
                           with_suffix(cfg.out, ".csv"));
    }
    return 0;
}

/// Repetition r of noise level x uses CV seed `seed + r`, which makes the x = 0
/// rows coincide with `classify` under the same seed. The noise is redrawn per
/// repetition with seed `seed + r` unless --fixed-noise keeps one noisy copy
/// (seed `seed`) per level.
int cmd_noise_sweep(const RunConfig& cfg) {
    require_out(cfg);
    check_kernel_flags(cfg);
    std::vector<double> xs = cfg.noise_x;
    if (xs.empty()) {
        xs = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
    }
    const auto loaded = load(cfg, true);
    const auto threads = resolve_threads(cfg.threads);

    std::vector<AccuracyRow> rows;
    ordered_json runs = ordered_json::array();
    for (const auto& kernel : cfg.kernels) {
        for (const double x : xs) {
            const auto start = Clock::now();
            std::vector<CvResult> parts;
            // zero noise, or fixed noise, gives the same Grams for every repetition
            const bool shared = x == 0.0 || cfg.fixed_noise;
            std::optional<std::map<int, GramMatrix>> fixed;
            for (std::size_t r = 0; r < cfg.reps; ++r) {
                const auto seed = cfg.seed + r;
                std::map<int, GramMatrix> redrawn;
                if (shared) {
                    if (!fixed) {
                        fixed = grams_for(prepare(loaded, cfg, x, cfg.seed), kernel, cfg);
                    }
                } else {
                    redrawn = grams_for(prepare(loaded, cfg, x, seed), kernel, cfg);
                }
                parts.push_back(nested_cv(shared ? *fixed : redrawn, loaded.class_labels,
                                          protocol_for(kernel, cfg, seed, 1), threads));
            }
            const auto result = merge_repetitions(parts);
            report_nonconvergence(result);
            const std::optional<double> runtime = cfg.timing ? std::optional(seconds_since(start)) : std::nullopt;
            const auto param = param_text(kernel, cfg);
            for (auto& row : accuracy_rows(cfg.name, kernel, param, x, result, runtime)) {
                rows.push_back(std::move(row));
            }
            ordered_json run;
            run["kernel"] = kernel;
            run["param"] = param;
            run["noise_x"] = x;
            run["result"] = to_json(result);
            if (runtime) {
                run["runtime_seconds"] = *runtime;
            }
            runs.push_back(std::move(run));
            std::cout << cfg.name << ' ' << kernel << " x=" << format_real(x) << ": accuracy "
                      << format_real(result.mean_accuracy) << " +- " << format_real(result.std_accuracy) << '\n';
        }
    }
    ordered_json j;
    j["command"] = "noise-sweep";
    j["dataset"] = cfg.name;
    j["protocol"] = protocol_json(cfg);
    j["attachments"] = cfg.attachments;
    j["label_policy"] = cfg.label_policy;
    j["noise_redrawn_per_repetition"] = !cfg.fixed_noise;
    j["runs"] = std::move(runs);
    write_json(j, with_suffix(cfg.out, ".json"));
    write_accuracy_csv(rows, with_suffix(cfg.out, ".csv"));
    return 0;
}

int cmd_paths(const RunConfig& cfg) {
    if (cfg.s_grid.size() != 1) {
        throw ConfigError("paths takes exactly one --s value");
    }
    if (cfg.s_grid.front() < 0) {
        throw ConfigError("--s must be non-negative");
    }
    const auto named = read_edge_list(cfg.graph_file);
    if (named.graph.node_count() == 0) {
        throw DataError("graph file " + cfg.graph_file.string() + " has no nodes");
    }
    const NodeId root = cfg.root.empty() ? 0 : named.node(cfg.root);
    const auto dag = extend_gappy(build_spdag(named.graph, root), static_cast<std::size_t>(cfg.s_grid.front()));
    const auto paths = enumerate_paths(dag, cfg.max_paths);
    std::ostringstream text;
    for (const auto& p : paths) {
        text << '[';
        for (std::size_t i = 0; i < p.size(); ++i) {
            text << (i ? "," : "") << named.names[p[i]];
        }
        text << "]\n";
    }
    if (cfg.out.empty()) {
        std::cout << text.str();
    } else {
        auto out = open_output(cfg.out);
        out << text.str();
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Graph kernels (GraphHopper with gaps, Weisfeiler-Lehman) and SVM evaluation"};
    app.require_subcommand(1);
    // -h stays free so that --h (WL iterations) does not clash with the help flag
    app.set_help_flag("--help", "Print this help message and exit");
    RunConfig cfg;

    const auto add_dataset = [&](CLI::App* sub) {
        sub->add_option("--dataset", cfg.dataset, "Directory with TU-format files (default: $GRAPHKERN_DATA_DIR)");
        sub->add_option("--name", cfg.name, "Dataset name, the prefix of the TU files")->required();
    };
    const auto add_kernel = [&](CLI::App* sub, bool many_kernels) {
        auto* k = sub->add_option("--kernel", cfg.kernels, many_kernels ? "Kernels to run (gh, wl)" : "gh or wl");
        if (!many_kernels) {
            k->expected(1);
        }
        k->check(CLI::IsMember({"gh", "wl"}));
        sub->add_option("--s", cfg.s_grid, "GraphHopper gap size(s)");
        sub->add_option("--lambda", cfg.lambda, "Gaussian bandwidth in exp(-lambda |x - x'|^2) (default 1/d)");
        sub->add_option("--node-kernel", cfg.node_kernel, "auto, dirac, gaussian or product")
            ->check(CLI::IsMember({"auto", "dirac", "gaussian", "product"}));
        sub->add_option("--h", cfg.h, "WL iterations");
    };
    const auto add_run = [&](CLI::App* sub) {
        sub->add_option("--seed", cfg.seed, "Base seed");
        sub->add_option("--threads", cfg.threads, "Worker threads (0 = all cores)");
        sub->add_flag("--degree-labels-first", cfg.degree_labels_first,
                      "For unlabelled data, derive degree labels before adding noise");
        sub->add_option("--attachments", cfg.attachments, "Edges per added noise node");
        sub->add_option("--label-policy", cfg.label_policy, "Labels of noise nodes: uniform or copy-anchor")
            ->check(CLI::IsMember({"uniform", "copy-anchor"}));
    };
    const auto add_cv = [&](CLI::App* sub) {
        sub->add_option("--reps", cfg.reps, "Repetitions of the nested cross-validation");
        sub->add_option("--outer-folds", cfg.outer_folds, "Outer folds");
        sub->add_option("--inner-folds", cfg.inner_folds, "Inner folds");
        sub->add_option("--c-grid", cfg.c_grid, "SVM cost values");
        sub->add_flag("--timing", cfg.timing, "Record wall-clock runtimes (output then varies between runs)");
    };

    auto* info = app.add_subcommand("info", "Print dataset statistics");
    add_dataset(info);
    info->add_option("--out", cfg.out, "Also write the statistics as JSON");
    info->add_option("--threads", cfg.threads, "Accepted for uniformity; statistics are computed sequentially");

    auto* gram_cmd = app.add_subcommand("gram", "Compute a Gram matrix (CSV) with a JSON provenance sidecar");
    add_dataset(gram_cmd);
    add_kernel(gram_cmd, false);
    add_run(gram_cmd);
    gram_cmd->add_option("--noise-x", cfg.noise_x, "Fraction of noise nodes added per graph");
    gram_cmd->add_option("--out", cfg.out, "Output prefix (writes PREFIX.csv and PREFIX.json)");
    gram_cmd->add_flag("--unnormalized", cfg.unnormalized, "Skip cosine normalisation");
    gram_cmd->add_flag("--timing", cfg.timing, "Record the runtime in the sidecar");

    auto* classify = app.add_subcommand("classify", "Nested cross-validated SVM accuracy");
    add_dataset(classify);
    add_kernel(classify, false);
    add_run(classify);
    add_cv(classify);
    classify->add_option("--out", cfg.out, "Output prefix (writes PREFIX.json and PREFIX.csv)");

    auto* sweep = app.add_subcommand("noise-sweep", "Accuracy as a function of added structural noise");
    add_dataset(sweep);
    add_kernel(sweep, true);
    add_run(sweep);
    add_cv(sweep);
    sweep->add_option("--noise-x", cfg.noise_x, "Noise fractions (default 0 0.1 0.2 0.3 0.4 0.5)");
    sweep->add_flag("--fixed-noise", cfg.fixed_noise,
                    "Draw one noisy dataset per level instead of one per repetition");
    sweep->add_option("--out", cfg.out, "Output prefix (writes PREFIX.csv and PREFIX.json)");

    auto* paths = app.add_subcommand("paths", "List the gappy shortest paths from one node of a small graph");
    paths->add_option("--graph", cfg.graph_file, "Edge-list file: 'u v [length]' per line")->required();
    paths->add_option("--root", cfg.root, "Root node name (default: first node in the file)");
    paths->add_option("--s", cfg.s_grid, "Gap size")->expected(1);
    paths->add_option("--max-paths", cfg.max_paths, "Abort when more paths than this would be listed");
    paths->add_option("--out", cfg.out, "Write the listing to a file instead of stdout");
    paths->add_option("--threads", cfg.threads, "Accepted for uniformity; the listing is computed sequentially");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_code(ErrorKind::config);
    }

    if (paths->parsed()) {
        if (paths->count("--s") == 0) {
            cfg.s_grid = {0};
        }
    } else {
        const auto* sub = app.get_subcommands().front();
        const auto given = [&](const char* name) {
            const auto* opt = sub->get_option_no_throw(name);
            return opt != nullptr && opt->count() > 0;
        };
        cfg.has_s = given("--s");
        cfg.has_h = given("--h");
    }

    try {
        if (info->parsed()) {
            return cmd_info(cfg);
        }
        if (gram_cmd->parsed()) {
            if (!cfg.has_s && cfg.kernels.front() == "gh") {
                cfg.s_grid = {0};
            }
            return cmd_gram(cfg);
        }
        if (classify->parsed()) {
            return cmd_classify(cfg);
        }
        if (sweep->parsed()) {
            return cmd_noise_sweep(cfg);
        }
        return cmd_paths(cfg);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code(e.kind());
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code(ErrorKind::config);
    } catch (const std::out_of_range& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code(ErrorKind::config);
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code(ErrorKind::data);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code(ErrorKind::compute);
    }
}
