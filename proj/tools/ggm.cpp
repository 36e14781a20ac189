#include "archive.hpp"

#include "gaitggm/distances/distance.hpp"
#include "gaitggm/error.hpp"
#include "gaitggm/eval/evaluation.hpp"
#include "gaitggm/granger/ggm.hpp"
#include "gaitggm/mocap/acclaim.hpp"
#include "gaitggm/mocap/gait.hpp"
#include "gaitggm/mocap/kinematics.hpp"
#include "gaitggm/mocap/trajectory_io.hpp"
#include "gaitggm/synth/var.hpp"
#include "gaitggm/util/parallel.hpp"
#include "gaitggm/util/text.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <iostream>
#include <map>
#include <optional>
#include <set>

namespace {

namespace fs = std::filesystem;
using gaitggm::Error;
using gaitggm::ErrorCode;
using nlohmann::json;
using Files = std::vector<std::pair<std::string, std::string>>;
using namespace ggm_cli;

struct Settings {
    std::string out;
    std::size_t lag = 1;
    double lambda_max = 5.0;
    std::size_t folds = 5;
    std::size_t grid_size = 20;
    std::string penalty = "adaptive-lasso";
    std::string cv_rule = "one-se";
    std::string distance;
    std::size_t fixed_length = 156;
    std::size_t jobs = 1;
    std::uint64_t seed = 1;
    bool jaccard_complement = true;

    // ingest
    std::vector<std::string> inputs;
    bool prototype = true;
    bool normalize = true;
    std::vector<std::string> drop_joints;

    // extract / dist / eval / ablate
    std::string archive;
    std::vector<std::string> metrics{"ccr", "dbi", "di"};

    // synth
    std::vector<std::string> processes{"chain"};
    std::size_t series = 5;
    double coefficient = 0.6;
    double noise = 0.1;
    std::size_t frames = 200;
    std::size_t seeds = 20;
    int dims = 3;
};

void warn(const std::string& message) { std::cerr << "ggm: warning: " << message << '\n'; }

gaitggm::granger::GgmConfig ggm_config(const Settings& s)
{
    gaitggm::granger::GgmConfig c;
    c.lag = s.lag;
    c.lambda_max = s.lambda_max;
    c.cv_folds = s.folds;
    c.lambda_grid_size = s.grid_size;
    c.penalty = gaitggm::granger::parse_penalty(s.penalty);
    c.cv_rule = gaitggm::granger::parse_cv_rule(s.cv_rule);
    c.validate();
    return c;
}

gaitggm::eval::EvalOptions eval_options(const Settings& s)
{
    gaitggm::eval::EvalOptions o;
    o.jaccard_complement = s.jaccard_complement;
    o.jobs = s.jobs;
    return o;
}

void require_directory(const std::string& path, const char* what)
{
    if (!fs::is_directory(path)) throw Error(ErrorCode::InvalidConfig, std::string(what) + " '" + path + "' is not a directory");
}

void require_output(const Settings& s)
{
    if (s.out.empty()) throw Error(ErrorCode::InvalidConfig, "--out is required");
    if (fs::exists(s.out) && !fs::is_directory(s.out))
        throw Error(ErrorCode::InvalidConfig, "--out '" + s.out + "' exists and is not a directory");
    if (s.jobs == 0) throw Error(ErrorCode::InvalidConfig, "--jobs must be >= 1");
}

std::string extension(const fs::path& p) { return gaitggm::util::to_lower(p.extension().string()); }

// ---------------------------------------------------------------- ingest

struct MotionInput {
    fs::path motion;  // .amc or .csv
    std::optional<fs::path> asf;
};

std::vector<fs::path> expand_inputs(const std::vector<std::string>& inputs)
{
    std::vector<fs::path> files;
    for (const auto& in : inputs) {
        const fs::path p(in);
        if (fs::is_directory(p)) {
            std::vector<fs::path> found;
            for (const auto& entry : fs::directory_iterator(p)) {
                const auto ext = extension(entry.path());
                if (entry.is_regular_file() && (ext == ".asf" || ext == ".amc" || ext == ".csv"))
                    found.push_back(entry.path());
            }
            std::sort(found.begin(), found.end());
            files.insert(files.end(), found.begin(), found.end());
        } else if (fs::is_regular_file(p)) {
            files.push_back(p);
        } else {
            throw Error(ErrorCode::InvalidConfig, "input '" + in + "' does not exist");
        }
    }
    return files;
}

/// Each AMC pairs with the nearest preceding ASF in argument order.
std::pair<std::vector<fs::path>, std::vector<MotionInput>> pair_inputs(const std::vector<fs::path>& files)
{
    std::vector<fs::path> asfs;
    std::vector<MotionInput> motions;
    std::optional<fs::path> current;
    for (const auto& f : files) {
        const auto ext = extension(f);
        if (ext == ".asf") {
            asfs.push_back(f);
            current = f;
        } else if (ext == ".amc") {
            if (!current) throw Error(ErrorCode::InvalidConfig, "AMC file '" + f.string() + "' has no preceding ASF");
            motions.push_back({f, current});
        } else if (ext == ".csv") {
            motions.push_back({f, std::nullopt});
        } else {
            throw Error(ErrorCode::InvalidConfig, "unsupported input '" + f.string() + "'");
        }
    }
    return {asfs, motions};
}

[[noreturn]] void rethrow_with_file(const Error& e, const fs::path& file)
{
    throw Error(e.code(), file.string() + ": " + e.what());
}

gaitggm::mocap::MotionSequence load_csv_sequence(const fs::path& csv)
{
    using namespace gaitggm::mocap;
    if (fs::exists(sidecar_path(csv.string()))) return load_trajectory(csv.string());
    const auto table = read_trajectory_csv(gaitggm::util::read_file(csv.string()));
    return make_sequence(table.joints, table.coords, csv.stem().string());
}

gaitggm::mocap::GaitCycle restrict_joints(const gaitggm::mocap::GaitCycle& c, const std::vector<std::string>& keep)
{
    gaitggm::mocap::GaitCycle out = c;
    out.joints = keep;
    out.coords.resize(3 * static_cast<Eigen::Index>(keep.size()), c.coords.cols());
    for (std::size_t k = 0; k < keep.size(); ++k)
        out.coords.middleRows(3 * static_cast<Eigen::Index>(k), 3) =
            c.coords.middleRows(3 * static_cast<Eigen::Index>(c.joint_index(keep[k])), 3);
    return out;
}

int cmd_ingest(const Settings& s)
{
    using namespace gaitggm::mocap;
    require_output(s);
    if (s.inputs.empty()) throw Error(ErrorCode::InvalidConfig, "ingest needs at least one input");
    if (s.fixed_length < 2) throw Error(ErrorCode::InvalidConfig, "--fixed-length must be >= 2");
    const auto [asf_files, motions] = pair_inputs(expand_inputs(s.inputs));

    std::map<fs::path, Skeleton> skeletons;
    for (const auto& f : asf_files) {
        try {
            skeletons.emplace(f, parse_asf(gaitggm::util::read_file(f.string())));
        } catch (const Error& e) {
            rethrow_with_file(e, f);
        }
    }
    std::optional<Skeleton> prototype;
    if (s.prototype && skeletons.size() > 1) {
        std::vector<Skeleton> all;
        for (const auto& [path, sk] : skeletons) all.push_back(sk);
        prototype = build_prototype_skeleton(all);
    }

    SegmentOptions seg;
    seg.fixed_length = s.fixed_length;

    struct Result {
        std::vector<GaitCycle> cycles;
        std::size_t source_frames = 0;
        std::optional<std::string> warning;
    };
    std::vector<Result> results(motions.size());
    gaitggm::util::parallel_for(motions.size(), s.jobs, [&](std::size_t k) {
        const auto& in = motions[k];
        auto& r = results[k];
        try {
            MotionSequence seq;
            if (in.asf) {
                const auto& own = skeletons.at(*in.asf);
                const auto channels = parse_amc(gaitggm::util::read_file(in.motion.string()), own);
                seq = forward_kinematics(prototype ? *prototype : own, channels, in.asf->stem().string());
            } else {
                seq = load_csv_sequence(in.motion);
            }
            r.source_frames = seq.frames();
            if (s.normalize) {
                if (std::find(seq.joints.begin(), seq.joints.end(), seq.root_joint) != seq.joints.end())
                    seq = normalize_pose(seq);
                else
                    r.warning = in.motion.string() + ": no root joint '" + seq.root_joint + "', pose left as is";
            }
            SegmentOptions opts = seg;
            opts.sequence_id = in.motion.stem().string();
            r.cycles = segment_gait_cycles(seq, opts);
            for (auto& c : r.cycles) c.subject_label = seq.label.empty() ? in.motion.stem().string() : seq.label;
        } catch (const Error& e) {
            if (e.code() == ErrorCode::NoCycleDetected) {
                r.warning = in.motion.string() + ": " + e.what();
                return;
            }
            rethrow_with_file(e, in.motion);
        }
    });

    CycleArchive archive;
    json warnings = json::array();
    for (std::size_t k = 0; k < motions.size(); ++k) {
        if (results[k].warning) {
            warn(*results[k].warning);
            warnings.push_back(*results[k].warning);
        }
        for (auto& c : results[k].cycles) {
            archive.records.push_back(json{{"source", motions[k].motion.string()},
                                       {"source_frames", results[k].source_frames}});
            archive.cycles.push_back(std::move(c));
        }
    }

    // Restrict every cycle to the joints retained in all of them.
    if (!archive.cycles.empty()) {
        std::set<std::string> dropped(s.drop_joints.begin(), s.drop_joints.end());
        std::vector<std::string> common;
        for (const auto& j : archive.cycles.front().joints) {
            if (dropped.count(j)) continue;
            const bool everywhere = std::all_of(archive.cycles.begin(), archive.cycles.end(), [&](const GaitCycle& c) {
                return std::find(c.joints.begin(), c.joints.end(), j) != c.joints.end();
            });
            if (everywhere) common.push_back(j);
        }
        for (auto& c : archive.cycles) {
            if (c.joints == common) continue;
            for (const auto& j : c.joints)
                if (!dropped.count(j) && std::find(common.begin(), common.end(), j) == common.end())
                    warn("cycle " + c.id() + ": joint '" + j + "' is not active in every cycle and is dropped");
            c = restrict_joints(c, common);
        }
    }

    std::set<std::string> ids;
    for (const auto& c : archive.cycles)
        if (!ids.insert(c.id()).second) throw Error(ErrorCode::InvalidConfig, "duplicate cycle id '" + c.id() + "'");

    archive.extra = {{"fixed_length", s.fixed_length},
                     {"prototype_skeleton", prototype.has_value()},
                     {"normalized", s.normalize},
                     {"warnings", warnings}};
    write_files(s.out, render_cycle_archive(archive));
    std::cerr << "ggm: ingested " << archive.cycles.size() << " cycles from " << motions.size() << " motion files\n";
    return 0;
}

// ---------------------------------------------------------------- extract

int cmd_extract(const Settings& s)
{
    const auto config = ggm_config(s);
    require_output(s);
    require_directory(s.archive, "archive");
    const auto archive = read_cycle_archive(s.archive);

    const auto n = archive.cycles.size();
    std::vector<std::optional<gaitggm::granger::GgmFit>> fits(n);
    std::vector<std::optional<Error>> failures(n);
    gaitggm::util::parallel_for(n, s.jobs, [&](std::size_t k) {
        try {
            fits[k] = gaitggm::granger::compute_ggm_fit(archive.cycles[k], config);
        } catch (const Error& e) {
            failures[k] = e;
        }
    });

    Files files;
    json graphs = json::array();
    json failed = json::array();
    std::optional<std::vector<std::string>> joint_order;
    std::optional<ErrorCode> first_failure;
    for (std::size_t k = 0; k < n; ++k) {
        const auto& cycle = archive.cycles[k];
        const auto id = cycle.id();
        if (failures[k]) {
            std::cerr << "ggm: error: cycle " << id << ": " << failures[k]->what() << '\n';
            failed.push_back(json{{"id", id}, {"error", failures[k]->what()}});
            if (!first_failure) first_failure = failures[k]->code();
            continue;
        }
        const auto& fit = *fits[k];
        if (!joint_order) joint_order = fit.graph.joint_order;
        else if (*joint_order != fit.graph.joint_order)
            throw Error(ErrorCode::DimensionMismatch, "cycle " + id + " has a different joint set");
        files.emplace_back(id + ".adjacency.csv", gaitggm::granger::adjacency_csv(fit.graph));
        files.emplace_back(id + ".dot", gaitggm::granger::adjacency_dot(fit.graph));
        files.emplace_back(id + ".json", gaitggm::granger::ggm_json(fit, config));
        graphs.push_back(json{{"id", id},
                          {"subject", cycle.subject_label},
                          {"edges", fit.graph.edge_count()},
                          {"adjacency", id + ".adjacency.csv"},
                          {"dot", id + ".dot"},
                          {"json", id + ".json"}});
    }
    json manifest = {{"kind", "graphs"},
                     {"joint_order", joint_order.value_or(std::vector<std::string>{})},
                     {"config",
                      {{"lag", config.lag},
                       {"lambda_max", config.lambda_max},
                       {"cv_folds", config.cv_folds},
                       {"lambda_grid_size", config.lambda_grid_size},
                       {"penalty", std::string(to_string(config.penalty))},
                       {"cv_rule", std::string(to_string(config.cv_rule))}}},
                     {"graphs", graphs},
                     {"failures", failed}};
    if (archive.extra.contains("ground_truth")) manifest["ground_truth"] = archive.extra["ground_truth"];
    files.emplace_back("manifest.json", manifest.dump(2) + "\n");
    write_files(s.out, files);
    std::cerr << "ggm: extracted " << graphs.size() << " graphs, " << failed.size() << " failures\n";
    if (first_failure) {
        switch (gaitggm::classify(*first_failure)) {
        case gaitggm::ErrorClass::Usage: return 1;
        case gaitggm::ErrorClass::Data: return 2;
        case gaitggm::ErrorClass::Numerical: return 3;
        }
    }
    return 0;
}

// ---------------------------------------------------------------- dist / eval / ablate

std::vector<gaitggm::distances::DistanceFunctionId> selected_distances(const Settings& s)
{
    if (s.distance.empty() || s.distance == "all") return gaitggm::distances::all_distance_ids();
    return {gaitggm::distances::parse_distance_id(s.distance)};
}

int cmd_dist(const Settings& s)
{
    const auto ids = selected_distances(s);
    require_output(s);
    require_directory(s.archive, "archive");
    const auto set = read_graph_archive(s.archive);
    const auto options = eval_options(s);
    const auto sample_ids = set.sample_ids();
    Files files;
    for (const auto& id : ids) {
        std::optional<gaitggm::distances::ScatterModel> model;
        if (id.kind == gaitggm::distances::DistanceKind::Mahalanobis && !set.graphs.empty())
            model = gaitggm::distances::fit_scatter(set.matrices(), options.gamma);
        Eigen::MatrixXd d;
        try {
            d = gaitggm::distances::distance_matrix(set.matrices(), id, model ? &*model : nullptr, s.jobs);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::JaccardUndefined || ids.size() == 1) throw;
            warn(id.name() + " skipped: " + e.what());
            continue;
        }
        if (id.kind == gaitggm::distances::DistanceKind::Jaccard && options.jaccard_complement)
            d = (1.0 - d.array()).matrix();
        files.emplace_back("distances_" + id.name() + ".csv", gaitggm::distances::distance_matrix_csv(sample_ids, d));
    }
    write_files(s.out, files);
    return 0;
}

int cmd_eval(const Settings& s)
{
    require_output(s);
    require_directory(s.archive, "archive");
    const auto set = read_graph_archive(s.archive);
    const auto options = eval_options(s);
    const auto reports = gaitggm::eval::compare_distances(set, options);
    write_files(s.out, {{"table.csv", gaitggm::eval::report_table_csv(reports)},
                        {"report.json", gaitggm::eval::report_json(reports, options)}});
    for (const auto& r : reports)
        std::cout << r.distance_id.name() << ": ccr=" << r.ccr << " dbi=" << r.dbi << " di=" << r.di << '\n';
    return 0;
}

int cmd_ablate(const Settings& s)
{
    std::vector<gaitggm::eval::Metric> metrics;
    for (const auto& m : s.metrics) metrics.push_back(gaitggm::eval::parse_metric(m));
    std::optional<gaitggm::distances::DistanceFunctionId> override_id;
    if (!s.distance.empty()) override_id = gaitggm::distances::parse_distance_id(s.distance);
    require_output(s);
    require_directory(s.archive, "archive");
    const auto set = read_graph_archive(s.archive);
    const auto options = eval_options(s);
    Files files;
    json skipped = json::array();
    for (auto m : metrics) {
        gaitggm::eval::AblationMatrix a;
        try {
            a = gaitggm::eval::ablate_joint_pairs(set, m, override_id, options);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::ZeroDiameter && e.code() != ErrorCode::CoincidentMedoids) throw;
            warn(std::string(to_string(m)) + " ablation skipped, baseline undefined: " + e.what());
            skipped.push_back(json{{"metric", std::string(to_string(m))}, {"reason", e.what()}});
            continue;
        }
        const std::string stem = "ablation_" + std::string(to_string(m));
        files.emplace_back(stem + ".csv", gaitggm::eval::ablation_csv(a));
        files.emplace_back(stem + ".json", gaitggm::eval::ablation_json(a));
        files.emplace_back(stem + ".dat", gaitggm::eval::ablation_gnuplot(a));
    }
    if (!skipped.empty()) files.emplace_back("skipped.json", skipped.dump(2) + "\n");
    write_files(s.out, files);
    return 0;
}

// ---------------------------------------------------------------- synth

int cmd_synth(const Settings& s)
{
    using namespace gaitggm::synth;
    require_output(s);
    if (s.processes.empty()) throw Error(ErrorCode::InvalidConfig, "--process needs at least one name");
    std::vector<VarProcess> procs;
    json truth = json::object();
    for (std::size_t k = 0; k < s.processes.size(); ++k) {
        for (std::size_t r = 0; r < s.seeds; ++r) {
            auto proc = named_process(s.processes[k], s.series, s.coefficient, s.noise, s.seed + 1000003ULL * k + r);
            proc.dims_per_series = s.dims;
            proc.validate();
            if (s.frames <= 10 * proc.order()) throw Error(ErrorCode::InvalidConfig, "--frames must exceed 10 * order");
            procs.push_back(std::move(proc));
        }
        const auto g = true_graph(named_process(s.processes[k], s.series, s.coefficient, s.noise, 0));
        json edges = json::array();
        for (Eigen::Index j = 0; j < g.adjacency.rows(); ++j)
            for (Eigen::Index i = 0; i < g.adjacency.cols(); ++i)
                if (g.adjacency(j, i) != 0.0) edges.push_back(json::array({g.joint_order[static_cast<std::size_t>(j)],
                                                              g.joint_order[static_cast<std::size_t>(i)]}));
        truth[s.processes[k]] = {{"joint_order", g.joint_order}, {"edges", edges}};
    }

    CycleArchive archive;
    archive.cycles.resize(procs.size());
    gaitggm::util::parallel_for(procs.size(), s.jobs,
                                [&](std::size_t k) { archive.cycles[k] = generate_var(procs[k], s.frames); });
    for (const auto& p : procs) archive.records.push_back(json{{"seed", p.seed}});
    archive.extra = {{"ground_truth", truth},
                     {"process",
                      {{"series", s.series},
                       {"coefficient", s.coefficient},
                       {"noise_std", s.noise},
                       {"frames", s.frames},
                       {"dims_per_series", s.dims},
                       {"seeds", s.seeds},
                       {"base_seed", s.seed}}}};
    write_files(s.out, render_cycle_archive(archive));
    return 0;
}

int exit_code(const Error& e)
{
    switch (gaitggm::classify(e.code())) {
    case gaitggm::ErrorClass::Usage: return 1;
    case gaitggm::ErrorClass::Data: return 2;
    case gaitggm::ErrorClass::Numerical: return 3;
    }
    return 2;
}

}  // namespace

int main(int argc, char** argv)
{
    Settings s;
    CLI::App app{"Graphical Granger gait features: ingest, extract, compare, evaluate, ablate, synthesise"};
    app.set_config("--config", "", "TOML configuration file; command-line flags take precedence");
    app.require_subcommand(1, 1);
    app.fallthrough();

    app.add_option("--out", s.out, "Output directory");
    app.add_option("--lag", s.lag, "Lag d in frames")->capture_default_str();
    app.add_option("--lambda-max", s.lambda_max, "Upper end of the lambda grid")->capture_default_str();
    app.add_option("--folds", s.folds, "Cross-validation folds")->capture_default_str();
    app.add_option("--grid-size", s.grid_size, "Number of lambda grid points")->capture_default_str();
    app.add_option("--penalty", s.penalty, "adaptive-lasso | plain-lasso")->capture_default_str();
    app.add_option("--cv-rule", s.cv_rule, "one-se | min")->capture_default_str();
    app.add_option("--distance", s.distance, "Distance function (dist: 'all' by default)");
    app.add_option("--fixed-length", s.fixed_length, "Frames per resampled gait cycle")->capture_default_str();
    app.add_option("--jobs", s.jobs, "Worker threads")->capture_default_str();
    app.add_option("--seed", s.seed, "Base seed for synthetic data")->capture_default_str();
    app.add_flag("--jaccard-complement,!--jaccard-as-printed", s.jaccard_complement,
                 "Rank with 1 - Jaccard (default) or the printed Jaccard similarity");

    auto* ingest = app.add_subcommand("ingest", "ASF/AMC or trajectory CSV files to a gait-cycle archive");
    ingest->add_option("inputs", s.inputs, "Files or directories; each AMC pairs with the preceding ASF")->required();
    ingest->add_flag("--prototype,!--no-prototype", s.prototype, "Use the mean skeleton of all ASF inputs");
    ingest->add_flag("--normalize,!--no-normalize", s.normalize, "Root-centre and heading-align each sequence");
    ingest->add_option("--drop-joints", s.drop_joints, "Joints to exclude from every cycle")->delimiter(',');

    auto* extract = app.add_subcommand("extract", "Gait-cycle archive to a graph archive");
    extract->add_option("archive", s.archive, "Cycle archive directory")->required();

    auto* dist = app.add_subcommand("dist", "Distance matrices over a graph archive");
    dist->add_option("archive", s.archive, "Graph archive directory")->required();

    auto* evaluate = app.add_subcommand("eval", "CCR, DBI and DI for all distance functions");
    evaluate->add_option("archive", s.archive, "Graph archive directory")->required();

    auto* ablate = app.add_subcommand("ablate", "Joint-pair ablation tables");
    ablate->add_option("archive", s.archive, "Graph archive directory")->required();
    ablate->add_option("--metric", s.metrics, "ccr, dbi, di")->delimiter(',')->capture_default_str();

    auto* synth = app.add_subcommand("synth", "Synthetic VAR archive with known causal structure");
    synth->add_option("--process", s.processes, "chain, reverse, star, null")->delimiter(',')->capture_default_str();
    synth->add_option("--series", s.series, "Series per sample")->capture_default_str();
    synth->add_option("--coefficient", s.coefficient, "Edge coefficient")->capture_default_str();
    synth->add_option("--noise", s.noise, "Noise standard deviation")->capture_default_str();
    synth->add_option("--frames", s.frames, "Frames per sample")->capture_default_str();
    synth->add_option("--seeds", s.seeds, "Samples per process")->capture_default_str();
    synth->add_option("--dims", s.dims, "Channels per series (1 or 3)")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*ingest) return cmd_ingest(s);
        if (*extract) return cmd_extract(s);
        if (*dist) return cmd_dist(s);
        if (*evaluate) return cmd_eval(s);
        if (*ablate) return cmd_ablate(s);
        if (*synth) return cmd_synth(s);
    } catch (const Error& e) {
        std::cerr << "ggm: error [" << gaitggm::to_string(e.code()) << "]: " << e.what() << '\n';
        return exit_code(e);
    } catch (const std::exception& e) {
        std::cerr << "ggm: error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
