#include "phaselab/cli.hpp"

#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "CLI11.hpp"

#include "phaselab/dataset.hpp"
#include "phaselab/distill.hpp"
#include "phaselab/grid.hpp"
#include "phaselab/metrics.hpp"
#include "phaselab/model.hpp"
#include "phaselab/split.hpp"
#include "phaselab/svg_report.hpp"
#include "phaselab/train.hpp"

namespace fs = std::filesystem;

namespace phaselab::cli {

namespace {

std::vector<std::string> read_ids_file(const fs::path& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open ids file " + path.string());
    std::vector<std::string> ids;
    std::string line;
    while (std::getline(is, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (!line.empty()) ids.push_back(line);
    }
    if (ids.empty()) throw std::runtime_error("ids file " + path.string() + " is empty");
    return ids;
}

std::vector<const SequenceRecord*> select_records(const std::vector<SequenceRecord>& all,
                                                  const std::vector<std::string>& ids) {
    std::map<std::string, const SequenceRecord*> index;
    for (const SequenceRecord& rec : all) index[rec.id] = &rec;
    std::vector<const SequenceRecord*> out;
    out.reserve(ids.size());
    for (const std::string& id : ids) {
        const auto it = index.find(id);
        if (it == index.end()) throw std::runtime_error("unknown record id: " + id);
        out.push_back(it->second);
    }
    return out;
}

// Optional key = value overrides, one per line, '#' comments. Values here
// sit between the built-in defaults and explicit flags.
std::map<std::string, std::string> parse_config_file(const fs::path& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open config file " + path.string());
    std::map<std::string, std::string> kv;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto strip = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        if (strip(line).empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error("config file " + path.string() + " line " +
                                     std::to_string(line_no) + ": expected key = value");
        }
        const std::string key = strip(line.substr(0, eq));
        const std::string value = strip(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw std::runtime_error("config file " + path.string() + " line " +
                                     std::to_string(line_no) + ": empty key or value");
        }
        kv[key] = value;
    }
    return kv;
}

double config_double(const std::map<std::string, std::string>& kv, const std::string& key,
                     double fallback) {
    const auto it = kv.find(key);
    return it == kv.end() ? fallback : std::stod(it->second);
}

int config_int(const std::map<std::string, std::string>& kv, const std::string& key,
               int fallback) {
    const auto it = kv.find(key);
    return it == kv.end() ? fallback : std::stoi(it->second);
}

void apply_config_file(TrainConfig& cfg, const std::map<std::string, std::string>& kv) {
    static const std::set<std::string> known = {
        "lr",      "lr_stage_b", "epochs",  "epochs_stage_b", "dropout",
        "wd",      "minibatch",  "hidden",  "val_interval",   "epochs_framewise",
        "epochs_temporal", "workers"};
    for (const auto& [key, value] : kv) {
        if (!known.contains(key)) throw std::runtime_error("unknown config key: " + key);
    }
    cfg.learning_rate = config_double(kv, "lr", cfg.learning_rate);
    cfg.learning_rate_stage_b = config_double(kv, "lr_stage_b", cfg.learning_rate_stage_b);
    cfg.epochs = config_int(kv, "epochs", cfg.epochs);
    cfg.epochs_stage_b = config_int(kv, "epochs_stage_b", cfg.epochs_stage_b);
    cfg.dropout = config_double(kv, "dropout", cfg.dropout);
    cfg.weight_decay = config_double(kv, "wd", cfg.weight_decay);
    cfg.minibatch = config_int(kv, "minibatch", cfg.minibatch);
    cfg.hidden_dim = config_int(kv, "hidden", cfg.hidden_dim);
    cfg.val_interval = config_int(kv, "val_interval", cfg.val_interval);
}

std::string value_str(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

// The evaluate subcommand's metrics.tsv: metric, class, value.
void write_eval_metrics(const MetricReport& rep, const fs::path& path) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    os << "metric\tclass\tvalue\n";
    os << "accuracy\t-\t" << value_str(rep.accuracy) << '\n';
    os << "macro_precision\t-\t" << value_str(rep.macro_precision) << '\n';
    os << "macro_recall\t-\t" << value_str(rep.macro_recall) << '\n';
    os << "macro_f1\t-\t" << value_str(rep.macro_f1) << '\n';
    for (std::size_t c = 0; c < rep.precision.size(); ++c) {
        if (!rep.class_present[c]) continue;
        os << "precision\t" << c << '\t' << value_str(rep.precision[c]) << '\n';
        os << "recall\t" << c << '\t' << value_str(rep.recall[c]) << '\n';
        os << "f1\t" << c << '\t' << value_str(rep.f1[c]) << '\n';
    }
}

std::vector<PoolEntry> dataset_entries(const std::vector<SequenceRecord>& records) {
    std::vector<PoolEntry> entries;
    entries.reserve(records.size());
    for (const SequenceRecord& rec : records) entries.push_back({rec.id, rec.length()});
    return entries;
}

int max_label(const std::vector<SequenceRecord>& records) {
    int top = 0;
    for (const SequenceRecord& rec : records) {
        for (int y : rec.labels) top = std::max(top, y);
    }
    return top;
}

}  // namespace

int dispatch(int argc, const char* const* argv) {
    CLI::App app{"Teacher/student workflow-phase sequence labeling toolkit"};
    app.require_subcommand(1);

    // ---- gen-data ----
    GeneratorConfig gen;
    std::string gen_out;
    auto* gen_cmd = app.add_subcommand("gen-data", "Generate a synthetic labeled dataset");
    gen_cmd->add_option("--out", gen_out, "Output dataset directory")->required();
    gen_cmd->add_option("--n", gen.n_sequences, "Number of sequences")->capture_default_str();
    gen_cmd->add_option("--len-min", gen.len_min, "Shortest target length")->capture_default_str();
    gen_cmd->add_option("--len-max", gen.len_max, "Longest target length")->capture_default_str();
    gen_cmd->add_option("--feature-dim", gen.feature_dim, "Feature vector size")->capture_default_str();
    gen_cmd->add_option("--noise", gen.noise, "Frame noise scale (0 for noiseless)")->capture_default_str();
    gen_cmd->add_option("--offset", gen.offset, "Per-sequence offset scale")->capture_default_str();
    gen_cmd->add_option("--smoothing", gen.smoothing, "Temporal smoothing in [0,1)")->capture_default_str();
    gen_cmd->add_option("--swap", gen.swap_prob, "Probability of swapping phases 5 and 6")->capture_default_str();
    gen_cmd->add_option("--proto-scale", gen.prototype_scale, "Prototype scale")->capture_default_str();
    gen_cmd->add_option("--seed", gen.seed, "Generator seed")->capture_default_str();
    gen_cmd->callback([&] {
        write_dataset(generate_benchmark(gen), gen_out);
    });

    // ---- split ----
    std::string split_dataset, split_out;
    int split_test = 30, split_val = 10, split_repeats = 3;
    std::vector<int> split_sizes = {1, 3, 5, 10, 20};
    std::uint64_t split_seed = 1;
    auto* split_cmd = app.add_subcommand("split", "Freeze test/val/pool roles and mini-training sets");
    split_cmd->add_option("--dataset", split_dataset, "Dataset directory")->required();
    split_cmd->add_option("--out", split_out, "Output split file (json)")->required();
    split_cmd->add_option("--test", split_test, "Test sequences")->capture_default_str();
    split_cmd->add_option("--val", split_val, "Validation sequences")->capture_default_str();
    split_cmd->add_option("--sizes", split_sizes, "Mini-training-set sizes")
        ->delimiter(',')->capture_default_str();
    split_cmd->add_option("--repeats", split_repeats, "Repeats per size")->capture_default_str();
    split_cmd->add_option("--seed", split_seed, "Split seed")->capture_default_str();
    split_cmd->callback([&] {
        const auto records = read_dataset(split_dataset);
        save_split(make_split(dataset_entries(records), split_test, split_val, split_sizes,
                              split_repeats, split_seed),
                   split_out);
    });

    // ---- train ----
    std::string train_dataset, train_variant, train_ids, train_val_ids, train_out, train_config,
        train_m1;
    TrainConfig train_cfg;
    auto* train_cmd = app.add_subcommand("train", "Train one model variant");
    train_cmd->add_option("--dataset", train_dataset, "Dataset directory")->required();
    train_cmd->add_option("--variant", train_variant, "One of m1,m2,m3,m4,m5,student")->required();
    train_cmd->add_option("--train-ids-file", train_ids, "File with one training id per line")
        ->required();
    train_cmd->add_option("--val-ids-file", train_val_ids, "File with one validation id per line");
    train_cmd->add_option("--out", train_out, "Output checkpoint path")->required();
    train_cmd->add_option("--config", train_config, "Optional key=value config file");
    train_cmd->add_option("--m1", train_m1, "Checkpoint of a trained m1 (m2 only)");
    auto* o_epochs = train_cmd->add_option("--epochs", train_cfg.epochs,
                                           "Training epochs (default: per-variant, 27 or 350)");
    auto* o_epochs_b = train_cmd->add_option("--epochs-stage-b", train_cfg.epochs_stage_b,
                                             "Epochs of the m5 CRF stage");
    auto* o_lr = train_cmd->add_option("--lr", train_cfg.learning_rate,
                                       "Learning rate (default: per-variant)");
    auto* o_lr_b = train_cmd->add_option("--lr-stage-b", train_cfg.learning_rate_stage_b,
                                         "Learning rate of the m5 CRF stage");
    auto* o_dropout = train_cmd->add_option("--dropout", train_cfg.dropout,
                                            "Dropout rate (default: per-variant)");
    auto* o_wd = train_cmd->add_option("--wd", train_cfg.weight_decay,
                                       "Weight decay (default: per-variant)");
    auto* o_hidden = train_cmd->add_option("--hidden", train_cfg.hidden_dim,
                                           "Hidden state size (default: per-variant, 128 or 64/dir)");
    auto* o_minibatch = train_cmd->add_option("--minibatch", train_cfg.minibatch,
                                              "Minibatch size (m1 only)");
    auto* o_val_int = train_cmd->add_option("--val-interval", train_cfg.val_interval,
                                            "Epochs between validation passes");
    auto* o_seed = train_cmd->add_option("--seed", train_cfg.seed, "Training seed");
    train_cmd->callback([&] {
        const Variant v = variant_from_string(train_variant);
        TrainConfig cfg = default_config(v);
        if (!train_config.empty()) apply_config_file(cfg, parse_config_file(train_config));
        if (o_epochs->count()) cfg.epochs = train_cfg.epochs;
        if (o_epochs_b->count()) cfg.epochs_stage_b = train_cfg.epochs_stage_b;
        if (o_lr->count()) cfg.learning_rate = train_cfg.learning_rate;
        if (o_lr_b->count()) cfg.learning_rate_stage_b = train_cfg.learning_rate_stage_b;
        if (o_dropout->count()) cfg.dropout = train_cfg.dropout;
        if (o_wd->count()) cfg.weight_decay = train_cfg.weight_decay;
        if (o_hidden->count()) cfg.hidden_dim = train_cfg.hidden_dim;
        if (o_minibatch->count()) cfg.minibatch = train_cfg.minibatch;
        if (o_val_int->count()) cfg.val_interval = train_cfg.val_interval;
        if (o_seed->count()) cfg.seed = train_cfg.seed;

        const auto records = read_dataset(train_dataset);
        const auto train_set = select_records(records, read_ids_file(train_ids));
        std::vector<const SequenceRecord*> val_set;
        if (!train_val_ids.empty()) val_set = select_records(records, read_ids_file(train_val_ids));

        const int n_classes = std::max(2, max_label(records) + 1);
        ModelBundle trained;
        if (v == Variant::m1) {
            trained = train_framewise(train_set, val_set, cfg, n_classes);
        } else if (v == Variant::m2 && !train_m1.empty()) {
            const ModelBundle base = load_checkpoint(train_m1);
            trained = train_temporal(v, train_set, val_set, cfg, n_classes, &base);
        } else {
            trained = train_temporal(v, train_set, val_set, cfg, n_classes);
        }
        if (const fs::path parent = fs::path(train_out).parent_path(); !parent.empty()) {
            fs::create_directories(parent);
        }
        save_checkpoint(trained, train_out);
    });

    // ---- annotate ----
    std::string ann_teacher, ann_dataset, ann_ids, ann_out;
    auto* ann_cmd = app.add_subcommand("annotate", "Label records with a teacher's decoded tags");
    ann_cmd->add_option("--teacher", ann_teacher, "Teacher checkpoint")->required();
    ann_cmd->add_option("--dataset", ann_dataset, "Dataset directory")->required();
    ann_cmd->add_option("--ids-file", ann_ids, "Records to annotate (one id per line)")->required();
    ann_cmd->add_option("--out", ann_out, "Output dataset directory")->required();
    ann_cmd->callback([&] {
        const ModelBundle teacher = load_checkpoint(ann_teacher);
        const auto records = read_dataset(ann_dataset);
        const auto subset = select_records(records, read_ids_file(ann_ids));
        write_dataset(annotate(teacher, subset), ann_out);
    });

    // ---- distill ----
    std::string dis_dataset, dis_split, dis_out, dis_config;
    int dis_size = 20, dis_repeat = 0, dis_epochs = -1, dis_val_int = 1;
    std::uint64_t dis_seed = 1;
    auto* dis_cmd = app.add_subcommand(
        "distill", "Teacher on E, synthetic labels for the rest, student on the union");
    dis_cmd->add_option("--dataset", dis_dataset, "Dataset directory")->required();
    dis_cmd->add_option("--split", dis_split, "Split file from the split subcommand")->required();
    dis_cmd->add_option("--size", dis_size, "Mini-training-set size i")->capture_default_str();
    dis_cmd->add_option("--repeat", dis_repeat, "Repeat index j")->capture_default_str();
    dis_cmd->add_option("--out", dis_out, "Output directory")->required();
    dis_cmd->add_option("--config", dis_config, "Optional key=value config file");
    dis_cmd->add_option("--epochs", dis_epochs, "Temporal epochs override");
    dis_cmd->add_option("--val-interval", dis_val_int, "Epochs between validation passes")
        ->capture_default_str();
    dis_cmd->add_option("--seed", dis_seed, "Seed")->capture_default_str();
    dis_cmd->callback([&] {
        const auto records = read_dataset(dis_dataset);
        const SplitPlan split = load_split(dis_split);
        const auto sets_it = split.mini_sets.find(dis_size);
        if (sets_it == split.mini_sets.end() ||
            static_cast<std::size_t>(dis_repeat) >= sets_it->second.size()) {
            throw std::runtime_error("split has no mini set for size " + std::to_string(dis_size) +
                                     " repeat " + std::to_string(dis_repeat));
        }
        const auto e_set = select_records(records, sets_it->second[dis_repeat]);
        const auto val_set = select_records(records, split.val_ids);
        const auto test_set = select_records(records, split.test_ids);
        std::set<std::string> e_ids(sets_it->second[dis_repeat].begin(),
                                    sets_it->second[dis_repeat].end());
        std::vector<std::string> rest_ids;
        for (const std::string& id : split.pool_ids) {
            if (!e_ids.contains(id)) rest_ids.push_back(id);
        }
        const auto rest_set = select_records(records, rest_ids);
        const int n_classes = std::max(2, max_label(records) + 1);

        const fs::path out_dir(dis_out);
        fs::create_directories(out_dir);

        const auto make_cfg = [&](Variant v, std::uint64_t tag) {
            TrainConfig cfg = default_config(v);
            if (!dis_config.empty()) apply_config_file(cfg, parse_config_file(dis_config));
            if (dis_epochs > 0) cfg.epochs = dis_epochs;
            cfg.val_interval = dis_val_int;
            cfg.seed = derive_seed(dis_seed, static_cast<std::uint64_t>(dis_size),
                                   static_cast<std::uint64_t>(dis_repeat), tag);
            return cfg;
        };

        const ModelBundle teacher =
            train_temporal(Variant::m5, e_set, val_set, make_cfg(Variant::m5, 5), n_classes);
        save_checkpoint(teacher, out_dir / "teacher.ckpt");

        const auto synthetic = annotate(teacher, rest_set);
        fs::create_directories(out_dir / "synthetic_labels");
        for (const SequenceRecord& rec : synthetic) {
            std::ofstream os(out_dir / "synthetic_labels" / (rec.id + ".labels"), std::ios::trunc);
            for (std::size_t t = 0; t < rec.labels.size(); ++t) {
                if (t > 0) os << ' ';
                os << rec.labels[t];
            }
            os << '\n';
        }
        const auto g_set = assemble_training_union(e_set, synthetic, split.pool_ids);
        std::vector<const SequenceRecord*> g_ptrs;
        for (const SequenceRecord& r : g_set) g_ptrs.push_back(&r);

        const ModelBundle student = train_temporal(Variant::student, g_ptrs, val_set,
                                                   make_cfg(Variant::student, 6), n_classes);
        save_checkpoint(student, out_dir / "student.ckpt");

        const auto eval = [&](const ModelBundle& m) {
            const auto preds = predict_all(m, test_set);
            std::vector<TagSequence> truths(test_set.size());
            for (std::size_t k = 0; k < test_set.size(); ++k) truths[k] = test_set[k]->labels;
            return metric_report(confusion(preds, truths, static_cast<std::size_t>(n_classes)));
        };
        std::ofstream os(out_dir / "metrics.tsv", std::ios::trunc);
        os << "variant\tmetric\tclass\tvalue\n";
        for (const auto& [name, rep] :
             std::map<std::string, MetricReport>{{"teacher", eval(teacher)},
                                                 {"student", eval(student)}}) {
            os << name << "\taccuracy\t-\t" << value_str(rep.accuracy) << '\n';
            os << name << "\tmacro_f1\t-\t" << value_str(rep.macro_f1) << '\n';
        }
    });

    // ---- grid ----
    ExperimentPlan plan;
    std::string grid_dataset, grid_out, grid_split, grid_config;
    int grid_test = 30, grid_val = 10;
    bool grid_no_fullsup = false;
    auto* grid_cmd = app.add_subcommand("grid", "Run the full experiment grid");
    grid_cmd->add_option("--dataset", grid_dataset, "Dataset directory")->required();
    grid_cmd->add_option("--out", grid_out, "Output directory")->required();
    grid_cmd->add_option("--sizes", plan.sizes, "Mini-training-set sizes")
        ->delimiter(',')->capture_default_str();
    grid_cmd->add_option("--repeats", plan.repeats, "Repeats per size")->capture_default_str();
    grid_cmd->add_option("--workers", plan.workers, "Concurrent grid cells")->capture_default_str();
    grid_cmd->add_option("--seed", plan.seed, "Grid seed")->capture_default_str();
    grid_cmd->add_option("--split", grid_split, "Reuse an existing split file");
    grid_cmd->add_option("--test", grid_test, "Test sequences (when splitting here)")
        ->capture_default_str();
    grid_cmd->add_option("--val", grid_val, "Validation sequences (when splitting here)")
        ->capture_default_str();
    grid_cmd->add_option("--epochs-framewise", plan.epochs_framewise, "m1 epochs override");
    grid_cmd->add_option("--epochs-temporal", plan.epochs_temporal, "Temporal epochs override");
    grid_cmd->add_option("--val-interval", plan.val_interval, "Epochs between validation passes")
        ->capture_default_str();
    grid_cmd->add_flag("--no-fullsup", grid_no_fullsup, "Skip the full-supervision reference");
    grid_cmd->add_option("--config", grid_config, "Optional key=value config file");
    grid_cmd->callback([&] {
        const auto records = read_dataset(grid_dataset);
        plan.full_supervision = !grid_no_fullsup;
        plan.out_dir = grid_out;
        plan.n_classes = std::max(2, max_label(records) + 1);
        if (!grid_config.empty()) {
            const auto kv = parse_config_file(grid_config);
            plan.epochs_framewise = config_int(kv, "epochs_framewise", plan.epochs_framewise);
            plan.epochs_temporal = config_int(kv, "epochs_temporal", plan.epochs_temporal);
            plan.val_interval = config_int(kv, "val_interval", plan.val_interval);
            plan.workers = config_int(kv, "workers", plan.workers);
        }

        SplitPlan split;
        if (!grid_split.empty()) {
            split = load_split(grid_split);
        } else {
            split = make_split(dataset_entries(records), grid_test, grid_val, plan.sizes,
                               plan.repeats, plan.seed);
        }
        fs::create_directories(plan.out_dir);
        save_split(split, plan.out_dir / "split.json");
        run_experiment_grid(records, split, plan);
    });

    // ---- evaluate ----
    std::string eval_model, eval_dataset, eval_ids, eval_out;
    int eval_timelines = 0;
    auto* eval_cmd = app.add_subcommand("evaluate", "Evaluate a checkpoint on labeled records");
    eval_cmd->add_option("--model", eval_model, "Model checkpoint")->required();
    eval_cmd->add_option("--dataset", eval_dataset, "Dataset directory")->required();
    eval_cmd->add_option("--ids-file", eval_ids, "Records to evaluate")->required();
    eval_cmd->add_option("--out", eval_out, "Output directory")->required();
    eval_cmd->add_option("--timelines", eval_timelines, "Render timeline SVGs for the first N records")
        ->capture_default_str();
    eval_cmd->callback([&] {
        const ModelBundle m = load_checkpoint(eval_model);
        const auto records = read_dataset(eval_dataset);
        const auto subset = select_records(records, read_ids_file(eval_ids));
        for (const SequenceRecord* rec : subset) {
            if (!rec->labeled()) {
                throw std::runtime_error("record " + rec->id + " carries no labels to score against");
            }
        }
        const auto preds = predict_all(m, subset);
        std::vector<TagSequence> truths(subset.size());
        for (std::size_t k = 0; k < subset.size(); ++k) truths[k] = subset[k]->labels;

        fs::create_directories(eval_out);
        write_eval_metrics(
            metric_report(confusion(preds, truths, static_cast<std::size_t>(m.n_classes))),
            fs::path(eval_out) / "metrics.tsv");
        for (int k = 0; k < eval_timelines && k < static_cast<int>(subset.size()); ++k) {
            render_timeline(truths[k], {{to_string(m.variant), preds[k]}},
                            static_cast<std::size_t>(m.n_classes),
                            fs::path(eval_out) / ("timeline_" + subset[k]->id + ".svg"));
        }
    });

    // ---- report ----
    std::string rep_summary, rep_out;
    auto* rep_cmd = app.add_subcommand("report", "Render curve charts from a grid summary");
    rep_cmd->add_option("--summary", rep_summary, "summary.tsv from a grid run")->required();
    rep_cmd->add_option("--out", rep_out, "Output directory")->required();
    rep_cmd->callback([&] {
        std::ifstream is(rep_summary);
        if (!is) throw std::runtime_error("cannot open " + rep_summary);
        std::vector<SummaryPoint> points;
        std::string line;
        std::getline(is, line);  // header
        std::size_t line_no = 1;
        while (std::getline(is, line)) {
            ++line_no;
            if (line.empty()) continue;
            std::istringstream fields(line);
            SummaryPoint p;
            if (!(fields >> p.size >> p.variant >> p.metric >> p.mean >> p.stddev)) {
                throw std::runtime_error(rep_summary + " line " + std::to_string(line_no) +
                                         ": expected size variant metric mean std");
            }
            points.push_back(std::move(p));
        }
        fs::create_directories(rep_out);
        render_curves(points, fs::path(rep_out) / "curves.svg");
    });

    try {
        app.parse(argc, argv);
        return 0;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) {
            return app.exit(e);  // --help and friends
        }
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

int dispatch(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.push_back("phaselab");
    for (const std::string& a : args) argv.push_back(a.c_str());
    return dispatch(static_cast<int>(argv.size()), argv.data());
}

}  // namespace phaselab::cli
