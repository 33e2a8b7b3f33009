#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "phaselab/cli.hpp"
#include "phaselab/dataset.hpp"
#include "phaselab/model.hpp"
#include "phaselab/split.hpp"

using namespace phaselab;
namespace fs = std::filesystem;

namespace {

int run(const std::vector<std::string>& args) { return cli::dispatch(args); }

fs::path temp_root() {
    static const fs::path root = [] {
        const fs::path dir = fs::temp_directory_path() / "phaselab_cli_test";
        fs::remove_all(dir);
        fs::create_directories(dir);
        return dir;
    }();
    return root;
}

std::string slurp(const fs::path& path) {
    std::ifstream is(path, std::ios::binary);
    REQUIRE(is);
    std::ostringstream buf;
    buf << is.rdbuf();
    return buf.str();
}

void write_lines(const fs::path& path, const std::vector<std::string>& lines) {
    std::ofstream os(path, std::ios::trunc);
    for (const std::string& line : lines) os << line << '\n';
}

// One small dataset + split shared by the heavier cases.
struct Fixture {
    fs::path dataset;
    fs::path split_file;
    SplitPlan split;
};

const Fixture& fixture() {
    static const Fixture fx = [] {
        Fixture f;
        f.dataset = temp_root() / "data";
        f.split_file = temp_root() / "split.json";
        REQUIRE(run({"gen-data", "--out", f.dataset.string(), "--n", "26", "--len-min", "30",
                     "--len-max", "60", "--feature-dim", "10", "--seed", "5"}) == 0);
        REQUIRE(run({"split", "--dataset", f.dataset.string(), "--out", f.split_file.string(),
                     "--test", "6", "--val", "4", "--sizes", "3", "--repeats", "2", "--seed",
                     "9"}) == 0);
        f.split = load_split(f.split_file);
        return f;
    }();
    return fx;
}

}  // namespace

TEST_CASE("help, usage errors and exit codes") {
    CHECK(run({"--help"}) == 0);
    CHECK(run({"train", "--help"}) == 0);
    CHECK(run({"gen-data"}) == 2);                        // missing required --out
    CHECK(run({"gen-data", "--bogus", "x"}) == 2);        // unknown flag
    CHECK(run({"no-such-command"}) == 2);
    CHECK(run({"train", "--dataset", "missing", "--variant", "m9", "--train-ids-file", "x",
               "--out", "y"}) == 1);                      // runtime: bad variant
}

TEST_CASE("gen-data is deterministic for a fixed seed") {
    const fs::path a = temp_root() / "gen_a";
    const fs::path b = temp_root() / "gen_b";
    for (const fs::path& dir : {a, b}) {
        REQUIRE(run({"gen-data", "--out", dir.string(), "--n", "8", "--len-min", "20",
                     "--len-max", "40", "--feature-dim", "6", "--seed", "77"}) == 0);
    }
    CHECK(slurp(a / "manifest.tsv") == slurp(b / "manifest.tsv"));
    const auto records = read_dataset(a);
    for (const auto& rec : records) {
        CHECK(slurp(a / "data" / (rec.id + ".f64")) == slurp(b / "data" / (rec.id + ".f64")));
        CHECK(slurp(a / "data" / (rec.id + ".labels")) ==
              slurp(b / "data" / (rec.id + ".labels")));
    }
    CHECK(records.size() == 8);
}

TEST_CASE("split freezes roles and mini sets") {
    const Fixture& f = fixture();
    CHECK(f.split.test_ids.size() == 6);
    CHECK(f.split.val_ids.size() == 4);
    CHECK(f.split.pool_ids.size() == 16);
    REQUIRE(f.split.mini_sets.contains(3));
    CHECK(f.split.mini_sets.at(3).size() == 2);
    for (const auto& e : f.split.mini_sets.at(3)) CHECK(e.size() == 3);
}

TEST_CASE("train writes a loadable checkpoint and respects flag overrides") {
    const Fixture& f = fixture();
    const fs::path ids = temp_root() / "train_ids.txt";
    write_lines(ids, f.split.mini_sets.at(3)[0]);
    const fs::path val_ids = temp_root() / "val_ids.txt";
    write_lines(val_ids, f.split.val_ids);
    const fs::path ckpt = temp_root() / "m3.ckpt";

    REQUIRE(run({"train", "--dataset", f.dataset.string(), "--variant", "m3",
                 "--train-ids-file", ids.string(), "--val-ids-file", val_ids.string(), "--out",
                 ckpt.string(), "--epochs", "2", "--hidden", "8", "--seed", "3"}) == 0);
    const ModelBundle m = load_checkpoint(ckpt);
    CHECK(m.variant == Variant::m3);
    CHECK(m.hidden_dim == 8);
    CHECK(m.history.size() == 2);
}

TEST_CASE("config file values sit between defaults and flags") {
    const Fixture& f = fixture();
    const fs::path ids = temp_root() / "cfg_ids.txt";
    write_lines(ids, f.split.mini_sets.at(3)[0]);
    const fs::path cfg = temp_root() / "train.cfg";
    write_lines(cfg, {"# test override", "epochs = 3", "hidden = 6", "dropout = 0.0"});
    const fs::path ckpt = temp_root() / "cfg.ckpt";

    // --hidden beats the config file; epochs comes from the file.
    REQUIRE(run({"train", "--dataset", f.dataset.string(), "--variant", "m3",
                 "--train-ids-file", ids.string(), "--out", ckpt.string(), "--config",
                 cfg.string(), "--hidden", "4", "--seed", "3"}) == 0);
    const ModelBundle m = load_checkpoint(ckpt);
    CHECK(m.hidden_dim == 4);
    CHECK(m.history.size() == 3);

    const fs::path bad = temp_root() / "bad.cfg";
    write_lines(bad, {"nonsense_key = 1"});
    CHECK(run({"train", "--dataset", f.dataset.string(), "--variant", "m3", "--train-ids-file",
               ids.string(), "--out", ckpt.string(), "--config", bad.string()}) == 1);
}

TEST_CASE("train fails cleanly when records lack labels") {
    const Fixture& f = fixture();
    // Annotate-less records: strip labels by writing a dataset copy.
    auto records = read_dataset(f.dataset);
    records[0].labels.clear();
    records[0].label_source = LabelSource::none;
    const fs::path stripped = temp_root() / "stripped";
    write_dataset(records, stripped);
    const fs::path ids = temp_root() / "stripped_ids.txt";
    write_lines(ids, {records[0].id});
    CHECK(run({"train", "--dataset", stripped.string(), "--variant", "m5", "--train-ids-file",
               ids.string(), "--out", (temp_root() / "x.ckpt").string()}) == 1);
}

TEST_CASE("annotate writes a synthetic dataset and evaluate scores it") {
    const Fixture& f = fixture();
    const fs::path ids = temp_root() / "ann_ids.txt";
    write_lines(ids, f.split.mini_sets.at(3)[0]);
    const fs::path teacher_ckpt = temp_root() / "teacher_small.ckpt";
    REQUIRE(run({"train", "--dataset", f.dataset.string(), "--variant", "m5",
                 "--train-ids-file", ids.string(), "--out", teacher_ckpt.string(), "--epochs",
                 "2", "--hidden", "6", "--seed", "4"}) == 0);

    const fs::path rest_ids = temp_root() / "rest_ids.txt";
    std::vector<std::string> rest;
    for (const std::string& id : f.split.pool_ids) {
        if (id != f.split.mini_sets.at(3)[0][0]) rest.push_back(id);
    }
    write_lines(rest_ids, rest);
    const fs::path ann_out = temp_root() / "annotated";
    REQUIRE(run({"annotate", "--teacher", teacher_ckpt.string(), "--dataset",
                 f.dataset.string(), "--ids-file", rest_ids.string(), "--out",
                 ann_out.string()}) == 0);
    const auto annotated = read_dataset(ann_out);
    CHECK(annotated.size() == rest.size());
    for (const auto& rec : annotated) {
        CHECK(rec.label_source == LabelSource::synthetic);
        CHECK(rec.labels.size() == rec.features.size());
    }

    const fs::path eval_ids = temp_root() / "eval_ids.txt";
    write_lines(eval_ids, f.split.test_ids);
    const fs::path eval_out = temp_root() / "eval";
    REQUIRE(run({"evaluate", "--model", teacher_ckpt.string(), "--dataset", f.dataset.string(),
                 "--ids-file", eval_ids.string(), "--out", eval_out.string(), "--timelines",
                 "2"}) == 0);
    const std::string metrics = slurp(eval_out / "metrics.tsv");
    CHECK(metrics.find("metric\tclass\tvalue") == 0);
    CHECK(metrics.find("accuracy") != std::string::npos);
    CHECK(fs::exists(eval_out / ("timeline_" + f.split.test_ids[0] + ".svg")));
    CHECK(fs::exists(eval_out / ("timeline_" + f.split.test_ids[1] + ".svg")));
}

TEST_CASE("grid produces the result tree, summary and curves; reruns are byte-identical") {
    const Fixture& f = fixture();
    const fs::path out1 = temp_root() / "grid1";
    const fs::path out2 = temp_root() / "grid2";
    const std::string manifest_before = slurp(f.dataset / "manifest.tsv");
    const std::vector<std::string> base = {
        "grid",      "--dataset",         f.dataset.string(), "--sizes", "3,5",
        "--repeats", "2",                 "--test",           "6",       "--val",
        "4",         "--epochs-framewise", "2",               "--epochs-temporal",
        "2",         "--seed",            "11",               "--workers", "1"};

    auto args1 = base;
    args1.push_back("--out");
    args1.push_back(out1.string());
    REQUIRE(run(args1) == 0);

    // Second run with two workers must reproduce the same bytes.
    auto args2 = base;
    args2[args2.size() - 1] = "2";
    args2.push_back("--out");
    args2.push_back(out2.string());
    REQUIRE(run(args2) == 0);

    for (const std::string cell : {"i3_j0", "i3_j1", "i5_j0", "i5_j1"}) {
        for (const std::string file :
             {"teacher.ckpt", "student.ckpt", "selflearn.ckpt", "m1.ckpt", "m2.ckpt", "m3.ckpt",
              "m4.ckpt", "metrics.tsv"}) {
            CHECK(fs::exists(out1 / cell / file));
            CHECK(slurp(out1 / cell / file) == slurp(out2 / cell / file));
        }
        CHECK(fs::exists(out1 / cell / "synthetic_labels"));
    }
    CHECK(fs::exists(out1 / "fullsup" / "m5.ckpt"));
    CHECK(slurp(out1 / "split.json") == slurp(out2 / "split.json"));
    CHECK(slurp(out1 / "summary.tsv") == slurp(out2 / "summary.tsv"));

    // Row bookkeeping: header + 2 sizes x 7 variants x 4 metrics, plus
    // 5 fullsup variants x 4 metrics at the pool size.
    std::istringstream summary(slurp(out1 / "summary.tsv"));
    std::string line;
    int rows = 0, size3 = 0, size5 = 0, size16 = 0;
    std::getline(summary, line);
    CHECK(line == "size\tvariant\tmetric\tmean\tstd");
    while (std::getline(summary, line)) {
        if (line.empty()) continue;
        ++rows;
        if (line.rfind("3\t", 0) == 0) ++size3;
        if (line.rfind("5\t", 0) == 0) ++size5;
        if (line.rfind("16\t", 0) == 0) ++size16;
    }
    CHECK(rows == 2 * 7 * 4 + 5 * 4);
    CHECK(size3 == 7 * 4);
    CHECK(size5 == 7 * 4);
    CHECK(size16 == 5 * 4);

    const fs::path report_out = temp_root() / "report";
    REQUIRE(run({"report", "--summary", (out1 / "summary.tsv").string(), "--out",
                 report_out.string()}) == 0);
    CHECK(fs::exists(report_out / "curves.svg"));

    // The input dataset directory stays untouched by the grid run.
    CHECK(manifest_before == slurp(f.dataset / "manifest.tsv"));
}

TEST_CASE("distill runs the teacher-annotate-student pipeline") {
    const Fixture& f = fixture();
    const fs::path out = temp_root() / "distill";
    REQUIRE(run({"distill", "--dataset", f.dataset.string(), "--split", f.split_file.string(),
                 "--size", "3", "--repeat", "1", "--out", out.string(), "--epochs", "2",
                 "--seed", "23"}) == 0);
    CHECK(fs::exists(out / "teacher.ckpt"));
    CHECK(fs::exists(out / "student.ckpt"));
    CHECK(fs::exists(out / "metrics.tsv"));
    const ModelBundle student = load_checkpoint(out / "student.ckpt");
    CHECK(student.variant == Variant::student);

    // One synthetic label file per non-E pool record.
    std::size_t n_labels = 0;
    for (const auto& entry : fs::directory_iterator(out / "synthetic_labels")) {
        (void)entry;
        ++n_labels;
    }
    CHECK(n_labels == f.split.pool_ids.size() - 3);
}
