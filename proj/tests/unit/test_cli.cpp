#include <cstdlib>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

#include "doctest.h"

#include "arsar/manifest.hpp"
#include "arsar/simdata.hpp"
#include "cli.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using namespace arsar;

namespace {

struct Run {
    int code = 0;
    std::string out;
    std::string err;
};

Run arsar_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "arsar");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> v;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);)
        if (!l.empty()) v.push_back(l);
    return v;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

std::string first_field(const std::string& row) { return row.substr(0, row.find(',')); }

}  // namespace

TEST_CASE("simulate writes the scene directory") {
    const auto d = test::scratch_dir("cli_sim");
    const auto r = arsar_cli({"--seed", "7", "--out", d.string(), "--grid", "32x32", "simulate", "--scene", "point",
                        "--count", "10", "--rate-az", "0.5"});
    REQUIRE(r.code == 0);
    for (const char* f : {"scene.arsn", "echo_full.arsn", "echo_down.arsn", "manifest", "scene.png",
                          "scheme_azimuth.txt", "scheme_range.txt", "radar.txt"})
        CHECK(fs::exists(d / f));
    CHECK(load_arsn((d / "echo_down.arsn").string()).cols() == 16);
    CHECK(KeyValueFile::load((d / "manifest").string()).get_double("rate_azimuth") == 0.5);

    const auto d75 = test::scratch_dir("cli_sim75");
    REQUIRE(arsar_cli({"--out", d75.string(), "--grid", "16x16", "simulate", "--rate-az", "0.75"}).code == 0);
    CHECK(KeyValueFile::load((d75 / "manifest").string()).get_double("rate_azimuth") == 0.75);
    CHECK(load_arsn((d75 / "echo_down.arsn").string()).cols() == 12);
}

TEST_CASE("usage errors exit 2") {
    const auto d = test::scratch_dir("cli_usage");
    const auto r = arsar_cli({"--out", d.string(), "simulate", "--rate-az", "1.5"});
    CHECK(r.code == 2);
    CHECK(r.out.empty());
    CHECK_FALSE(r.err.empty());
    CHECK(arsar_cli({}).code == 2);
    CHECK(arsar_cli({"frobnicate"}).code == 2);
    CHECK(arsar_cli({"--grid", "12", "simulate"}).code == 2);
    CHECK(arsar_cli({"--help"}).code == 0);
}

TEST_CASE("reconstruct methods share an input id") {
    const auto d = test::scratch_dir("cli_recon");
    REQUIRE(arsar_cli({"--seed", "3", "--out", d.string(), "--grid", "32x32", "simulate", "--count", "6"}).code == 0);
    const auto csa = arsar_cli({"--out", d.string(), "reconstruct", "--in", d.string(), "--method", "csa"});
    REQUIRE(csa.code == 0);
    const auto l1 = arsar_cli({"--out", d.string(), "reconstruct", "--in", d.string(), "--method", "l1", "--lambda", "0.05",
                         "--iters", "200", "--dump-residuals"});
    REQUIRE(l1.code == 0);
    CHECK(fs::exists(d / "recon_csa.arsn"));
    CHECK(fs::exists(d / "recon_l1.png"));
    CHECK(fs::exists(d / "recon_l1_residuals.csv"));

    const auto rows = lines(slurp(d / "metrics.csv"));
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] == "input_id,name,nrmse,psnr_db,ssim");
    CHECK(first_field(rows[1]) == first_field(rows[2]));
    CHECK(first_field(rows[1]) == KeyValueFile::load((d / "manifest").string()).get_string("input_id"));
    CHECK(lines(csa.out).size() == 1);

    const auto tv = arsar_cli({"--out", d.string(), "reconstruct", "--in", d.string(), "--method", "tv", "--iters", "20"});
    CHECK(tv.code == 0);
    CHECK(arsar_cli({"reconstruct", "--in", d.string(), "--method", "bogus"}).code == 2);
    CHECK(arsar_cli({"reconstruct", "--in", d.string(), "--time", "3"}).code == 2);
}

TEST_CASE("net methods need a checkpoint") {
    const auto d = test::scratch_dir("cli_ckpt");
    REQUIRE(arsar_cli({"--out", d.string(), "--grid", "16x16", "simulate"}).code == 0);
    CHECK(arsar_cli({"--out", d.string(), "reconstruct", "--in", d.string(), "--method", "net-pro"}).code == 3);
    CHECK(arsar_cli({"--out", d.string(), "reconstruct", "--in", d.string(), "--method", "net-pro", "--checkpoint",
               (d / "none.arsw").string()})
              .code == 3);
}

TEST_CASE("train, reconstruct and shape mismatches") {
    const auto data = test::scratch_dir("cli_train_data");
    REQUIRE(arsar_cli({"--out", data.string(), "--seed", "2", "simulate", "--dataset", "--n-point", "4", "--n-sparse", "2",
                 "--n-dense", "2"})
                .code == 0);
    const auto model = test::scratch_dir("cli_train_model");
    const auto t = arsar_cli({"--out", model.string(), "--seed", "4", "train", "--dataset",
                        (data / "dataset.manifest").string(), "--variant", "pro", "--layers", "2", "--steps", "4"});
    REQUIRE(t.code == 0);
    CHECK(lines(t.out)[0] == "steps,4");
    CHECK(lines(slurp(model / "loss.csv")).size() == 5);
    const auto ckpt = (model / "checkpoint.arsw").string();

    // same grid: the checkpoint applies
    const auto scene16 = test::scratch_dir("cli_scene16");
    REQUIRE(arsar_cli({"--out", scene16.string(), "--grid", "16x16", "simulate"}).code == 0);
    CHECK(arsar_cli({"--out", scene16.string(), "reconstruct", "--in", scene16.string(), "--method", "net-pro",
               "--checkpoint", ckpt})
              .code == 0);
    // wrong variant or wrong grid
    CHECK(arsar_cli({"--out", scene16.string(), "reconstruct", "--in", scene16.string(), "--method", "net-swift",
               "--checkpoint", ckpt})
              .code == 4);
    const auto scene32 = test::scratch_dir("cli_scene32");
    REQUIRE(arsar_cli({"--out", scene32.string(), "--grid", "32x32", "simulate"}).code == 0);
    CHECK(arsar_cli({"--out", scene32.string(), "reconstruct", "--in", scene32.string(), "--method", "net-pro",
               "--checkpoint", ckpt})
              .code == 4);

    // full-size protocol flags are accepted
    const auto full = test::scratch_dir("cli_full");
    CHECK(arsar_cli({"--out", full.string(), "train", "--dataset", (data / "dataset.manifest").string(), "--variant", "pro",
               "--layers", "9", "--batch", "4", "--lr", "2e-5", "--steps", "1"})
              .code == 0);
    CHECK(arsar_cli({"train", "--dataset", (data / "missing.manifest").string()}).code != 0);
}

TEST_CASE("eval rows") {
    const auto d = test::scratch_dir("cli_eval");
    REQUIRE(arsar_cli({"--out", d.string(), "--grid", "16x16", "simulate"}).code == 0);
    REQUIRE(arsar_cli({"--out", d.string(), "reconstruct", "--in", d.string(), "--method", "csa", "--time", "5"}).code == 0);
    REQUIRE(arsar_cli({"--out", d.string(), "reconstruct", "--in", d.string(), "--method", "l1", "--iters", "10"}).code == 0);
    const auto truth = (d / "scene.arsn").string();
    const auto r = arsar_cli({"eval", "--pair", "same=" + truth + "," + truth, "--pair",
                        "csa=" + (d / "recon_csa.arsn").string() + "," + truth, "--pair",
                        "l1=" + (d / "recon_l1.arsn").string() + "," + truth});
    REQUIRE(r.code == 0);
    const auto rows = lines(r.out);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0] == "name,nrmse,psnr_db,ssim,items_per_s");
    CHECK(rows[1] == "same,0,perfect,1,");
    CHECK(rows[2].substr(0, 4) == "csa,");
    CHECK(rows[2].back() != ',');  // timing log exists

    const auto other = test::scratch_dir("cli_eval32");
    REQUIRE(arsar_cli({"--out", other.string(), "--grid", "32x32", "simulate"}).code == 0);
    CHECK(arsar_cli({"eval", "--pair", "x=" + (other / "scene.arsn").string() + "," + truth}).code == 4);
    CHECK(arsar_cli({"eval", "--pair", "x=" + (d / "nope.arsn").string() + "," + truth}).code == 4);
}

TEST_CASE("gradcheck exit codes") {
    const auto r = arsar_cli({"gradcheck", "--variant", "swift", "--layers", "2", "--channels", "2", "--levels", "1",
                        "--grid", "8x8"});
    CHECK(r.code == 0);
    CHECK(lines(r.out)[0] == "parameter,entries,max_rel_error,kink_retries,kink_skipped");
    CHECK(arsar_cli({"gradcheck", "--inject-sign-flip"}).code == 2);

    const std::string fault = std::string(ARSAR_FAULT_EXE) +
                              " --grid 8x8 gradcheck --variant pro --layers 2 --channels 2 --pairs 1 "
                              "--inject-sign-flip > /dev/null 2>&1";
    const int status = std::system(fault.c_str());
    REQUIRE(WIFEXITED(status));
    CHECK(WEXITSTATUS(status) == 6);
}

TEST_CASE("simulate and train are deterministic") {
    const auto a = test::scratch_dir("cli_det_a");
    const auto b = test::scratch_dir("cli_det_b");
    for (const auto& d : {a, b}) {
        REQUIRE(arsar_cli({"--out", d.string(), "--seed", "11", "simulate", "--dataset", "--n-point", "2", "--n-sparse", "1",
                     "--n-dense", "1"})
                    .code == 0);
        REQUIRE(arsar_cli({"--out", d.string(), "--seed", "11", "train", "--dataset", (d / "dataset.manifest").string(),
                     "--layers", "1", "--steps", "2"})
                    .code == 0);
    }
    CHECK(slurp(a / "checkpoint.arsw") == slurp(b / "checkpoint.arsw"));
    CHECK(slurp(a / "loss.csv") == slurp(b / "loss.csv"));
}
