#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace {

namespace fs = std::filesystem;

fs::path work_dir() {
    auto dir = fs::temp_directory_path() / "prnu_test_cli";
    return dir;
}

int run_cli(const std::string& args) {
    std::string cmd = std::string(PRNU_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

std::vector<char> slurp(const fs::path& path) {
    std::ifstream f(path, std::ios::binary);
    return std::vector<char>((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
}

} // namespace

TEST_CASE("cli end to end: simulate, fingerprint, attack, identify, triangle") {
    auto dir = work_dir();
    fs::remove_all(dir);
    fs::create_directories(dir);
    auto ds = (dir / "ds").string();
    auto manifest = ds + "/manifest.json";

    REQUIRE(run_cli("simulate --out " + ds +
                    " --width 64 --height 64 --pool 14 --flatfield 6 --negatives 8 --targets 2 "
                    "--seed 42") == 0);
    REQUIRE(fs::exists(manifest));

    auto k_path = (dir / "k_alice.prnu").string();
    REQUIRE(run_cli("fingerprint --manifest " + manifest + " --out " + k_path) == 0);
    REQUIRE(fs::exists(k_path));

    SUBCASE("attack outputs are byte-identical across reruns with one seed") {
        auto f1 = (dir / "f1.pgm").string();
        auto f2 = (dir / "f2.pgm").string();
        std::string attack_args = "attack --manifest " + manifest +
                                  " --target-index 0 --n 8 --r 3 --l 32 --a 50 --seed 7 --out ";
        REQUIRE(run_cli(attack_args + f1) == 0);
        REQUIRE(run_cli(attack_args + f2) == 0);
        CHECK(slurp(f1) == slurp(f2));
        CHECK(slurp(f1 + ".json") == slurp(f2 + ".json"));

        auto f3 = (dir / "f3.pgm").string();
        REQUIRE(run_cli("attack --manifest " + manifest +
                        " --target-index 0 --n 8 --r 3 --l 32 --a 50 --seed 8 --out " + f3) == 0);
        CHECK(slurp(f1) != slurp(f3));
    }

    SUBCASE("identify and triangle commands emit reports") {
        auto forged = (dir / "forged.pgm").string();
        REQUIRE(run_cli("attack --manifest " + manifest +
                        " --target-index 0 --n 8 --r 3 --l 32 --a 50 --seed 7 --out " + forged) == 0);

        auto scores = (dir / "scores.csv").string();
        CHECK(run_cli("identify --manifest " + manifest + " --fingerprint " + k_path +
                      " --role eve_target --pfa 0.02 --out-csv " + scores) == 0);
        CHECK(fs::exists(scores));

        auto tri_csv = (dir / "triangle.csv").string();
        auto tri_json = (dir / "triangle.json").string();
        CHECK(run_cli("triangle individual --manifest " + manifest + " --fingerprint " + k_path +
                      " --forgery " + forged + " --stolen-count 8 --fit-count 6 --pfa 0.001 "
                      "--out-csv " + tri_csv + " --out-json " + tri_json) == 0);
        CHECK(fs::exists(tri_csv));
        CHECK(fs::exists(tri_json));

        CHECK(run_cli("triangle pooled --manifest " + manifest + " --fingerprint " + k_path +
                      " --forgery " + forged +
                      " --stolen-count 8 --fit-count 6 --k 5 --reps 50 --out-json " +
                      (dir / "pooled.json").string()) == 0);
    }
}

TEST_CASE("cli maps error classes to exit codes") {
    auto dir = work_dir() / "codes";
    fs::create_directories(dir);
    // Unknown flag: config error.
    CHECK(run_cli("attack --no-such-flag") == 2);
    // Missing manifest file: data error.
    CHECK(run_cli("fingerprint --manifest " + (dir / "missing.json").string() + " --out " +
                  (dir / "k.prnu").string()) == 3);
    // No subcommand: config error.
    CHECK(run_cli("") == 2);
}
