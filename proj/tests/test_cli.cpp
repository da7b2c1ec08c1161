#include "doctest.h"

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int code = -1;
    std::string out;
};

RunResult run_shell(const std::string& cmd) {
    RunResult r;
    FILE* p = popen((cmd + " 2>/dev/null").c_str(), "r");
    REQUIRE(p != nullptr);
    std::array<char, 4096> buf;
    size_t got;
    while ((got = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), got);
    int st = pclose(p);
    r.code = WEXITSTATUS(st);
    return r;
}

std::string cli() { return SELFSIM_CLI_PATH; }

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    REQUIRE(f.good());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("pipe fixtures into analyze") {
    RunResult r = run_shell(cli() + " fixtures flake 3 | " + cli() + " analyze -");
    CHECK(r.code == 0);
    CHECK(r.out.find("tau = 6  rho = 2") != std::string::npos);
    CHECK(r.out.find("doubly-transitive yes") != std::string::npos);

    RunResult s34 = run_shell(cli() + " fixtures sierpinski 3 4 | " + cli() + " analyze -");
    CHECK(s34.code == 0);
    CHECK(s34.out.find("tau = 4415/113") != std::string::npos);
    CHECK(s34.out.find("rho = 883/452") != std::string::npos);
}

TEST_CASE("exit codes") {
    CHECK(run_shell(cli() + " analyze /nonexistent/missing.cell").code == 1);
    CHECK(run_shell(cli() + " fixtures bad-boundary | " + cli() + " analyze -").code == 2);
    CHECK(run_shell(cli() + " fixtures bad-transitivity | " + cli() + " analyze -").code == 2);
    // outside the Fatou basin: numerical non-convergence
    CHECK(run_shell(cli() + " fixtures flake 3 | " + cli() + " green - --at 1").code == 3);
    CHECK(run_shell(cli() + " nonsense").code == 1);
}

TEST_CASE("json mirror round trip") {
    RunResult j = run_shell(cli() + " fixtures flake 3 | " + cli() + " --json analyze -");
    CHECK(j.code == 0);
    auto parsed = nlohmann::json::parse(j.out);
    CHECK(parsed["tau"] == "6");
    CHECK(parsed["mu"] == 3);
    // feed the embedded JSON cell back in as input
    fs::path tmp = fs::temp_directory_path() / "selfsim_cell.json";
    std::ofstream(tmp) << parsed["cell"].dump();
    RunResult again = run_shell(cli() + " analyze " + tmp.string());
    CHECK(again.code == 0);
    CHECK(again.out.find("tau = 6") != std::string::npos);
    fs::remove(tmp);
}

TEST_CASE("julia verdicts through the cli") {
    RunResult r = run_shell(cli() + " fixtures flake 3 | " + cli() + " --json julia -");
    CHECK(r.code == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["kind"] == "Cantor");
    CHECK(j["witness"]["z0"] == "2");
    CHECK(j["witness"]["value"] == "2/11");

    RunResult line = run_shell(cli() + " fixtures line 4 | " + cli() + " --json julia -");
    CHECK(nlohmann::json::parse(line.out)["kind"] == "Interval");
}

TEST_CASE("coefficients as exact fractions") {
    RunResult r = run_shell(cli() + " fixtures line 2 | " + cli() + " coeffs - -N 6");
    CHECK(r.code == 0);
    CHECK(r.out.find("2,1/2") != std::string::npos);
    CHECK(r.out.find("4,3/8") != std::string::npos);
    CHECK(r.out.find("6,5/16") != std::string::npos);
}

TEST_CASE("blowup summary and exports") {
    RunResult s = run_shell(cli() + " fixtures sierpinski 2 2 | " + cli() +
                            " blowup - --levels 4 --summary");
    CHECK(s.code == 0);
    auto j = nlohmann::json::parse(s.out);
    CHECK(j["vertices"] == 123);
    CHECK(j["safe_ball_radius"] == 15);

    RunResult cellfmt = run_shell(cli() + " fixtures line 2 | " + cli() +
                                  " blowup - --levels 3 --format cell | " + cli() + " analyze -");
    CHECK(cellfmt.code == 0); // the level-3 line is the cell graph of a line of length 8
    CHECK(cellfmt.out.find("tau = 64") != std::string::npos);
}

TEST_CASE("manifest reproducibility across runs and thread counts") {
    fs::path base = fs::temp_directory_path() / "selfsim_repro";
    fs::remove_all(base);
    std::string common = " fixtures flake 3 | " + cli() +
                         " asymptotics - -N 512 --samples 16 --shift 8 --precision 128 "
                         "--fourier-k 4 --out ";
    RunResult a = run_shell(cli() + common + (base / "a").string() + " --threads 1");
    RunResult b = run_shell(cli() + common + (base / "b").string() + " --threads 2");
    RunResult c = run_shell(cli() + common + (base / "c").string() + " --threads 1");
    REQUIRE(a.code == 0);
    REQUIRE(b.code == 0);
    REQUIRE(c.code == 0);
    for (const char* name :
         {"omega_hat.csv", "sigma_hat.csv", "sigma_samples.csv", "residuals.csv", "summary.json"}) {
        std::string fa = slurp(base / "a" / name);
        CHECK(fa == slurp(base / "b" / name));
        CHECK(fa == slurp(base / "c" / name));
        CHECK(!fa.empty());
    }
    // manifests agree on the output digests
    auto ja = nlohmann::json::parse(slurp(base / "a" / "manifest.json"));
    auto jb = nlohmann::json::parse(slurp(base / "b" / "manifest.json"));
    CHECK(ja["outputs"] == jb["outputs"]);
    CHECK(ja["inputs"] == jb["inputs"]);
    fs::remove_all(base);
}

TEST_CASE("oracle subcommands") {
    RunResult hit = run_shell(cli() + " fixtures line 2 | " + cli() +
                              " oracle hit - --trials 20000 --seed 5");
    CHECK(hit.code == 0);
    CHECK(hit.out.find("t,count,pmf,se") != std::string::npos);

    RunResult hit2 = run_shell(cli() + " fixtures line 2 | " + cli() +
                               " oracle hit - --trials 20000 --seed 5 --threads 2");
    CHECK(hit2.out == hit.out); // shard-independent

    RunResult pw = run_shell(cli() + " fixtures line 2 | " + cli() +
                             " oracle power - --from 0 -N 2 --absorb boundary-except-start");
    CHECK(pw.code == 0);
    CHECK(pw.out.find("2,1/2,0,1/2") != std::string::npos);

    RunResult geo = run_shell(cli() + " fixtures line 2 | " + cli() +
                              " oracle geodesic - --x 0 --y 2");
    CHECK(geo.code == 0);
    CHECK(geo.out.find("0,2,2,1/4,1/4,yes") != std::string::npos);
}

TEST_CASE("golden analyze outputs for the fixture families") {
    const std::string line2 =
        "cell: 3 vertices, 2 edges\n"
        "theta 2  mu 2  beta 1  bipartite yes  doubly-transitive yes\n"
        "d(z)     = ((z^2)/(2 - z^2))\n"
        "f(z)     = ((2)/(2 - z^2))\n"
        "u(z)     = ((z^2)/(2))\n"
        "u_hat(z) = ((z^2)/(2 - z^2))\n"
        "tau = 4  rho = 2  d_s = 1  alpha = -0.5\n";
    CHECK(run_shell(cli() + " fixtures line 2 | " + cli() + " analyze -").out == line2);

    const std::string flake3 =
        "cell: 7 vertices, 9 edges\n"
        "theta 3  mu 3  beta 1  bipartite no  doubly-transitive yes\n"
        "d(z)     = ((z^2)/(6 - 6*z + z^2))\n"
        "f(z)     = ((12 - 6*z)/(12 - 6*z - 4*z^2 + z^3))\n"
        "u(z)     = ((4*z^2 - z^3)/(12 - 6*z))\n"
        "u_hat(z) = ((4*z^2 - 3*z^3)/(12 - 12*z + z^2))\n"
        "tau = 6  rho = 2  d_s = 1.22629438553092  alpha = -0.386852807234542\n";
    CHECK(run_shell(cli() + " fixtures flake 3 | " + cli() + " analyze -").out == flake3);

    const std::string gasket =
        "cell: 6 vertices, 9 edges\n"
        "theta 3  mu 3  beta 1  bipartite no  doubly-transitive yes\n"
        "d(z)     = ((z^2)/(4 - 3*z))\n"
        "f(z)     = ((8 - 2*z - z^2)/(8 - 2*z - 3*z^2))\n"
        "u(z)     = ((2*z^2)/(8 - 2*z - z^2))\n"
        "u_hat(z) = ((2*z^2 - z^3)/(8 - 6*z - z^2))\n"
        "tau = 5  rho = 5/3  d_s = 1.36521238897197  alpha = -0.317393805514015\n";
    CHECK(run_shell(cli() + " fixtures sierpinski 2 2 | " + cli() + " analyze -").out == gasket);
}

TEST_CASE("fixtures json mirror feeds back in") {
    RunResult r = run_shell(cli() + " --json fixtures flake 3 | " + cli() + " analyze -");
    CHECK(r.code == 0);
    CHECK(r.out.find("tau = 6") != std::string::npos);
}
