#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct Run {
    int status = -1;
    std::string out;
    std::string err;
};

std::string data(const char *name) { return std::string(HLYL_TEST_DATA_DIR) + "/" + name; }

fs::path work_dir() {
    const fs::path dir(HLYL_TEST_WORK_DIR);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Run run(const std::string &args) {
    const auto err_file = work_dir() / "stderr.txt";
    const std::string cmd = std::string("\"") + HLYL_CLI_PATH + "\" " + args + " 2>\"" + err_file.string() + "\"";
    Run r;
    FILE *pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) {
        r.out.append(buf.data(), n);
    }
    const int raw = pclose(pipe);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    r.err = slurp(err_file);
    return r;
}

bool has(const std::string &haystack, const std::string &needle) { return haystack.find(needle) != std::string::npos; }

} // namespace

TEST_SUITE("cli lifetable") {
    TEST_CASE("Japan excerpt prints e0 and HLE and writes the table") {
        const auto out = work_dir() / "japan_extended.csv";
        fs::remove(out);
        const auto r = run("lifetable --in " + data("japan_2011_fig3_excerpt.tsv") +
                           " --qconv identity --hlyl-ref 9.84 --xmax 97 --out " + out.string());
        CHECK(r.status == 0);
        CHECK(has(r.out, "e0=82.71"));
        CHECK(has(r.out, "HLE=72.87"));
        CHECK(has(r.err, "note:"));
        CHECK_FALSE(has(r.out, "note:"));
        REQUIRE(fs::exists(out));
        CHECK(has(slurp(out), "2011,10,"));
    }

    TEST_CASE("minimal input uses default ax") {
        const auto in = work_dir() / "minimal.csv";
        std::ofstream(in) << "Age,mx\n0,0.01\n1,0.002\n2,0.003\n3+,0.4\n";
        const auto out = work_dir() / "minimal_out.csv";
        const auto r = run("lifetable --in " + in.string() + " --out " + out.string() + " --models empirical");
        CHECK(r.status == 0);
        const auto csv = slurp(out);
        CHECK(has(csv, "\n,0,0.01000,"));
        CHECK(has(csv, ",0.21,"));
    }

    TEST_CASE("missing input names the path") {
        const auto r = run("lifetable --in /nonexistent/japan.txt");
        CHECK(r.status == 1);
        CHECK(has(r.err, "/nonexistent/japan.txt"));
        CHECK(r.out.empty());
    }

    TEST_CASE("malformed input exits 1") {
        const auto in = work_dir() / "bad.csv";
        std::ofstream(in) << "Age,mx\n0,0.01\n2,0.3\n";
        const auto r = run("lifetable --in " + in.string());
        CHECK(r.status == 1);
        CHECK(has(r.err, "gap"));
    }

    TEST_CASE("bad flags exit 1") {
        CHECK(run("lifetable --in x --qconv sometimes").status == 1);
        CHECK(run("").status == 1);
        CHECK(run("--help").status == 0);
    }
}

TEST_SUITE("cli hlyl") {
    TEST_CASE("constant hazard fixture") {
        const auto in = work_dir() / "constant.csv";
        std::ofstream f(in);
        f << "Age,mx\n";
        for (int x = 1; x <= 100; ++x) {
            f << x << ",0.02\n";
        }
        f << "101+,0.02\n";
        f.close();
        const auto r = run("hlyl --in " + in.string() + " --models empirical");
        CHECK(r.status == 0);
        CHECK(has(r.out, "from_m=1.00 from_q=1.00 average=1.00 x_max=1"));
        CHECK_FALSE(has(r.out, "gompertz"));
        CHECK_FALSE(has(r.out, "weibull"));
    }

    TEST_CASE("source selection and chart") {
        const auto chart = work_dir() / "fhm.svg";
        fs::remove(chart);
        const auto r = run("hlyl --in " + data("japan_2011_extended_0_70.tsv") + " --source m --chart " +
                           chart.string());
        CHECK(r.status == 0);
        CHECK(has(r.out, "from_m="));
        CHECK_FALSE(has(r.out, "from_q="));
        CHECK(has(r.out, "gompertz="));
        CHECK(fs::exists(chart));
    }

    TEST_CASE("window flag") {
        CHECK(run("hlyl --in " + data("japan_2011_extended_0_70.tsv") + " --window 40,60").status == 0);
        const auto r = run("hlyl --in " + data("japan_2011_extended_0_70.tsv") + " --window 60");
        CHECK(r.status == 1);
        CHECK(has(r.err, "--window"));
    }

    TEST_CASE("batch mode over a directory") {
        const auto dir = work_dir() / "batch";
        fs::remove_all(dir);
        fs::create_directories(dir);
        fs::copy_file(data("japan_2011_fig3_excerpt.tsv"), dir / "a.tsv");
        fs::copy_file(data("japan_2011_extended_0_70.tsv"), dir / "b.tsv");
        const auto out = work_dir() / "batch_out";
        fs::remove_all(out);
        const auto r = run("lifetable --in " + dir.string() + " --qconv identity --out " + out.string());
        CHECK(r.status == 0);
        CHECK(has(r.out, "a.tsv"));
        CHECK(has(r.out, "b.tsv"));
        CHECK(fs::exists(out / "a.csv"));
        CHECK(fs::exists(out / "b.csv"));
    }
}

TEST_SUITE("cli spend fit") {
    TEST_CASE("Japan fit") {
        const auto report = work_dir() / "fit.json";
        const auto chart = work_dir() / "fit.svg";
        const auto r = run("spend fit --in " + data("japan_2011_expenditure.csv") + " --lifetable " +
                           data("japan_2011_abridged.tsv") + " --out " + report.string() + " --chart " +
                           chart.string());
        CHECK(r.status == 0);
        CHECK(has(r.out, "k=28.657 sse=13164 se=25.04 r2_standard=0.9961 moveup=5.68%"));
        CHECK(has(slurp(report), "\"k_source\": \"fitted\""));
        CHECK(has(slurp(chart), "class=\"bar\""));
    }

    TEST_CASE("fixed k reproduces the published estimates") {
        const auto r = run("spend fit --in " + data("japan_2011_expenditure.csv") + " --k 28.657");
        CHECK(r.status == 0);
        CHECK(has(r.out, "(fixed)"));
        CHECK(has(r.out, "estimate[0]=211.28"));
        CHECK(has(r.out, "estimate[20]=1193.79"));
    }

    TEST_CASE("zero move-up") {
        const auto r = run("spend fit --in " + data("japan_2011_expenditure.csv") + " --moveup 0");
        CHECK(r.status == 0);
        CHECK(has(r.out, "move_up=0 "));
        CHECK(has(r.out, "moveup=0.00%"));
    }

    TEST_CASE("degenerate series exits 1") {
        const auto in = work_dir() / "flat.csv";
        std::ofstream(in) << "group,x_ref,mx,spend\n0-4,2,0.1,5\n5-9,7,0.1,5\n10+,12,0.1,5\n";
        const auto r = run("spend fit --in " + in.string());
        CHECK(r.status == 1);
        CHECK_FALSE(r.err.empty());
    }

    TEST_CASE("identical invocations give identical files") {
        const auto dir = work_dir();
        for (const char *tag : {"1", "2"}) {
            const auto r = run("spend fit --in " + data("japan_2011_expenditure.csv") + " --out " +
                               (dir / (std::string("det") + tag + ".json")).string() + " --chart " +
                               (dir / (std::string("det") + tag + ".svg")).string());
            REQUIRE(r.status == 0);
            const auto t = run("lifetable --in " + data("japan_2011_extended_0_70.tsv") + " --out " +
                               (dir / (std::string("det") + tag + ".csv")).string() + " --chart " +
                               (dir / (std::string("detfhm") + tag + ".svg")).string());
            REQUIRE(t.status == 0);
        }
        CHECK(slurp(dir / "det1.json") == slurp(dir / "det2.json"));
        CHECK(slurp(dir / "det1.svg") == slurp(dir / "det2.svg"));
        CHECK(slurp(dir / "det1.csv") == slurp(dir / "det2.csv"));
        CHECK(slurp(dir / "detfhm1.svg") == slurp(dir / "detfhm2.svg"));
    }
}
