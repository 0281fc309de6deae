#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "json.hpp"

#ifndef SDC_CLI_PATH
#error "SDC_CLI_PATH must point at the sdc executable"
#endif

namespace fs = std::filesystem;

namespace {

fs::path work_dir()
{
    const fs::path dir = fs::path(SDC_TEST_WORK_DIR) / "cli";
    fs::create_directories(dir);
    return dir;
}

int run(const std::string& args)
{
    const std::string cmd = std::string("\"") + SDC_CLI_PATH + "\" " + args + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

fs::path write_config(const std::string& name, const std::string& text)
{
    const fs::path p = work_dir() / name;
    std::ofstream(p) << text;
    return p;
}

} // namespace

TEST(Cli, ToleranceCsvIsByteIdenticalAcrossRunsAndThreads)
{
    const fs::path cfg = write_config("tol.cfg", "n = 2000\ni = 20\nseed = 99\n");
    const fs::path a = work_dir() / "tol_a.csv";
    const fs::path b = work_dir() / "tol_b.csv";
    const fs::path c = work_dir() / "tol_c.csv";
    const std::string common = "tolerance --config " + cfg.string() + " --dw 500,1000,2000 --method both";
    ASSERT_EQ(run(common + " --threads 1 --out " + a.string()), 0);
    ASSERT_EQ(run(common + " --threads 1 --out " + b.string()), 0);
    ASSERT_EQ(run(common + " --threads 7 --out " + c.string()), 0);
    const std::string first = slurp(a);
    EXPECT_EQ(first, slurp(b));
    EXPECT_EQ(first, slurp(c));
    EXPECT_EQ(first.substr(0, first.find('\n')), "dw_mm,tau_d_max_mm,method,seed");
    EXPECT_NE(first.find(",bmc,99\n"), std::string::npos);
    EXPECT_NE(first.find(",linear,99\n"), std::string::npos);

    const auto manifest = nlohmann::json::parse(slurp(a.string() + ".manifest.json"));
    EXPECT_EQ(manifest["command"], "tolerance");
    EXPECT_EQ(manifest["tolerance"]["seed"], 99);
}

TEST(Cli, MapAndPowerAreDeterministic)
{
    for (const std::string sub : {"map --nx 40 --ny 30", "power --dw-range 10000 90000 17 --design-dw 50000"}) {
        const fs::path a = work_dir() / "det_a.csv";
        const fs::path b = work_dir() / "det_b.csv";
        ASSERT_EQ(run(sub + " --threads 1 --out " + a.string()), 0) << sub;
        ASSERT_EQ(run(sub + " --threads 5 --out " + b.string()), 0) << sub;
        EXPECT_EQ(slurp(a), slurp(b)) << sub;
    }
}

TEST(Cli, CsvHeaders)
{
    const std::pair<std::string, std::string> cases[] = {
        {"map --nx 3 --ny 3", "x_mm,y_mm,g"},
        {"map --nx 3 --ny 3 --z dg --z-range 54 56 --nz 2", "x_mm,y_mm,z_mm,g"},
        {"width --dw 6000", "dw_mm,lower_mm,upper_mm,width_mm"},
        {"dtstar --dw 6000", "dw_mm,dt_star_mm"},
        {"profile --samples 5", "z_mm,w00_mm"},
        {"power --dw 6000", "dw_mm,dt_mm,g,w00_gain_mm,t_diff,p_out_w"},
        {"surface --a-g 1,2 --m-tel 2,3", "a_g_mm,m_tel,p_out_w"},
    };
    for (const auto& [args, header] : cases) {
        const fs::path out = work_dir() / "header.csv";
        ASSERT_EQ(run(args + " --out " + out.string()), 0) << args;
        const std::string text = slurp(out);
        EXPECT_EQ(text.substr(0, text.find('\n')), header) << args;
    }
}

TEST(Cli, DtStarValue)
{
    const fs::path out = work_dir() / "dtstar.csv";
    ASSERT_EQ(run("dtstar --dw 6000 --out " + out.string()), 0);
    const std::string text = slurp(out);
    const std::string row = text.substr(text.find('\n') + 1);
    EXPECT_NEAR(std::stod(row.substr(row.find(',') + 1)), 85.3, 1e-9);
}

TEST(Cli, JsonOutput)
{
    const fs::path out = work_dir() / "width.json";
    ASSERT_EQ(run("width --dw 6000,12000 --format json --out " + out.string()), 0);
    const auto j = nlohmann::json::parse(slurp(out));
    ASSERT_EQ(j["rows"].size(), 2u);
    EXPECT_NEAR(j["rows"][0]["width_mm"].get<double>(), 0.6, 1e-9);
    EXPECT_NEAR(j["rows"][1]["width_mm"].get<double>(), 0.3, 1e-9);
}

TEST(Cli, ExitCodes)
{
    const fs::path bad = write_config("bad.cfg", "d1 = 30\nnot_a_key = 4\n");
    const fs::path unstable = write_config("unstable.cfg", "dt = 84\n");
    EXPECT_EQ(run("g"), 0);
    EXPECT_EQ(run("g --config " + bad.string()), 2);
    EXPECT_EQ(run("g --config /nonexistent/x.cfg"), 2);
    EXPECT_EQ(run("profile --config " + unstable.string()), 3);
    EXPECT_EQ(run("no-such-command"), 1);
    EXPECT_EQ(run("width --dw abc"), 1);
    EXPECT_EQ(run(""), 1);
}
