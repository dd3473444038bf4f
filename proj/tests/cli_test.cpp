#include <gtest/gtest.h>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <string>
#include <sys/wait.h>

namespace {

struct Run {
    int code = -1;
    std::string out;
};

Run run(const std::string &args) {
    std::string cmd = std::string(CLONETRADE_CLI_PATH) + " " + args + " 2>/dev/null";
    Run r;
    FILE *p = popen(cmd.c_str(), "r");
    if (!p) return r;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
    int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string write_targets(const std::string &name, const std::string &body) {
    std::string path = ::testing::TempDir() + name;
    std::ofstream(path) << body;
    return path;
}

}  // namespace

TEST(Cli, Symfid) {
    auto r = run("symfid --M 1 --N 2 --L 1 --d 2");
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "5/6");
    EXPECT_NE(r.out.find("decimal 0.833333333333333"), std::string::npos);
    EXPECT_NE(r.out.find("agrees"), std::string::npos);
    EXPECT_EQ(run("symfid --M 1 --N 3 --L 3 --d 2").out.substr(0, 3), "1/2");
    EXPECT_EQ(run("symfid --M 2 --N 4 --L 2 --d 2").out.substr(0, 5), "23/30");
    EXPECT_NE(run("symfid --M 3 --N 2 --L 1 --d 2").code, 0);
    EXPECT_NE(run("symfid --M 1 --N 2 --L 1").code, 0);
}

TEST(Cli, Deterministic) {
    EXPECT_EQ(run("symfid --M 2 --N 5 --L 3 --d 3").out, run("symfid --M 2 --N 5 --L 3 --d 3").out);
    EXPECT_EQ(run("region --mode 2to4 --grid 5").out, run("region --mode 2to4 --grid 5").out);
}

TEST(Cli, Gram) {
    auto r = run("gram --M 1 --N 2 --d 2");
    ASSERT_EQ(r.code, 0);
    auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["rows"][0][1], "1/2");
    EXPECT_EQ(j["spectrum"][0]["value"], "3/2");
    auto l = nlohmann::json::parse(run("gram --M 1 --N 2 --d 2 --L 1 --y 00").out);
    EXPECT_EQ(l["rows"][0][0], "3/2");
}

TEST(Cli, Oracle) {
    auto r = run("oracle --M 1 --N 2 --L 1 --d 2");
    ASSERT_EQ(r.code, 0);
    auto j = nlohmann::json::parse(r.out);
    EXPECT_NEAR(j["lambda_max"].get<double>(), 5.0 / 6, 1e-12);
    EXPECT_EQ(j["symmetric_value"], "5/6");
}

TEST(Cli, CheckOneToTwo) {
    auto ok = run("check " + write_targets("a.json", R"({"M":1,"L":1,"N":2,"d":2,"targets":{"10":0.8,"01":0.8}})"));
    EXPECT_EQ(ok.code, 0);
    auto j = nlohmann::json::parse(ok.out);
    EXPECT_EQ(j["verdict"], "Feasible");
    EXPECT_TRUE(j["witness"].contains("10"));
    auto bad = run("check " + write_targets("b.json", R"({"M":1,"L":1,"N":2,"d":2,"targets":{"10":"9/10","01":"9/10"}})"));
    EXPECT_EQ(bad.code, 1);
    EXPECT_EQ(nlohmann::json::parse(bad.out)["verdict"], "Infeasible");
}

TEST(Cli, CheckTwoToThreeBoundary) {
    auto r = run("check " + write_targets("c.json", R"({"M":2,"L":1,"N":3,"d":2,"targets":{"100":"11/12","010":"11/12","001":"11/12"}})"));
    EXPECT_EQ(r.code, 0);
}

TEST(Cli, CheckOneLN) {
    auto r = run("check " + write_targets("d.json", R"({"M":1,"L":2,"N":4,"d":2,"targets":{"1100":0.5,"1010":0.5,"1001":0.5,"0110":0.5,"0101":0.5,"0011":0.5}})"));
    EXPECT_EQ(r.code, 0);
    auto s = run("check " + write_targets("e.json", R"({"M":1,"L":2,"N":4,"d":2,"targets":{"1100":0.9,"1010":0.9,"1001":0.9,"0110":0.9,"0101":0.9,"0011":0.9}})"));
    EXPECT_EQ(s.code, 1);
}

TEST(Cli, CheckCaseStudy) {
    auto r = run("check " + write_targets("f.json", R"({"M":2,"L":2,"N":4,"d":2,"targets":{"1100":0.5,"0011":0.5,"1010":0.5,"0101":0.5,"0110":0.5,"1001":0.5}})"));
    EXPECT_EQ(r.code, 0);
    auto s = run("check " + write_targets("g.json", R"({"M":2,"L":2,"N":4,"d":2,"targets":{"1100":0.95,"0011":0.95,"1010":0.95,"0101":0.95,"0110":0.95,"1001":0.95}})"));
    EXPECT_EQ(s.code, 1);
}

TEST(Cli, CheckUnsupported) {
    auto r = run("check " + write_targets("h.json", R"({"M":2,"L":2,"N":5,"d":2,"targets":{"11000":0.5}})"));
    EXPECT_EQ(r.code, 3);
    EXPECT_NE(r.out.find("Excluded"), std::string::npos);
}

TEST(Cli, CheckBadInput) {
    EXPECT_NE(run("check /nonexistent/targets.json").code, 0);
    auto r = run("check " + write_targets("i.json", R"({"M":1,"L":1,"N":2,"d":2,"targets":{"10":1.5}})"));
    EXPECT_NE(r.code, 0);
}

TEST(Cli, RegionOneToN) {
    auto r = run("region --mode one-to-n --N 3 --d 2 --grid 5");
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "F_1,F_2,F_3,achievable");
    int rows = 0;
    for (char c : r.out) rows += c == '\n';
    EXPECT_EQ(rows, 26);
}

TEST(Cli, RegionToFile) {
    std::string path = ::testing::TempDir() + "region.csv";
    ASSERT_EQ(run("region --mode 2to4 --grid 3 --output " + path).code, 0);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header, "F_1100,F_1010,F_0110,member,class");
    EXPECT_NE(run("region --mode 2to4 --grid 3 --output /nonexistent/dir/x.csv").code, 0);
    EXPECT_NE(run("region --mode sideways --grid 3").code, 0);
}

TEST(Cli, Verify) {
    auto r = run("verify --scope fast");
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("criterion 3"), std::string::npos);
    EXPECT_NE(run("verify --scope sometimes").code, 0);
}

TEST(Cli, OneToNDiagonalHitsSymmetricOptimum) {
    auto r = run("region --mode one-to-n --N 3 --d 2 --grid 100");
    ASSERT_EQ(r.code, 0);
    // (7/9 - 1/3) / (2/3) = 66/99
    auto at = r.out.find("\n0.777777777777778,0.777777777777778,");
    ASSERT_NE(at, std::string::npos);
    std::string row = r.out.substr(at + 1, r.out.find('\n', at + 1) - at - 1);
    double f3 = std::stod(row.substr(36));
    EXPECT_NEAR(f3, 7.0 / 9, 1e-12);
    EXPECT_EQ(row.back(), '1');
}
