#include "blc/io.hpp"
#include "blc/seeds.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

using namespace blc;
namespace fs = std::filesystem;

namespace {

ErrorKind kind_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no error raised";
    return ErrorKind::InvalidCase;
}

std::string to_csv(const ScalarField& f) {
    std::ostringstream out;
    write_csv(out, f);
    return out.str();
}

fs::path scratch_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("blc_io_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

}  // namespace

TEST(ParseGrid, AxesAndSizes) {
    const Grid g = parse_grid("-1:1:0.5,0:2:0.25");
    EXPECT_EQ(g.x1.n, 5u);
    EXPECT_EQ(g.x2.n, 9u);
    EXPECT_DOUBLE_EQ(g.x1.at(0), -1.0);
    EXPECT_DOUBLE_EQ(g.x1.at(4), 1.0);
    EXPECT_DOUBLE_EQ(g.x2.h, 0.25);
    EXPECT_DOUBLE_EQ(g.x2.at(8), 2.0);
}

TEST(ParseGrid, RejectsMalformedSpecs) {
    for (const char* bad : {"", "-1:1:0.5", "-1:1:0.5,0:1", "-1:1,0:1:0.1", "a:1:0.1,0:1:0.1", "-1:1:0.1x,0:1:0.1",
                            "-1:1:0.1,0:1:0.1,0:1:0.1", "-1:1:0.1:3,0:1:0.1"}) {
        EXPECT_EQ(kind_of([&] { (void)parse_grid(bad); }), ErrorKind::InvalidConfig) << bad;
    }
}

TEST(Csv, HeaderAndRowOrder) {
    ScalarField f(Grid::square(0, 1, 0.5), 0.0);
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) f.set(i, j, 10.0 * i + j);
    }
    f.set(1, 1, std::numeric_limits<double>::quiet_NaN(), false);
    const auto rows = lines_of(to_csv(f));
    ASSERT_EQ(rows.size(), 10u);
    EXPECT_EQ(rows[0], "x1,x2,value,valid");
    EXPECT_EQ(rows[1], "0,0,0,1");
    EXPECT_EQ(rows[2], "0,0.5,1,1");
    EXPECT_EQ(rows[5], "0.5,0.5,0,0");
    EXPECT_EQ(rows[9], "1,1,22,1");
}

TEST(Csv, RoundTripIsBitIdentical) {
    std::mt19937_64 rng(83);
    std::uniform_real_distribution<double> u(-1e3, 1e3);
    const Grid g{Axis::span(-1.3, 0.7, 0.1), Axis::span(0.2, 1.1, 0.03)};
    ScalarField f(g, 0.0);
    for (std::size_t k = 0; k < g.size(); ++k) {
        f.values[k] = u(rng) * std::exp(u(rng) / 100);
        f.valid[k] = rng() % 7 != 0;
        if (!f.valid[k]) f.values[k] = 0.0;
    }
    const std::string text = to_csv(f);
    std::istringstream in(text);
    const ScalarField back = read_csv(in);
    EXPECT_EQ(back.grid.x1.n, g.x1.n);
    EXPECT_EQ(back.grid.x2.n, g.x2.n);
    EXPECT_EQ(back.values, f.values);
    EXPECT_EQ(back.valid, f.valid);
    EXPECT_EQ(to_csv(back), text);
}

TEST(Csv, FileRoundTripAndErrors) {
    const fs::path dir = scratch_dir("csv");
    const ScalarField f = sample(kink_seed(case_from_id(1), 0.7, 0.1), Grid::square(-1, 1, 0.1));
    save_csv(dir / "nested" / "a.csv", f);
    EXPECT_FALSE(fs::exists(dir / "nested" / "a.csv.tmp"));
    const ScalarField back = load_csv(dir / "nested" / "a.csv");
    EXPECT_EQ(back.values, f.values);

    EXPECT_EQ(kind_of([&] { (void)load_csv(dir / "missing.csv"); }), ErrorKind::Io);
    for (const char* bad : {"", "a,b,c,d\n0,0,0,1\n", "x1,x2,value,valid\n", "x1,x2,value,valid\n0,0,zz,1\n",
                            "x1,x2,value,valid\n0,0,1\n"}) {
        std::istringstream in(bad);
        EXPECT_EQ(kind_of([&] { (void)read_csv(in); }), ErrorKind::Io) << bad;
    }
    fs::remove_all(dir);
}

TEST(Mesh, ObjSkipsInvalidCells) {
    const Grid g = Grid::square(0, 1, 0.25);  // 5x5 nodes, 16 cells
    SurfaceMesh m{g, std::vector<Vec3>(g.size()), 0, std::vector<std::uint8_t>(g.size(), 1), {}, {}};
    for (std::size_t i = 0; i < 5; ++i) {
        for (std::size_t j = 0; j < 5; ++j) m.points[g.index(i, j)] = {g.x1.at(i), g.x2.at(j), 0.0};
    }
    m.valid[g.index(2, 2)] = 0;  // removes the 4 surrounding cells
    std::ostringstream out;
    write_obj(out, m);
    std::size_t v = 0, f = 0;
    long max_index = 0;
    for (const auto& l : lines_of(out.str())) {
        if (l.rfind("v ", 0) == 0) ++v;
        if (l.rfind("f ", 0) == 0) {
            ++f;
            std::istringstream ls(l.substr(2));
            for (long a; ls >> a;) max_index = std::max(max_index, a);
        }
    }
    EXPECT_EQ(v, 24u);
    EXPECT_EQ(f, 24u);
    EXPECT_EQ(max_index, 24);
}

TEST(Mesh, PlyHeaderCounts) {
    const Grid g = Grid::square(0, 1, 0.5);
    SurfaceMesh m{g, std::vector<Vec3>(g.size(), Vec3{1, 2, 3}), 1, std::vector<std::uint8_t>(g.size(), 1), {}, {}};
    m.valid[g.index(0, 0)] = 0;
    std::ostringstream out;
    write_ply(out, m);
    const auto rows = lines_of(out.str());
    ASSERT_GE(rows.size(), 10u);
    EXPECT_EQ(rows[0], "ply");
    EXPECT_EQ(rows[1], "format ascii 1.0");
    EXPECT_EQ(rows[2], "element vertex 8");
    EXPECT_EQ(rows[6], "element face 6");
    EXPECT_EQ(rows[8], "end_header");
    EXPECT_EQ(rows.size(), 9u + 8u + 6u);
    EXPECT_EQ(rows.back().substr(0, 2), "3 ");
}

TEST(AtomicWrite, ReplacesTargetAndReportsFailure) {
    const fs::path dir = scratch_dir("atomic");
    const fs::path target = dir / "out.txt";
    write_atomically(target, [](std::ostream& o) { o << "first"; });
    write_atomically(target, [](std::ostream& o) { o << "second"; });
    std::ifstream in(target);
    std::string text;
    std::getline(in, text);
    EXPECT_EQ(text, "second");
    EXPECT_FALSE(fs::exists(dir / "out.txt.tmp"));

    fs::create_directories(dir / "blocker");
    std::ofstream(dir / "blocker" / "x") << "occupied";
    EXPECT_EQ(kind_of([&] { write_atomically(dir / "blocker", [](std::ostream& o) { o << "y"; }); }), ErrorKind::Io);
    EXPECT_FALSE(fs::exists(dir / "blocker.tmp"));
    fs::remove_all(dir);
}
