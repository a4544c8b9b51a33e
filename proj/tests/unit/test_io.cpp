#include "fpblock/error.hpp"
#include "fpblock/io.hpp"

#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>
#include <limits>
#include <random>
#include <sstream>

using namespace fpblock;

namespace {

DensityField random_field(const Grid& g, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n01;
    DensityField f(g);
    for (double& x : f.values) x = n01(rng) * 1e-3;
    return f;
}

std::filesystem::path temp_path(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "fpblock_io_test";
    std::filesystem::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST(Io, HeaderText) {
    const Grid g({-2.0, -1.5}, {2.0, 2.5}, {8, 8});
    EXPECT_EQ(grid_header("fpgrid", g), "fpgrid v1 dim=2 n=8,8 lo=-2,-1.5 hi=2,2.5");
    EXPECT_EQ(grid_header("fphist", Grid::cube(1, 0.1, 0.9, 4)), "fphist v1 dim=1 n=4 lo=0.10000000000000001 hi=0.90000000000000002");
}

TEST(Io, FpgridRoundTripIsBitIdentical) {
    for (int dim : {1, 2, 3}) {
        const Grid g = Grid::cube(dim, -1.0 / 3.0, 2.0 / 3.0, 6);
        DensityField f = random_field(g, static_cast<std::uint64_t>(dim));
        f.values[0] = -0.0;
        f.values[1] = std::numeric_limits<double>::denorm_min();
        std::stringstream ss;
        write_fpgrid(ss, f);
        const DensityField back = read_fpgrid(ss);
        ASSERT_TRUE(back.grid.matches(g));
        EXPECT_EQ(back.grid.lo(0), g.lo(0));
        ASSERT_EQ(back.values.size(), f.values.size());
        EXPECT_EQ(std::memcmp(back.values.data(), f.values.data(), f.values.size() * sizeof(double)), 0);
    }
}

TEST(Io, PayloadIsLittleEndianAfterHeaderLine) {
    const Grid g = Grid::cube(1, 0.0, 1.0, 2);
    std::stringstream ss;
    write_fpgrid(ss, DensityField(g, {1.0, -2.0}));
    const std::string s = ss.str();
    const auto nl = s.find('\n');
    ASSERT_EQ(s.size(), nl + 1 + 16);
    // 1.0 = 0x3FF0000000000000
    const unsigned char* p = reinterpret_cast<const unsigned char*>(s.data() + nl + 1);
    EXPECT_EQ(p[7], 0x3F);
    EXPECT_EQ(p[6], 0xF0);
    for (int i = 0; i < 6; ++i) EXPECT_EQ(p[i], 0);
    EXPECT_EQ(p[15], 0xC0);
}

TEST(Io, FphistRoundTrip) {
    Histogram h(Grid({0.0, 0.0, 0.0}, {1.0, 2.0, 0.5}, {4, 8, 2}));
    for (std::size_t i = 0; i < h.counts.size(); ++i) h.counts[i] = i * 977 + (i % 3);
    h.total_retained = h.in_domain() + 12345;
    std::stringstream ss;
    write_fphist(ss, h);
    EXPECT_NE(ss.str().find(" total=" + std::to_string(h.total_retained) + "\n"), std::string::npos);
    const Histogram back = read_fphist(ss);
    EXPECT_TRUE(back.grid.matches(h.grid));
    EXPECT_EQ(back.counts, h.counts);
    EXPECT_EQ(back.total_retained, h.total_retained);
}

TEST(Io, FileRoundTrip) {
    const auto path = temp_path("field.fpgrid");
    const DensityField f = random_field(Grid::cube(2, 0.0, 1.0, 5), 9);
    save_fpgrid(path, f);
    EXPECT_EQ(load_fpgrid(path).values, f.values);
    const auto hpath = temp_path("hist.fphist");
    Histogram h(Grid::cube(2, 0.0, 1.0, 5));
    h.counts[3] = 7;
    h.total_retained = 9;
    save_fphist(hpath, h);
    EXPECT_EQ(load_fphist(hpath).counts, h.counts);
    std::filesystem::remove_all(path.parent_path());
}

TEST(Io, MalformedInputsRaiseIoError) {
    const Grid g = Grid::cube(2, 0.0, 1.0, 4);
    std::stringstream good;
    write_fpgrid(good, DensityField(g));
    const std::string text = good.str();

    std::stringstream truncated(text.substr(0, text.size() - 3));
    EXPECT_THROW(read_fpgrid(truncated), IoError);

    std::stringstream wrong_magic("fphist" + text.substr(6));
    EXPECT_THROW(read_fpgrid(wrong_magic), IoError);

    std::stringstream bad_version("fpgrid v2 dim=2 n=4,4 lo=0,0 hi=1,1\n");
    EXPECT_THROW(read_fpgrid(bad_version), IoError);

    std::stringstream missing("fpgrid v1 dim=2 n=4,4 lo=0,0\n");
    EXPECT_THROW(read_fpgrid(missing), IoError);

    std::stringstream inconsistent("fpgrid v1 dim=3 n=4,4 lo=0,0 hi=1,1\n");
    EXPECT_THROW(read_fpgrid(inconsistent), IoError);

    std::stringstream junk("fpgrid v1 dim=2 n=4,x lo=0,0 hi=1,1\n");
    EXPECT_THROW(read_fpgrid(junk), IoError);

    std::stringstream anisotropic("fpgrid v1 dim=2 n=4,4 lo=0,0 hi=1,2\n");
    EXPECT_THROW(read_fpgrid(anisotropic), IoError);

    std::stringstream empty;
    EXPECT_THROW(read_fpgrid(empty), IoError);

    std::stringstream no_total("fphist v1 dim=1 n=2 lo=0 hi=1\n");
    EXPECT_THROW(read_fphist(no_total), IoError);

    Histogram h(Grid::cube(1, 0.0, 1.0, 2));
    h.counts = {5, 5};
    h.total_retained = 3;
    std::stringstream over;
    write_fphist(over, h);
    EXPECT_THROW(read_fphist(over), IoError);

    EXPECT_THROW(load_fpgrid("/nonexistent/dir/x.fpgrid"), IoError);
    EXPECT_THROW(save_fpgrid("/nonexistent/dir/x.fpgrid", DensityField(g)), IoError);
}

TEST(Io, FieldCsvRows) {
    const Grid g({0.0, 0.0}, {1.0, 0.5}, {2, 1});
    std::ostringstream os;
    write_field_csv(os, DensityField(g, {1.5, -2.0}));
    EXPECT_EQ(os.str(), "0.25,0.25,1.5\n0.75,0.25,-2\n");
}
